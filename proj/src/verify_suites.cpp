#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>
#include <string>

#include <fmt/format.h>

#include "karlin/choquet_oracle.hpp"
#include "karlin/distributions.hpp"
#include "karlin/error.hpp"
#include "karlin/karlin_sim.hpp"
#include "karlin/limit_sim.hpp"
#include "karlin/parallel.hpp"
#include "karlin/verify.hpp"

namespace karlin {

namespace {

// Stream layout: suite tag in the top byte, a block id for sub-experiments,
// replica index in the low 40 bits.
StreamKey stream(const SuiteConfig& cfg, std::uint64_t tag, std::uint64_t block, std::uint64_t replica) {
    return {cfg.seed, (tag << 56) | (block << 40) | replica};
}

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

HeavyTailSpec mark_spec(const SuiteConfig& cfg) {
    HeavyTailSpec spec{cfg.alpha, 1.0, MarkLaw::pareto};
    spec.validate();
    return spec;
}

std::uint64_t max_n(const SuiteConfig& cfg) { return *std::max_element(cfg.n_grid.begin(), cfg.n_grid.end()); }

std::vector<IntervalSet> unit_sets(std::initializer_list<std::pair<double, double>> pairs) {
    std::vector<IntervalSet> out;
    for (auto [lo, hi] : pairs) out.push_back(IntervalSet::single(lo, hi));
    return out;
}

/// P(all M(A_i) ≤ z_i) estimates with binomial SE around the target.
ReportRow joint_row(const std::string& check, std::uint64_t hits, std::uint64_t trials, double target,
                    double se_multiplier) {
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    const double se = std::sqrt(target * (1.0 - target) / static_cast<double>(trials));
    return row_within(check, p, target, se_multiplier * se);
}

double ks_vs_frechet(const std::vector<double>& values, double alpha, double sigma) {
    const auto s = sorted(values);
    const FrechetLaw law{alpha, sigma};
    return ks_statistic(s, [&](double z) { return frechet_cdf(z, law); });
}

SuiteReport empty_report(const SuiteConfig& cfg) {
    SuiteReport r;
    r.suite = cfg.suite;
    r.seed = cfg.seed;
    return r;
}

void limit_params_check(const SuiteConfig& cfg) {
    if (cfg.limit_replicas < 100) throw DomainError("limit_replicas must be at least 100");
}

}  // namespace

// ---------------------------------------------------------------------------

SuiteConfig SuiteConfig::defaults(const std::string& suite) {
    SuiteConfig cfg;
    cfg.suite = suite;
    if (suite == "marginal") {
        cfg.n_grid = {1'000, 10'000, 100'000};
        cfg.replicas = 2000;
        cfg.family = unit_sets({{0.0, 1.0}, {0.0, 0.25}});
    } else if (suite == "locations") {
        cfg.n_grid = {100'000};
        cfg.replicas = 10'000;
        cfg.limit_replicas = 10'000;
        cfg.family = unit_sets({{0.0, 0.25}, {0.5, 0.75}});
    } else if (suite == "occupancy") {
        cfg.n_grid = {1'000'000};
        cfg.replicas = 100;
    } else if (suite == "patterns") {
        cfg.n_grid = {1'000'000};
        cfg.replicas = 100;
        cfg.family = unit_sets({{0.0, 0.5}, {0.5, 1.0}, {0.25, 0.75}});
    } else if (suite == "limit-oracle") {
        cfg.replicas = 100;
        cfg.limit_replicas = 100'000;
    } else if (suite == "extremal-mstar") {
        cfg.n_grid = {100'000};
        cfg.replicas = 2000;
        cfg.limit_replicas = 100'000;
        cfg.family = unit_sets({{0.25, 1.0}});
    } else {
        throw DomainError("unknown suite '" + suite + "'");
    }
    return cfg;
}

void SuiteConfig::validate() const {
    if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
        throw DomainError("unknown suite '" + suite + "'");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
    if (replicas < 100) throw DomainError("replicas must be at least 100");
    if (confidence != 0.95 && confidence != 0.99) throw DomainError("confidence must be 0.95 or 0.99");
    for (auto n : n_grid)
        if (n == 0) throw DomainError("n must be positive");
    if (family.size() > kMaxFamily) throw CapacityError("query family exceeds 20 sets");
    if (repetitions == 0) throw DomainError("repetitions must be positive");
    if (!(se_multiplier > 0.0)) throw DomainError("se_multiplier must be positive");
}

// ---------------------------------------------------------------------------
// M_n(A)/b_n against Fréchet(α, Leb(A)^β) over the n grid.

SuiteReport suite_thm2_marginal(const SuiteConfig& cfg) {
    cfg.validate();
    if (cfg.n_grid.size() < 2) throw DomainError("marginal suite needs at least two grid sizes");
    if (cfg.family.empty()) throw DomainError("marginal suite needs a query family");
    auto report = empty_report(cfg);
    const ZetaFrequencyModel model(cfg.beta);
    const auto spec = mark_spec(cfg);
    const std::size_t d = cfg.family.size();

    // ks[rep][grid][set]
    std::vector<std::vector<std::vector<double>>> ks(cfg.repetitions);
    for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
        for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
            const auto n = cfg.n_grid[g];
            const auto block = rep * cfg.n_grid.size() + g;
            auto sups = parallel_map<std::vector<double>>(cfg.replicas, cfg.threads, [&](std::uint64_t r) {
                const auto run = simulate(model, spec, n, stream(cfg, 1, block, r));
                std::vector<double> v(d);
                for (std::size_t k = 0; k < d; ++k) v[k] = empirical_sup(run, cfg.family[k]).normalized;
                return v;
            });
            std::vector<double> row(d);
            for (std::size_t k = 0; k < d; ++k) {
                std::vector<double> col(cfg.replicas);
                for (std::size_t r = 0; r < cfg.replicas; ++r) col[r] = sups[r][k];
                row[k] = ks_vs_frechet(col, cfg.alpha, theta(cfg.family[k], cfg.beta));
                report.add(row_info(fmt::format("ks[rep={};n={};set={}]", rep, n, k), row[k], 0.0,
                                    ks_critical(cfg.replicas, cfg.confidence)),
                           n, cfg.replicas);
            }
            ks[rep].push_back(std::move(row));
        }
    }

    const std::size_t g_min = static_cast<std::size_t>(
        std::min_element(cfg.n_grid.begin(), cfg.n_grid.end()) - cfg.n_grid.begin());
    const std::size_t g_max = static_cast<std::size_t>(
        std::max_element(cfg.n_grid.begin(), cfg.n_grid.end()) - cfg.n_grid.begin());
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
            std::vector<double> across;
            for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) across.push_back(ks[rep][g][k]);
            const double med = median(across);
            if (g == g_max)
                report.add(row_at_most(fmt::format("median_ks[n={};set={}]", cfg.n_grid[g], k), med, cfg.ks_threshold),
                           cfg.n_grid[g], cfg.replicas);
            else
                report.add(row_info(fmt::format("median_ks[n={};set={}]", cfg.n_grid[g], k), med, 0.0,
                                    cfg.ks_threshold),
                           cfg.n_grid[g], cfg.replicas);
        }
        std::vector<double> lo, hi;
        for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
            lo.push_back(ks[rep][g_min][k]);
            hi.push_back(ks[rep][g_max][k]);
        }
        report.add(row_below(fmt::format("ks_decrease[n={}->{};set={}]", cfg.n_grid[g_min], cfg.n_grid[g_max], k),
                             median(hi), median(lo)),
                   cfg.n_grid[g_max], cfg.replicas);
        report.add(row_info(fmt::format("frechet_scale[set={}]", k), theta(cfg.family[k], cfg.beta),
                            std::pow(cfg.family[k].lebesgue(), cfg.beta), 0.0),
                   0, 0);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Location sets of the top order statistics.

SuiteReport suite_thm1_locations(const SuiteConfig& cfg) {
    cfg.validate();
    limit_params_check(cfg);
    if (cfg.family.empty() || cfg.family.size() > 5) throw DomainError("locations suite needs 1 to 5 query sets (m <= 5)");
    auto report = empty_report(cfg);
    const ZetaFrequencyModel model(cfg.beta);
    const auto spec = mark_spec(cfg);
    const std::size_t m = cfg.family.size();
    const auto n = max_n(cfg);

    struct Obs {
        std::uint32_t hit_own = 0;  // bit k: top-(k+1) meets A_k
        std::uint32_t top1 = 0;     // bit k: top-1 meets A_k
        std::vector<double> values;
    };
    auto obs = parallel_map<Obs>(cfg.replicas, cfg.threads, [&](std::uint64_t r) {
        const auto run = simulate(model, spec, n, stream(cfg, 2, 0, r));
        const auto top = top_m(run, m);
        Obs o;
        o.values.assign(m, 0.0);
        for (std::size_t k = 0; k < top.size(); ++k) {
            o.values[k] = top[k].value_normalized;
            if (top[k].hits(cfg.family[k])) o.hit_own |= 1u << k;
        }
        for (std::size_t k = 0; k < m; ++k)
            if (!top.empty() && top[0].hits(cfg.family[k])) o.top1 |= 1u << k;
        return o;
    });

    double joint_target = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
        const double target = theta(cfg.family[k], cfg.beta);
        joint_target *= target;
        std::uint64_t hits = 0;
        for (const auto& o : obs) hits += (o.hit_own >> k) & 1u;
        report.add(row_wilson(fmt::format("top{}_hits[set={}]", k + 1, k), hits, cfg.replicas, target, cfg.confidence),
                   n, cfg.replicas);
    }
    if (m >= 2) {
        const std::uint32_t all = (1u << m) - 1u;
        std::uint64_t joint = 0;
        for (const auto& o : obs) joint += o.hit_own == all;
        report.add(row_wilson(fmt::format("joint_top1..{}_hits", m), joint, cfg.replicas, joint_target, cfg.confidence),
                   n, cfg.replicas);
        // top-1 meets both A_1 and A_2: θ(A_1) + θ(A_2) - θ(A_1 ∪ A_2)
        const double both = theta(cfg.family[0], cfg.beta) + theta(cfg.family[1], cfg.beta) -
                            theta(set_union(cfg.family[0], cfg.family[1]), cfg.beta);
        std::uint64_t top1_both = 0;
        for (const auto& o : obs) top1_both += (o.top1 & 3u) == 3u;
        report.add(row_wilson("top1_hits_sets_0_and_1", top1_both, cfg.replicas, both, cfg.confidence), n,
                   cfg.replicas);
    }

    auto limit = parallel_map<std::vector<LimitAtom>>(cfg.limit_replicas, cfg.threads, [&](std::uint64_t r) {
        Rng rng(stream(cfg, 2, 1, r));
        return sample_top_m_process(rng, cfg.alpha, cfg.beta, m, cfg.family);
    });
    for (std::size_t k = 0; k < m; ++k) {
        std::vector<double> discrete(cfg.replicas), lim(cfg.limit_replicas);
        for (std::size_t r = 0; r < cfg.replicas; ++r) discrete[r] = obs[r].values[k];
        for (std::size_t r = 0; r < cfg.limit_replicas; ++r) lim[r] = limit[r][k].value;
        discrete = sorted(std::move(discrete));
        lim = sorted(std::move(lim));
        report.add(row_at_most(fmt::format("ks2_top{}_value", k + 1), ks_two_sample(discrete, lim),
                               ks_two_sample_critical(cfg.replicas, cfg.limit_replicas, cfg.confidence)),
                   n, cfg.replicas);
        std::uint64_t lim_hits = 0;
        for (const auto& atoms : limit) lim_hits += (atoms[k].hits >> k) & 1u;
        report.add(row_wilson(fmt::format("limit_top{}_hits[set={}]", k + 1, k), lim_hits, cfg.limit_replicas,
                              theta(cfg.family[k], cfg.beta), cfg.confidence),
                   0, cfg.limit_replicas);
    }
    {
        std::vector<double> top1(cfg.replicas);
        for (std::size_t r = 0; r < cfg.replicas; ++r) top1[r] = obs[r].values[0];
        const double d = ks_vs_frechet(top1, cfg.alpha, 1.0);
        report.add(row_at_most("ks_top1_vs_frechet", d, ks_critical(cfg.replicas, cfg.confidence)), n, cfg.replicas);
    }
    return report;
}

// ---------------------------------------------------------------------------
// K_n/ν((0,n]) → Γ(1-β) and block frequencies → p_β(k).

SuiteReport suite_occupancy(const SuiteConfig& cfg) {
    cfg.validate();
    auto report = empty_report(cfg);
    const ZetaFrequencyModel model(cfg.beta);
    const auto spec = mark_spec(cfg);
    const auto n = max_n(cfg);
    constexpr std::size_t kCells = 10;

    struct Obs {
        double ratio = 0.0;
        std::vector<std::uint64_t> cells;  // k = 1..10, then > 10
    };
    auto obs = parallel_map<Obs>(cfg.replicas, cfg.threads, [&](std::uint64_t r) {
        const auto run = simulate(model, spec, n, stream(cfg, 3, 0, r));
        Obs o;
        o.ratio = static_cast<double>(run.k_n()) / static_cast<double>(model.nu_count(static_cast<double>(n)));
        o.cells.assign(kCells + 1, 0);
        for (auto [k, count] : run.occupancy_histogram()) o.cells[std::min<std::uint64_t>(k, kCells + 1) - 1] += count;
        return o;
    });

    double sum = 0.0, sum2 = 0.0;
    std::vector<std::uint64_t> cells(kCells + 1, 0);
    for (const auto& o : obs) {
        sum += o.ratio;
        sum2 += o.ratio * o.ratio;
        for (std::size_t c = 0; c <= kCells; ++c) cells[c] += o.cells[c];
    }
    const double runs = static_cast<double>(cfg.replicas);
    const double mean = sum / runs;
    const double sd = std::sqrt(std::max(0.0, (sum2 - runs * mean * mean) / (runs - 1.0)));
    const double g = gamma_fn(1.0 - cfg.beta);
    report.add(row_within("mean_kn_over_nu", mean, g, cfg.occupancy_rel_tol * g), n, cfg.replicas);
    report.add(row_info("sd_kn_over_nu", sd, 0.0, sd / std::sqrt(runs)), n, cfg.replicas);

    double boxes = 0.0;
    for (auto c : cells) boxes += static_cast<double>(c);
    std::vector<double> probs(kCells + 1);
    for (std::size_t k = 1; k <= kCells; ++k) {
        probs[k - 1] = qbeta_pmf(static_cast<std::int64_t>(k), cfg.beta);
        const double freq = static_cast<double>(cells[k - 1]) / boxes;
        const std::string name = fmt::format("block_freq[k={}]", k);
        if (k == 1)
            report.add(row_within(name, freq, probs[0], cfg.singleton_rel_tol * probs[0]), n, cfg.replicas);
        else
            report.add(row_info(name, freq, probs[k - 1], std::sqrt(probs[k - 1] * (1 - probs[k - 1]) / boxes)), n,
                       cfg.replicas);
    }
    probs[kCells] = qbeta_tail(static_cast<double>(kCells), cfg.beta);
    const auto chi = chi_square_test(cells, probs, cfg.confidence);
    report.add(row_at_most(fmt::format("chi_square_blocks[df={}]", chi.dof), chi.statistic, chi.critical), n,
               cfg.replicas);
    return report;
}

// ---------------------------------------------------------------------------
// τ^δ_A(n)/ν((0,n]) against its limit for every δ, over each prefix A_1..A_d'
// of the family.

SuiteReport suite_patterns(const SuiteConfig& cfg) {
    cfg.validate();
    if (cfg.family.empty()) throw DomainError("patterns needs a query family");
    auto report = empty_report(cfg);
    const ZetaFrequencyModel model(cfg.beta);
    const auto spec = mark_spec(cfg);
    const auto n = max_n(cfg);
    const std::size_t d = cfg.family.size();
    const double nu = static_cast<double>(model.nu_count(static_cast<double>(n)));

    std::vector<std::vector<IntervalSet>> prefixes, unions;
    for (std::size_t k = 1; k <= d; ++k) {
        prefixes.emplace_back(cfg.family.begin(), cfg.family.begin() + static_cast<std::ptrdiff_t>(k));
        unions.push_back({union_all(prefixes.back())});
    }

    struct Obs {
        std::vector<std::vector<std::uint64_t>> hist;  // per prefix
        std::vector<std::uint64_t> union_boxes;
    };
    auto obs = parallel_map<Obs>(cfg.replicas, cfg.threads, [&](std::uint64_t r) {
        const auto run = simulate(model, spec, n, stream(cfg, 4, 0, r));
        Obs o;
        for (std::size_t k = 0; k < d; ++k) {
            o.hist.push_back(pattern_histogram(run, prefixes[k]));
            o.union_boxes.push_back(pattern_histogram(run, unions[k])[1]);
        }
        return o;
    });

    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t dk = k + 1;
        const std::size_t masks = std::size_t{1} << dk;
        std::uint64_t partition_gap = 0;
        double union_mean = 0.0;
        for (const auto& o : obs) {
            std::uint64_t total = 0;
            for (std::size_t mask = 1; mask < masks; ++mask) total += o.hist[k][mask];
            const auto u = o.union_boxes[k];
            partition_gap += total > u ? total - u : u - total;
            union_mean += static_cast<double>(u) / nu;
        }
        union_mean /= static_cast<double>(cfg.replicas);

        for (std::uint32_t mask = 1; mask < masks; ++mask) {
            std::vector<int> delta(dk);
            std::string tag;
            for (std::size_t i = 0; i < dk; ++i) {
                delta[i] = (mask >> i) & 1u;
                tag += delta[i] ? '1' : '0';
            }
            double mean = 0.0;
            for (const auto& o : obs) mean += static_cast<double>(o.hist[k][mask]) / nu;
            mean /= static_cast<double>(cfg.replicas);
            const double target = pattern_limit(PatternQuery{prefixes[k], delta}, cfg.beta);
            report.add(row_within(fmt::format("tau_over_nu[d={};delta={}]", dk, tag), mean, target,
                                  cfg.pattern_rel_tol * target),
                       n, cfg.replicas);
        }
        report.add(row_within(fmt::format("partition_identity_gap[d={}]", dk), static_cast<double>(partition_gap), 0.0,
                              0.0),
                   n, cfg.replicas);
        const double union_target = gamma_fn(1.0 - cfg.beta) * theta(unions[k][0], cfg.beta);
        report.add(row_within(fmt::format("union_over_nu[d={}]", dk), union_mean, union_target,
                              cfg.pattern_rel_tol * union_target),
                   n, cfg.replicas);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Exact limit samples against the closed-form joint law.

namespace {

struct JointCount {
    std::uint64_t hits = 0;
    std::uint64_t trials = 0;
};

// Counts draws with M(A_i) ≤ z_i for all i.
JointCount count_joint(const SuiteConfig& cfg, const ChoquetQuery& q, std::uint64_t block) {
    std::vector<IntervalSet> family;
    for (const auto& t : q.terms) family.push_back(t.set);
    const KarlinSampler sampler(q.alpha, q.beta, family);
    auto inside = parallel_map<char>(cfg.limit_replicas, cfg.threads, [&](std::uint64_t r) -> char {
        Rng rng(stream(cfg, 5, block, r));
        const auto s = sampler(rng);
        for (std::size_t i = 0; i < q.terms.size(); ++i)
            if (s.values[i] > q.terms[i].z) return 0;
        return 1;
    });
    JointCount c{0, cfg.limit_replicas};
    for (char v : inside) c.hits += static_cast<std::uint64_t>(v);
    return c;
}

ChoquetQuery random_query(Rng& rng) {
    ChoquetQuery q;
    q.alpha = 0.5 + 1.5 * uniform_open(rng);
    q.beta = 0.2 + 0.6 * uniform_open(rng);
    const std::size_t d = 1 + static_cast<std::size_t>(3.0 * uniform_open(rng));
    for (std::size_t i = 0; i < d; ++i) {
        std::vector<Interval> raw;
        const std::size_t pieces = 1 + static_cast<std::size_t>(2.0 * uniform_open(rng));
        for (std::size_t p = 0; p < pieces; ++p) {
            double a = uniform_open(rng), b = uniform_open(rng);
            if (a > b) std::swap(a, b);
            raw.push_back({a, b});
        }
        q.terms.push_back({IntervalSet::normalize(raw), 0.5 + 2.0 * uniform_open(rng)});
    }
    return q;
}

struct TauEstimate {
    double tau = 0.0;
    double se = 0.0;
    double p_joint = 0.0;
};

// τ̂_z(t) from window samples of (M([0,1)), M([t,t+1))) with a delta-method SE.
TauEstimate estimate_tau(const SuiteConfig& cfg, double t, double z, std::uint64_t block) {
    const Carrier window = Carrier::window(t + 1.0);
    const std::vector<IntervalSet> family{IntervalSet::single(0.0, 1.0, window),
                                          IntervalSet::single(t, t + 1.0, window)};
    const KarlinSampler sampler(cfg.alpha, cfg.beta, family);
    auto flags = parallel_map<std::uint8_t>(cfg.limit_replicas, cfg.threads, [&](std::uint64_t r) {
        Rng rng(stream(cfg, 5, block, r));
        const auto s = sampler(rng);
        return static_cast<std::uint8_t>((s.values[0] <= z ? 1 : 0) | (s.values[1] <= z ? 2 : 0));
    });
    const double n = static_cast<double>(cfg.limit_replicas);
    double c1 = 0, c2 = 0, c12 = 0;
    for (auto f : flags) {
        c1 += f & 1;
        c2 += (f >> 1) & 1;
        c12 += f == 3;
    }
    const double p1 = c1 / n, p2 = c2 / n, p12 = c12 / n;
    TauEstimate e;
    e.p_joint = p12;
    e.tau = std::log(p12) - std::log(p1) - std::log(p2);
    // influence of one draw: 1{J}/p12 - 1{A}/p1 - 1{B}/p2
    double s = 0.0, s2 = 0.0;
    for (auto f : flags) {
        const double v = (f == 3 ? 1.0 / p12 : 0.0) - ((f & 1) ? 1.0 / p1 : 0.0) - ((f & 2) ? 1.0 / p2 : 0.0);
        s += v;
        s2 += v * v;
    }
    const double mean = s / n;
    e.se = std::sqrt(std::max(0.0, s2 / n - mean * mean) / n);
    return e;
}

}  // namespace

SuiteReport suite_limit_vs_oracle(const SuiteConfig& cfg) {
    cfg.validate();
    limit_params_check(cfg);
    auto report = empty_report(cfg);
    const auto nl = cfg.limit_replicas;
    std::uint64_t block = 0;

    for (std::size_t i = 0; i < cfg.random_queries; ++i) {
        Rng qrng(stream(cfg, 5, 0xffff, i));
        const auto q = random_query(qrng);
        const auto c = count_joint(cfg, q, ++block);
        report.add(joint_row(fmt::format("random_query[{};d={}]", i, q.terms.size()), c.hits, c.trials, joint_cdf(q),
                             cfg.se_multiplier),
                   0, nl);
    }

    // Same streams under a doubled atom cap: the stopping rule never depends on the cap.
    {
        Rng qrng(stream(cfg, 5, 0xffff, 0));
        const auto q = random_query(qrng);
        std::vector<IntervalSet> family;
        for (const auto& t : q.terms) family.push_back(t.set);
        const KarlinSampler base(q.alpha, q.beta, family, kDefaultAtomCap);
        const KarlinSampler doubled(q.alpha, q.beta, family, 2 * kDefaultAtomCap);
        auto mismatch = parallel_map<char>(nl, cfg.threads, [&](std::uint64_t r) -> char {
            Rng a(stream(cfg, 5, 1, r)), b(stream(cfg, 5, 1, r));
            const auto x = base(a), y = doubled(b);
            if (x.atoms_used != y.atoms_used) return 1;
            return std::memcmp(x.values.data(), y.values.data(), x.values.size() * sizeof(double)) != 0;
        });
        double bad = 0;
        for (char m : mismatch) bad += m;
        report.add(row_within("doubled_cap_mismatches", bad, 0.0, 0.0), 0, nl);
    }

    auto fixed = [&](const std::string& name, ChoquetQuery q) {
        const auto c = count_joint(cfg, q, ++block);
        report.add(joint_row(name, c.hits, c.trials, joint_cdf(q), cfg.se_multiplier), 0, nl);
    };
    const double a = cfg.alpha, b = cfg.beta;
    fixed("d1_quarter", ChoquetQuery{{{IntervalSet::single(0.0, 0.25), 1.0}}, a, b});
    fixed("d2_halves", ChoquetQuery{{{IntervalSet::single(0.0, 0.5), 1.0}, {IntervalSet::single(0.5, 1.0), 1.0}}, a, b});
    fixed("d2_union_window2", ChoquetQuery{{{IntervalSet::single(0.0, 1.0, Carrier::window(2)), 1.0},
                                            {IntervalSet::single(1.0, 2.0, Carrier::window(2)), 1.0}},
                                           a, b});
    fixed("d2_nested_weights", ChoquetQuery{{{IntervalSet::single(0.0, 1.0, Carrier::window(2)), 1.0},
                                             {IntervalSet::single(0.0, 2.0, Carrier::window(2)), 2.0}},
                                            a, b});

    // −log P(M(A_1) ≤ 1, M(A_2) ≤ 1) for disjoint unit intervals: union form 2^β vs AND form 2 − 2^β.
    {
        const Carrier w = Carrier::window(3.0);
        const ChoquetQuery q{{{IntervalSet::single(0.0, 1.0, w), 1.0}, {IntervalSet::single(2.0, 3.0, w), 1.0}}, a, b};
        const auto c = count_joint(cfg, q, ++block);
        const double p = static_cast<double>(c.hits) / static_cast<double>(c.trials);
        const double est = -std::log(p);
        const double se = std::sqrt((1.0 - p) / (p * static_cast<double>(c.trials)));
        const double union_form = std::pow(2.0, b), and_form = 2.0 - std::pow(2.0, b);
        report.add(row_within("adjudication_neglogp_union_form", est, union_form, cfg.se_multiplier * se), 0, nl);
        report.add(row_outside("adjudication_neglogp_and_form_rejected", est, and_form, cfg.se_multiplier * se), 0,
                   nl);
    }

    // τ̂_z(t) on separated windows: constant, positive, and equal to (2 − 2^β) z^{-α}.
    {
        const double z = 1.0;
        const std::vector<double> ts{1.5, 2.0, 5.0};
        std::vector<TauEstimate> est;
        for (double t : ts) est.push_back(estimate_tau(cfg, t, z, ++block));
        const double zw = std::pow(z, -a);
        const double union_tau = tau_z(2.0, z, a, b);
        const double and_tau = std::pow(2.0, b) * zw;
        for (std::size_t i = 0; i < ts.size(); ++i) {
            const auto& e = est[i];
            const double tol = cfg.se_multiplier * e.se;
            report.add(row_within(fmt::format("tau_hat[t={}]_vs_oracle", ts[i]), e.tau, tau_z(ts[i], z, a, b), tol),
                       0, nl);
            report.add(row_exceeds(fmt::format("tau_hat[t={}]_positive", ts[i]), e.tau, 0.0, tol), 0, nl);
            report.add(row_within(fmt::format("tau_adjudication[t={}]_union_form", ts[i]), e.tau, union_tau, tol), 0,
                       nl);
            report.add(row_outside(fmt::format("tau_adjudication[t={}]_and_form_rejected", ts[i]), e.tau, and_tau, tol),
                       0, nl);
        }
        for (std::size_t i = 0; i < ts.size(); ++i)
            for (std::size_t j = i + 1; j < ts.size(); ++j) {
                const double se = std::hypot(est[i].se, est[j].se);
                report.add(row_within(fmt::format("tau_constant[t={}-t={}]", ts[i], ts[j]), est[i].tau - est[j].tau,
                                      0.0, cfg.se_multiplier * se),
                           0, nl);
            }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Extremal process, M* and the discrete first-visit variant.

SuiteReport suite_extremal_and_mstar(const SuiteConfig& cfg) {
    cfg.validate();
    limit_params_check(cfg);
    if (cfg.family.empty()) throw DomainError("extremal-mstar needs a query family");
    auto report = empty_report(cfg);
    const auto nl = cfg.limit_replicas;
    const double a = cfg.alpha, b = cfg.beta;
    const double ks_crit = ks_critical(nl, cfg.confidence);
    std::uint64_t block = 0;

    auto draw_column = [&](const std::vector<IntervalSet>& family, std::size_t index, auto&& sampler_fn) {
        const auto blk = ++block;
        return parallel_map<double>(nl, cfg.threads, [&](std::uint64_t r) {
            Rng rng(stream(cfg, 6, blk, r));
            return sampler_fn(rng, family).values[index];
        });
    };
    auto karlin_fn = [&](Rng& rng, const std::vector<IntervalSet>& f) { return sample_on_window(rng, a, b, f); };
    auto star_fn = [&](Rng& rng, const std::vector<IntervalSet>& f) { return sample_mstar(rng, a, b, f); };

    // M([0,t]) marginals.
    for (double t : {0.25, 1.0, 4.0}) {
        const Carrier c = t > 1.0 ? Carrier::window(t) : Carrier::unit();
        const std::vector<IntervalSet> family{IntervalSet::single(0.0, t, c)};
        const auto col = draw_column(family, 0, karlin_fn);
        const double target = std::pow(std::pow(t, b) / std::log(2.0), 1.0 / a);
        report.add(row_within(fmt::format("median_M[0;{}]", t), median(col), target, cfg.median_rel_tol * target), 0,
                   nl);
        report.add(row_at_most(fmt::format("ks_M[0;{}]", t), ks_vs_frechet(col, a, std::pow(t, b)), ks_crit), 0, nl);
    }

    // Self-similarity: max over four unit cells of [0,4] against 4^{β/α} M([0,1)).
    {
        const Carrier w = Carrier::window(4.0);
        const std::vector<IntervalSet> cells{IntervalSet::single(0, 1, w), IntervalSet::single(1, 2, w),
                                             IntervalSet::single(2, 3, w), IntervalSet::single(3, 4, w)};
        const auto blk = ++block;
        auto joint = parallel_map<double>(nl, cfg.threads, [&](std::uint64_t r) {
            Rng rng(stream(cfg, 6, blk, r));
            const auto s = sample_on_window(rng, a, b, cells);
            return *std::max_element(s.values.begin(), s.values.end());
        });
        auto scaled = draw_column({IntervalSet::single(0.0, 1.0)}, 0, karlin_fn);
        for (auto& v : scaled) v *= std::pow(4.0, b / a);
        report.add(row_at_most("ks2_self_similarity[T=4]", ks_two_sample(sorted(joint), sorted(scaled)),
                               ks_two_sample_critical(nl, nl, cfg.confidence)),
                   0, nl);
    }
    // Translation invariance inside one draw's family.
    {
        const std::vector<IntervalSet> pair{IntervalSet::single(0.0, 0.25), IntervalSet::single(0.6, 0.85)};
        const auto blk = ++block;
        auto both = parallel_map<std::pair<double, double>>(nl, cfg.threads, [&](std::uint64_t r) {
            Rng rng(stream(cfg, 6, blk, r));
            const auto s = sample_karlin(rng, a, b, pair);
            return std::pair{s.values[0], s.values[1]};
        });
        std::vector<double> x, y;
        for (std::size_t r = 0; r < nl; ++r) (r % 2 ? y.push_back(both[r].second) : x.push_back(both[r].first));
        report.add(row_at_most("ks2_translation", ks_two_sample(sorted(x), sorted(y)),
                               ks_two_sample_critical(x.size(), y.size(), cfg.confidence)),
                   0, nl);
    }
    // Two-time extremal law through nested sets.
    {
        const Carrier w = Carrier::window(2.0);
        const std::vector<IntervalSet> nested{IntervalSet::single(0.0, 1.0, w), IntervalSet::single(0.0, 2.0, w)};
        const std::vector<double> times{1.0, 2.0}, levels{1.0, 1.5};
        const auto blk = ++block;
        auto in = parallel_map<char>(nl, cfg.threads, [&](std::uint64_t r) -> char {
            Rng rng(stream(cfg, 6, blk, r));
            const auto s = sample_on_window(rng, a, b, nested);
            return s.values[0] <= levels[0] && s.values[1] <= levels[1];
        });
        std::uint64_t hits = 0;
        for (char v : in) hits += static_cast<std::uint64_t>(v);
        report.add(joint_row("extremal_cdf[t=1;2]", hits, nl, extremal_cdf(times, levels, a, b), cfg.se_multiplier), 0,
                   nl);
    }

    // M* marginals on the configured sets.
    for (std::size_t k = 0; k < cfg.family.size(); ++k) {
        const auto& set = cfg.family[k];
        if (set.size() != 1 || !(set.carrier() == Carrier::unit()))
            throw DomainError("extremal-mstar: query sets must be single intervals on [0,1]");
        const auto iv = set.intervals()[0];
        const double sigma = mstar_theta(iv.lo, iv.hi, b);
        const auto col = draw_column({set}, 0, star_fn);
        for (double z : {0.5, 1.0, 2.0}) {
            std::uint64_t hits = 0;
            for (double v : col) hits += v <= z;
            report.add(joint_row(fmt::format("mstar_cdf[set={};z={}]", k, z), hits, nl,
                                 frechet_cdf(z, FrechetLaw{a, sigma}), cfg.se_multiplier),
                       0, nl);
        }
        report.add(row_at_most(fmt::format("ks_mstar[set={}]", k), ks_vs_frechet(col, a, sigma), ks_crit), 0, nl);
    }
    {
        const auto col = draw_column({IntervalSet::single(0.0, 0.5)}, 0, star_fn);
        report.add(row_at_most("ks_mstar[0;0.5]_vs_theta", ks_vs_frechet(col, a, std::pow(0.5, b)), ks_crit), 0, nl);
    }

    // Coupled M ≥ M*.
    {
        std::vector<IntervalSet> family{IntervalSet::single(0.0, 1.0)};
        for (const auto& s : cfg.family) family.push_back(s);
        const auto blk = ++block;
        auto pairs = parallel_map<CoupledSample>(nl, cfg.threads, [&](std::uint64_t r) {
            Rng rng(stream(cfg, 6, blk, r));
            return sample_coupled(rng, a, b, family);
        });
        std::uint64_t dominated = 0;
        for (const auto& p : pairs) {
            bool ok = true;
            for (std::size_t i = 0; i < family.size(); ++i) ok = ok && p.karlin.values[i] >= p.star.values[i];
            dominated += ok;
        }
        report.add(row_within("coupled_domination_fraction", static_cast<double>(dominated) / static_cast<double>(nl),
                              1.0, 0.0),
                   0, nl);
        std::vector<double> m(nl), ms(nl);
        for (std::size_t r = 0; r < nl; ++r) {
            m[r] = pairs[r].karlin.values[1];
            ms[r] = pairs[r].star.values[1];
        }
        report.add(row_at_most("ks_coupled_M[set=0]", ks_vs_frechet(m, a, theta(family[1], b)), ks_crit), 0, nl);
        const auto iv = family[1].intervals()[0];
        report.add(row_at_most("ks_coupled_Mstar[set=0]", ks_vs_frechet(ms, a, mstar_theta(iv.lo, iv.hi, b)), ks_crit),
                   0, nl);
    }

    // Discrete first-visit variant.
    {
        const ZetaFrequencyModel model(cfg.beta);
        const auto spec = mark_spec(cfg);
        const auto n = max_n(cfg);
        const auto unit = IntervalSet::single(0.0, 1.0);
        struct Obs {
            std::vector<double> star;
            bool agree = false;
        };
        auto obs = parallel_map<Obs>(cfg.replicas, cfg.threads, [&](std::uint64_t r) {
            const auto run = simulate(model, spec, n, stream(cfg, 6, 0, r));
            Obs o;
            for (const auto& s : cfg.family) o.star.push_back(variant_star_sup(run, s).normalized);
            o.agree = variant_star_sup(run, unit).raw == empirical_sup(run, unit).raw;
            return o;
        });
        for (std::size_t k = 0; k < cfg.family.size(); ++k) {
            std::vector<double> col(cfg.replicas);
            for (std::size_t r = 0; r < cfg.replicas; ++r) col[r] = obs[r].star[k];
            const auto iv = cfg.family[k].intervals()[0];
            report.add(row_at_most(fmt::format("ks_discrete_mstar[n={};set={}]", n, k),
                                   ks_vs_frechet(col, a, mstar_theta(iv.lo, iv.hi, b)), cfg.star_ks_threshold),
                       n, cfg.replicas);
        }
        double agree = 0;
        for (const auto& o : obs) agree += o.agree;
        report.add(row_within("star_equals_plain_on_unit", agree / static_cast<double>(cfg.replicas), 1.0, 0.0), n,
                   cfg.replicas);
    }
    return report;
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"marginal", "locations", "occupancy", "patterns", "limit-oracle",
                                                "extremal-mstar"};
    return names;
}

SuiteReport run_suite(const SuiteConfig& cfg) {
    using Clock = std::chrono::steady_clock;
    const auto start = Clock::now();
    SuiteReport report;
    if (cfg.suite == "marginal")
        report = suite_thm2_marginal(cfg);
    else if (cfg.suite == "locations")
        report = suite_thm1_locations(cfg);
    else if (cfg.suite == "occupancy")
        report = suite_occupancy(cfg);
    else if (cfg.suite == "patterns")
        report = suite_patterns(cfg);
    else if (cfg.suite == "limit-oracle")
        report = suite_limit_vs_oracle(cfg);
    else if (cfg.suite == "extremal-mstar")
        report = suite_extremal_and_mstar(cfg);
    else
        throw DomainError("unknown suite '" + cfg.suite + "'");
    report.runtime_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return report;
}

}  // namespace karlin
