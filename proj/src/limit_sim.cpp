#include "karlin/limit_sim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "karlin/distributions.hpp"
#include "karlin/error.hpp"

namespace karlin {

namespace {

void check_params(double alpha, double beta) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
}

void check_measures(std::span<const double> mu) {
    if (mu.size() > kMaxFamily)
        throw CapacityError("hit-pattern sampler: " + std::to_string(mu.size()) + " atoms exceed the budget of 20");
    double total = 0.0;
    for (double m : mu) {
        if (!(m > 0.0)) throw DomainError("hit-pattern sampler: atom measures must be positive");
        total += m;
    }
    if (total > 1.0 + 1e-12) throw DomainError("hit-pattern sampler: atom measures sum above 1");
}

std::uint32_t full_mask(std::size_t d) { return d == 32 ? ~0u : ((1u << d) - 1u); }

std::string unhit_report(const std::vector<bool>& hit) {
    std::string out;
    for (std::size_t i = 0; i < hit.size(); ++i)
        if (!hit[i]) out += (out.empty() ? "" : ",") + std::to_string(i);
    return out;
}

// Common stop-when-all-hit loop; atom_hits(rng, gamma) returns a mask over sets.
template <typename AtomHits>
LimitSample run_series(Rng& rng, double alpha, std::span<const IntervalSet> family, std::uint64_t cap,
                       AtomHits atom_hits) {
    LimitSample out;
    out.values.assign(family.size(), 0.0);
    std::vector<bool> hit(family.size(), false);
    std::size_t remaining = 0;
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (family[i].lebesgue() > 0.0)
            ++remaining;
        else
            hit[i] = true;  // R is a.s. finite: a null set is never hit
    }
    double gamma = 0.0;
    while (remaining > 0) {
        if (out.atoms_used == cap)
            throw IterationCapError("limit sampler: " + std::to_string(cap) + " atoms without hitting set(s) " +
                                    unhit_report(hit));
        gamma += exponential(rng);
        ++out.atoms_used;
        const std::uint32_t sets = atom_hits(rng);
        if (sets == 0) continue;
        const double value = std::pow(gamma, -1.0 / alpha);
        for (std::size_t i = 0; i < family.size(); ++i) {
            if (!hit[i] && (sets & (1u << i))) {
                hit[i] = true;
                out.values[i] = value;
                --remaining;
            }
        }
    }
    return out;
}

// Window [0,T] → unit family and the self-similar scale T^{β/α}.
double to_unit(std::span<const IntervalSet> family, std::vector<IntervalSet>& unit, double alpha, double beta) {
    unit.clear();
    if (family.empty()) return 1.0;
    const Carrier c = family.front().carrier();
    for (const auto& s : family)
        if (!(s.carrier() == c)) throw DomainError("limit sampler: query sets live on different carriers");
    if (c.lo != 0.0 || !(c.hi > 0.0) || !std::isfinite(c.hi))
        throw DomainError("limit sampler: carrier must be a window [0,T]");
    const double t = c.hi;
    for (const auto& s : family) unit.push_back(t == 1.0 ? s : s.scaled(1.0 / t));
    return t == 1.0 ? 1.0 : std::pow(t, beta / alpha);
}

void require_unit(std::span<const IntervalSet> family) {
    for (const auto& s : family)
        if (!(s.carrier() == Carrier::unit())) throw DomainError("sample_karlin: query sets must live on [0,1]");
}

// Minimum of count i.i.d. uniforms on (0,1).
double min_of_uniforms(Rng& rng, double count) {
    if (std::isinf(count)) return 0.0;
    return -std::expm1(std::log1p(-uniform_open(rng)) / count);
}

double measure_above(const IntervalSet& set, double low) {
    double total = 0.0;
    for (const auto& iv : set.intervals()) total += std::max(0.0, iv.hi - std::max(iv.lo, low));
    return total;
}

}  // namespace

HitPattern sample_hits_given_count(Rng& rng, double count, std::span<const double> mu) {
    const std::size_t m = mu.size();
    const std::uint32_t full = full_mask(m);
    if (m == 0) return 0;
    if (std::isinf(count)) return full;
    if (m == 1) {
        const double void_prob = std::exp(count * std::log1p(-std::min(mu[0], 1.0)));
        return uniform_open(rng) < void_prob ? 0u : 1u;
    }
    const std::size_t patterns = std::size_t{1} << m;
    // g[T] = P(no point in ∪_{j∈T} atom_j) = (1 - μ_T)^count, in log space
    std::vector<double> measure(patterns, 0.0);
    std::vector<double> f(patterns);
    for (std::size_t t = 1; t < patterns; ++t) {
        const std::size_t low = t & (~t + 1);
        const auto j = static_cast<std::size_t>(std::countr_zero(low));
        measure[t] = measure[t ^ low] + mu[j];
    }
    for (std::size_t t = 0; t < patterns; ++t) {
        const double rest = 1.0 - measure[t];
        f[t] = rest <= 0.0 ? 0.0 : std::exp(count * std::log1p(-measure[t]));
    }
    // superset Möbius inversion: f[S] = P(void set == S)
    for (std::size_t j = 0; j < m; ++j) {
        const std::size_t bit = std::size_t{1} << j;
        for (std::size_t s = 0; s < patterns; ++s)
            if (!(s & bit)) f[s] -= f[s | bit];
    }
    double total = 0.0;
    for (auto& p : f) {
        p = std::max(p, 0.0);
        total += p;
    }
    const double u = uniform_open(rng) * total;
    double acc = 0.0;
    std::size_t chosen = patterns - 1;
    for (std::size_t s = 0; s < patterns; ++s) {
        acc += f[s];
        if (u < acc) {
            chosen = s;
            break;
        }
    }
    return full & ~static_cast<std::uint32_t>(chosen);
}

HitPattern sample_rbeta_hits(Rng& rng, double beta, std::span<const double> mu) {
    check_measures(mu);
    const double q = qbeta_sample(rng, beta);
    return sample_hits_given_count(rng, q, mu);
}

HitPattern sample_rbeta_hits_enumerated(Rng& rng, double beta, std::span<const double> mu) {
    check_measures(mu);
    const double q = qbeta_sample(rng, beta);
    if (q > kMaxEnumeratedPoints)
        throw CapacityError("explicit enumeration: Q = " + fmt::format("{}", q) + " exceeds the cap of 1e8 points");
    HitPattern hits = 0;
    for (double i = 0; i < q; ++i) {
        double u = uniform_open(rng);
        for (std::size_t j = 0; j < mu.size(); ++j) {
            if (u < mu[j]) {
                hits |= 1u << j;
                break;
            }
            u -= mu[j];
        }
    }
    return hits;
}

KarlinSampler::KarlinSampler(double alpha, double beta, std::vector<IntervalSet> family, std::uint64_t atom_cap)
    : alpha_(alpha), beta_(beta), atom_cap_(atom_cap) {
    check_params(alpha, beta);
    scale_ = to_unit(family, family_, alpha, beta);
    auto atoms = atomize(family_);
    mu_ = atoms.measures();
    check_measures(mu_);
    set_masks_.resize(family_.size());
    for (std::size_t i = 0; i < family_.size(); ++i) set_masks_[i] = atoms.atom_mask(i);
}

LimitSample KarlinSampler::operator()(Rng& rng) const {
    auto out = run_series(rng, alpha_, family_, atom_cap_, [&](Rng& r) {
        const HitPattern atoms = sample_hits_given_count(r, qbeta_sample(r, beta_), mu_);
        std::uint32_t sets = 0;
        for (std::size_t i = 0; i < set_masks_.size(); ++i)
            if (atoms & set_masks_[i]) sets |= 1u << i;
        return sets;
    });
    if (scale_ != 1.0)
        for (auto& v : out.values) v *= scale_;
    return out;
}

LimitSample sample_karlin(Rng& rng, double alpha, double beta, std::span<const IntervalSet> family,
                          std::uint64_t atom_cap) {
    require_unit(family);
    return KarlinSampler(alpha, beta, {family.begin(), family.end()}, atom_cap)(rng);
}

LimitSample sample_on_window(Rng& rng, double alpha, double beta, std::span<const IntervalSet> family,
                             std::uint64_t atom_cap) {
    return KarlinSampler(alpha, beta, {family.begin(), family.end()}, atom_cap)(rng);
}

LimitSample sample_mstar(Rng& rng, double alpha, double beta, std::span<const IntervalSet> family,
                         std::uint64_t atom_cap) {
    check_params(alpha, beta);
    std::vector<IntervalSet> unit;
    const double scale = to_unit(family, unit, alpha, beta);
    if (unit.size() > kMaxFamily) throw CapacityError("sample_mstar: more than 20 query sets");
    auto out = run_series(rng, alpha, unit, atom_cap, [&](Rng& r) {
        const double point = min_of_uniforms(r, qbeta_sample(r, beta));
        std::uint32_t sets = 0;
        for (std::size_t i = 0; i < unit.size(); ++i)
            if (unit[i].contains(point)) sets |= 1u << i;
        return sets;
    });
    if (scale != 1.0)
        for (auto& v : out.values) v *= scale;
    return out;
}

CoupledSample sample_coupled(Rng& rng, double alpha, double beta, std::span<const IntervalSet> family,
                             std::uint64_t atom_cap) {
    check_params(alpha, beta);
    std::vector<IntervalSet> unit;
    const double scale = to_unit(family, unit, alpha, beta);
    const auto atoms = atomize(unit);
    check_measures(atoms.measures());
    std::vector<std::uint32_t> masks(unit.size());
    for (std::size_t i = 0; i < unit.size(); ++i) masks[i] = atoms.atom_mask(i);
    const std::size_t d = unit.size();

    CoupledSample out;
    out.karlin.values.assign(d, 0.0);
    out.star.values.assign(d, 0.0);
    std::vector<bool> hit_m(d, false), hit_s(d, false);
    std::size_t remaining = 0;
    for (std::size_t i = 0; i < d; ++i) {
        if (unit[i].lebesgue() > 0.0) {
            remaining += 2;
        } else {
            hit_m[i] = hit_s[i] = true;
        }
    }
    std::vector<double> mu_tail(atoms.atoms.size());
    double gamma = 0.0;
    std::uint64_t used = 0;
    while (remaining > 0) {
        if (used == atom_cap)
            throw IterationCapError("coupled sampler: " + std::to_string(atom_cap) + " atoms without hitting set(s) " +
                                    unhit_report(hit_m) + " / " + unhit_report(hit_s));
        gamma += exponential(rng);
        ++used;
        const double q = qbeta_sample(rng, beta);
        const double low = min_of_uniforms(rng, q);
        // the atom holding the minimum, then the other Q-1 points on [low, 1)
        HitPattern atom_hits = 0;
        const double rest = 1.0 - low;
        for (std::size_t j = 0; j < atoms.atoms.size(); ++j) {
            if (atoms.atoms[j].contains(low)) atom_hits |= 1u << j;
            mu_tail[j] = rest > 0.0 ? std::min(measure_above(atoms.atoms[j], low) / rest, 1.0) : 0.0;
        }
        if (q > 1.0) {
            std::vector<double> positive;
            std::vector<std::size_t> where;
            for (std::size_t j = 0; j < mu_tail.size(); ++j)
                if (mu_tail[j] > 0.0) {
                    positive.push_back(mu_tail[j]);
                    where.push_back(j);
                }
            double total = 0.0;
            for (double p : positive) total += p;
            if (total > 1.0)
                for (double& p : positive) p /= total;
            const HitPattern sub = sample_hits_given_count(rng, q - 1.0, positive);
            for (std::size_t k = 0; k < where.size(); ++k)
                if (sub & (1u << k)) atom_hits |= 1u << where[k];
        }
        const double value = std::pow(gamma, -1.0 / alpha);
        for (std::size_t i = 0; i < d; ++i) {
            if (!hit_m[i] && (atom_hits & masks[i])) {
                hit_m[i] = true;
                out.karlin.values[i] = value * scale;
                --remaining;
            }
            if (!hit_s[i] && unit[i].contains(low)) {
                hit_s[i] = true;
                out.star.values[i] = value * scale;
                --remaining;
            }
        }
    }
    out.karlin.atoms_used = out.star.atoms_used = used;
    return out;
}

std::vector<LimitAtom> sample_top_m_process(Rng& rng, double alpha, double beta, std::size_t m,
                                            std::span<const IntervalSet> family) {
    check_params(alpha, beta);
    require_unit(family);
    if (m == 0) throw DomainError("sample_top_m_process: m must be >= 1");
    const auto atoms = atomize(family);
    const auto mu = atoms.measures();
    check_measures(mu);
    std::vector<std::uint32_t> masks(family.size());
    for (std::size_t i = 0; i < family.size(); ++i) masks[i] = atoms.atom_mask(i);

    std::vector<LimitAtom> out(m);
    double gamma = 0.0;
    for (auto& atom : out) {
        gamma += exponential(rng);
        atom.gamma = gamma;
        atom.value = std::pow(gamma, -1.0 / alpha);
        atom.q = qbeta_sample(rng, beta);
        const HitPattern h = sample_hits_given_count(rng, atom.q, mu);
        for (std::size_t i = 0; i < masks.size(); ++i)
            if (h & masks[i]) atom.hits |= 1u << i;
    }
    return out;
}

void write_limit_csv(std::ostream& out, std::span<const LimitSample> samples) {
    out << "replica,set_id,value,atoms_used\n";
    for (std::size_t r = 0; r < samples.size(); ++r)
        for (std::size_t i = 0; i < samples[r].values.size(); ++i)
            out << fmt::format("{},{},{},{}\n", r, i, samples[r].values[i], samples[r].atoms_used);
}

}  // namespace karlin
