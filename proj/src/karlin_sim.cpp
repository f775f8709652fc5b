#include "karlin/karlin_sim.hpp"

#include <algorithm>
#include <cmath>
#include <new>
#include <ostream>
#include <string>
#include <unordered_map>

#include <fmt/format.h>

#include "karlin/error.hpp"

namespace karlin {

ZetaFrequencyModel::ZetaFrequencyModel(double beta) : beta_(beta), sampler_(1.0 / beta) {
    (void)qbeta_tail(1.0, beta);  // validates beta
}

double ZetaFrequencyModel::probability(Label label) const {
    if (label == 0) return 0.0;
    return std::pow(static_cast<double>(label), -exponent()) / zeta_norm();
}

std::uint64_t ZetaFrequencyModel::nu_count(double x) const {
    const double zeta = zeta_norm();
    const double s = exponent();
    if (!(x >= zeta)) return 0;
    // 1/p_ℓ ≤ x  ⇔  ℓ^s ζ ≤ x
    auto qualifies = [&](std::uint64_t l) { return std::pow(static_cast<double>(l), s) * zeta <= x; };
    auto count = static_cast<std::uint64_t>(std::floor(std::pow(x / zeta, beta_)));
    while (qualifies(count + 1)) ++count;
    while (count > 0 && !qualifies(count)) --count;
    return count;
}

double normalization(const FrequencyModel& model, const HeavyTailSpec& spec, std::uint64_t n) {
    spec.validate();
    if (n == 0) throw DomainError("normalization: n must be >= 1");
    const double nd = static_cast<double>(n);
    double count = static_cast<double>(model.nu_count(nd));
    if (count == 0.0) count = std::pow(nd * model.probability(1), model.beta());
    return std::pow(spec.c_alpha * gamma_fn(1.0 - model.beta()) * count, 1.0 / spec.alpha);
}

std::map<std::uint64_t, std::uint64_t> SimRun::occupancy_histogram() const {
    std::map<std::uint64_t, std::uint64_t> hist;
    for (const auto& b : boxes_) ++hist[b.count];
    return hist;
}

SimRun simulate(const FrequencyModel& model, const HeavyTailSpec& spec, std::uint64_t n, StreamKey key,
                std::uint64_t max_draws) {
    spec.validate();
    if (n == 0) throw DomainError("simulate: n must be >= 1");
    if (n > max_draws)
        throw ResourceError("simulate: n = " + std::to_string(n) + " exceeds the draw budget of " +
                            std::to_string(max_draws));
    if (n > std::numeric_limits<std::uint32_t>::max()) throw ResourceError("simulate: n exceeds 2^32 - 1");

    constexpr std::uint64_t kDense = 1u << 16;
    constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();

    SimRun run;
    run.n_ = n;
    run.key_ = key;
    run.spec_ = spec;
    run.b_n_ = normalization(model, spec, n);
    try {
        run.draws_.resize(n);
        std::vector<std::uint32_t> dense(kDense + 1, kUnseen);
        std::unordered_map<Label, std::uint32_t> sparse;
        Rng draw_rng(key.seed, 2 * key.stream);
        Rng mark_rng(key.seed, 2 * key.stream + 1);
        for (std::uint64_t i = 0; i < n; ++i) {
            const Label label = model.draw(draw_rng);
            std::uint32_t id;
            std::uint32_t* slot = nullptr;
            if (label <= kDense) {
                slot = &dense[label];
            } else if (label != kOverflowLabel) {
                slot = &sparse.try_emplace(label, kUnseen).first->second;
            }
            if (slot == nullptr || *slot == kUnseen) {
                // labels >= 2^64 are revisited with probability < n 2^-64: always a new box
                id = static_cast<std::uint32_t>(run.boxes_.size());
                run.boxes_.push_back(Box{label, mark_sample(mark_rng, spec), 0, i + 1});
                if (slot != nullptr) *slot = id;
            } else {
                id = *slot;
            }
            ++run.boxes_[id].count;
            run.draws_[i] = id;
        }
    } catch (const std::bad_alloc&) {
        throw ResourceError("simulate: allocation failed for n = " + std::to_string(n));
    }
    return run;
}

bool TopOrderStat::hits(const IntervalSet& set) const {
    for (std::size_t j = 0; j < locations.size(); ++j)
        if (set.contains(position(j))) return true;
    return false;
}

std::vector<TopOrderStat> top_m(const SimRun& run, std::size_t m) {
    if (m == 0) throw DomainError("top_m: m must be >= 1");
    const auto boxes = run.boxes();
    std::vector<std::uint32_t> order(boxes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<std::uint32_t>(i);
    const std::size_t take = std::min(m, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](std::uint32_t a, std::uint32_t b) {
                          if (boxes[a].mark != boxes[b].mark) return boxes[a].mark > boxes[b].mark;
                          return boxes[a].label < boxes[b].label;
                      });
    std::vector<TopOrderStat> out(take);
    std::vector<int> rank_of(boxes.size(), -1);
    for (std::size_t r = 0; r < take; ++r) {
        const Box& b = boxes[order[r]];
        out[r].rank = r + 1;
        out[r].value = b.mark;
        out[r].value_normalized = b.mark / run.b_n();
        out[r].label = b.label;
        out[r].n = run.n();
        out[r].locations.reserve(b.count);
        rank_of[order[r]] = static_cast<int>(r);
    }
    const auto draws = run.draws();
    for (std::size_t i = 0; i < draws.size(); ++i) {
        const int r = rank_of[draws[i]];
        if (r >= 0) out[static_cast<std::size_t>(r)].locations.push_back(i + 1);
    }
    return out;
}

IndexRange index_range(std::uint64_t n, const Interval& interval) {
    const double nd = static_cast<double>(n);
    auto at_least_lo = [&](std::uint64_t i) { return static_cast<double>(i) / nd >= interval.lo; };
    auto below_hi = [&](std::uint64_t i) { return static_cast<double>(i) / nd < interval.hi; };
    if (n == 0 || !(interval.lo < interval.hi) || interval.lo > 1.0 || interval.hi <= 0.0) return {};

    const double lo_guess = std::ceil(std::max(interval.lo, 0.0) * nd);
    std::uint64_t first = static_cast<std::uint64_t>(std::clamp(lo_guess, 1.0, nd + 1.0));
    while (first > 1 && at_least_lo(first - 1)) --first;
    while (first <= n && !at_least_lo(first)) ++first;

    const double hi_guess = std::ceil(std::min(interval.hi, 2.0) * nd) - 1.0;
    std::uint64_t last = static_cast<std::uint64_t>(std::clamp(hi_guess, 0.0, nd));
    while (last < n && below_hi(last + 1)) ++last;
    while (last >= 1 && !below_hi(last)) --last;
    return {first, last};
}

namespace {

template <typename ValueFn>
SupValue sup_over(const SimRun& run, const IntervalSet& set, ValueFn value) {
    double best = 0.0;
    for (const auto& iv : set.intervals()) {
        const auto range = index_range(run.n(), iv);
        for (std::uint64_t i = range.first; i <= range.last; ++i) best = std::max(best, value(i));
    }
    return {best, best / run.b_n()};
}

}  // namespace

SupValue empirical_sup(const SimRun& run, const IntervalSet& set) {
    const auto draws = run.draws();
    const auto boxes = run.boxes();
    return sup_over(run, set, [&](std::uint64_t i) { return boxes[draws[i - 1]].mark; });
}

SupValue variant_star_sup(const SimRun& run, const IntervalSet& set) {
    const auto draws = run.draws();
    const auto boxes = run.boxes();
    return sup_over(run, set, [&](std::uint64_t i) {
        const Box& b = boxes[draws[i - 1]];
        return b.first_index == i ? b.mark : 0.0;
    });
}

std::vector<std::uint32_t> box_signatures(const SimRun& run, std::span<const IntervalSet> family) {
    if (family.size() > kMaxFamily)
        throw CapacityError("pattern counts: family exceeds " + std::to_string(kMaxFamily) + " sets");
    std::vector<std::uint32_t> sig(run.k_n(), 0);
    const auto draws = run.draws();
    for (std::size_t k = 0; k < family.size(); ++k) {
        const std::uint32_t bit = 1u << k;
        for (const auto& iv : family[k].intervals()) {
            const auto range = index_range(run.n(), iv);
            for (std::uint64_t i = range.first; i <= range.last; ++i) sig[draws[i - 1]] |= bit;
        }
    }
    return sig;
}

std::vector<std::uint64_t> pattern_histogram(const SimRun& run, std::span<const IntervalSet> family) {
    const auto sig = box_signatures(run, family);
    std::vector<std::uint64_t> counts(std::size_t{1} << family.size(), 0);
    for (auto s : sig) ++counts[s];
    return counts;
}

std::uint32_t delta_mask(std::span<const int> delta) {
    if (delta.size() > kMaxFamily) throw CapacityError("pattern: more than 20 sets");
    std::uint32_t mask = 0;
    for (std::size_t k = 0; k < delta.size(); ++k) {
        if (delta[k] != 0 && delta[k] != 1) throw DomainError("pattern: delta entries must be 0 or 1");
        if (delta[k] == 1) mask |= 1u << k;
    }
    if (mask == 0) throw DomainError("pattern: delta must have at least one entry equal to 1");
    return mask;
}

std::uint64_t pattern_counts(const SimRun& run, std::span<const IntervalSet> family, std::span<const int> delta) {
    if (delta.size() != family.size()) throw DomainError("pattern_counts: delta and family sizes differ");
    const std::uint32_t want = delta_mask(delta);
    std::uint64_t count = 0;
    for (auto s : box_signatures(run, family)) count += (s == want);
    return count;
}

void write_top_m_csv(std::ostream& out, std::span<const TopOrderStat> stats) {
    out << "rank,value,value_normalized,label,locations\n";
    for (const auto& t : stats) {
        out << fmt::format("{},{},{},{},", t.rank, t.value, t.value_normalized, t.label);
        for (std::size_t j = 0; j < t.locations.size(); ++j) {
            if (j) out << ';';
            out << fmt::format("{}", t.position(j));
        }
        out << '\n';
    }
}

void write_occupancy_json(std::ostream& out, const SimRun& run) {
    out << fmt::format("{{\"n\":{},\"k_n\":{},\"b_n\":{},\"seed\":{},\"stream\":{},\"histogram\":[", run.n(),
                       run.k_n(), run.b_n(), run.key().seed, run.key().stream);
    bool first = true;
    for (const auto& [k, count] : run.occupancy_histogram()) {
        out << fmt::format("{}[{},{}]", first ? "" : ",", k, count);
        first = false;
    }
    out << "]}\n";
}

}  // namespace karlin
