#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <vector>

#include "karlin/distributions.hpp"
#include "karlin/interval_set.hpp"
#include "karlin/rng.hpp"

namespace karlin {

using Label = std::uint64_t;

/**
 * Box frequencies p_1 > p_2 > ... of the infinite urn together with the
 * counting function ν((0,x]) = #{ℓ : 1/p_ℓ ≤ x} = x^β L(x).
 *
 * Implementations must be immutable after construction; their draw() is
 * called concurrently from many replicas with distinct rng streams.
 */
class FrequencyModel {
public:
    virtual ~FrequencyModel() = default;

    virtual double beta() const = 0;
    virtual double probability(Label label) const = 0;
    virtual std::uint64_t nu_count(double x) const = 0;
    virtual Label draw(Rng& rng) const = 0;
};

/// p_ℓ = ℓ^{-1/β} / ζ(1/β). ν((0,x]) = ⌊(x/ζ)^β⌋ and L(x) → ζ(1/β)^{-β}.
class ZetaFrequencyModel final : public FrequencyModel {
public:
    explicit ZetaFrequencyModel(double beta);

    double beta() const override { return beta_; }
    double exponent() const { return sampler_.exponent(); }
    double zeta_norm() const { return sampler_.normalizer(); }
    double probability(Label label) const override;
    std::uint64_t nu_count(double x) const override;
    Label draw(Rng& rng) const override { return sampler_(rng); }

private:
    double beta_;
    ZetaSampler sampler_;
};

inline std::uint64_t nu_count(const FrequencyModel& model, double x) { return model.nu_count(x); }

/// b_n = (c_α Γ(1-β) ν((0,n]))^{1/α}, with the exact count standing in for
/// n^β L(n). Falls back to the continuous count (n/p_1^{-1})^β while ν((0,n]) = 0.
double normalization(const FrequencyModel& model, const HeavyTailSpec& spec, std::uint64_t n);

struct Box {
    Label label = 0;
    double mark = 0.0;
    std::uint64_t count = 0;
    std::uint64_t first_index = 0;  // 1-based draw index of the first visit
};

/// One realization of the model. Immutable once built.
class SimRun {
public:
    std::uint64_t n() const noexcept { return n_; }
    StreamKey key() const noexcept { return key_; }
    double b_n() const noexcept { return b_n_; }
    const HeavyTailSpec& spec() const noexcept { return spec_; }

    /// Number of occupied boxes K_n.
    std::size_t k_n() const noexcept { return boxes_.size(); }
    /// Occupied boxes in order of first visit.
    std::span<const Box> boxes() const noexcept { return boxes_; }
    /// Box index (into boxes()) of draw i, 1-based.
    std::uint32_t box_at(std::uint64_t i) const { return draws_.at(i - 1); }
    Label label_at(std::uint64_t i) const { return boxes_[box_at(i)].label; }
    /// X_i = ε_{Y_i}.
    double value_at(std::uint64_t i) const { return boxes_[box_at(i)].mark; }
    std::span<const std::uint32_t> draws() const noexcept { return draws_; }

    /// Number of boxes holding exactly k balls, for every k that occurs.
    std::map<std::uint64_t, std::uint64_t> occupancy_histogram() const;

private:
    friend SimRun simulate(const FrequencyModel&, const HeavyTailSpec&, std::uint64_t, StreamKey,
                           std::uint64_t);
    std::uint64_t n_ = 0;
    StreamKey key_;
    double b_n_ = 0.0;
    HeavyTailSpec spec_;
    std::vector<Box> boxes_;
    std::vector<std::uint32_t> draws_;
};

inline constexpr std::uint64_t kDefaultMaxDraws = 10'000'000;

/**
 * Throws n balls. Draw labels come from stream 2·key.stream, marks from
 * 2·key.stream + 1, so the run is a pure function of (model, spec, n, key).
 * Throws ResourceError when n exceeds max_draws or allocation fails.
 */
SimRun simulate(const FrequencyModel& model, const HeavyTailSpec& spec, std::uint64_t n, StreamKey key,
                std::uint64_t max_draws = kDefaultMaxDraws);

struct TopOrderStat {
    std::size_t rank = 0;  // 1 for the maximum
    double value = 0.0;
    double value_normalized = 0.0;
    Label label = 0;
    std::uint64_t n = 0;
    std::vector<std::uint64_t> locations;  // sorted 1-based draw indices i; positions are i/n

    double position(std::size_t j) const { return static_cast<double>(locations.at(j)) / static_cast<double>(n); }
    bool hits(const IntervalSet& set) const;
};

/// The m largest box marks with their labels and visit locations. Ties go to
/// the smaller label. Returns min(m, K_n) entries.
std::vector<TopOrderStat> top_m(const SimRun& run, std::size_t m);

/// Inclusive 1-based index range {i : i/n ∈ [lo,hi)}; empty when first > last.
struct IndexRange {
    std::uint64_t first = 1;
    std::uint64_t last = 0;
    bool empty() const noexcept { return first > last; }
};
IndexRange index_range(std::uint64_t n, const Interval& interval);

struct SupValue {
    double raw = 0.0;
    double normalized = 0.0;
};

/// M_n(A) = max_{i/n ∈ A} X_i, 0 on an empty index set.
SupValue empirical_sup(const SimRun& run, const IntervalSet& set);

/// Sup of X*_i = ε_{Y_i} 1{first visit of Y_i at i} over i/n ∈ A.
SupValue variant_star_sup(const SimRun& run, const IntervalSet& set);

/// Per-box hit signature over the family: bit k set iff the box is visited at
/// some i with i/n ∈ family[k]. Throws CapacityError beyond kMaxFamily sets.
std::vector<std::uint32_t> box_signatures(const SimRun& run, std::span<const IntervalSet> family);

/// counts[mask] = number of boxes whose signature equals mask, for all 2^d masks.
std::vector<std::uint64_t> pattern_histogram(const SimRun& run, std::span<const IntervalSet> family);

/// τ^δ_A(n): boxes visited in every A_k with δ_k = 1 and in no A_k with δ_k = 0.
std::uint64_t pattern_counts(const SimRun& run, std::span<const IntervalSet> family, std::span<const int> delta);

/// delta as a bitmask; throws DomainError for the zero vector or non-0/1 entries.
std::uint32_t delta_mask(std::span<const int> delta);

// CSV columns: rank,value,value_normalized,label,locations
void write_top_m_csv(std::ostream& out, std::span<const TopOrderStat> stats);
// {"n":..,"k_n":..,"b_n":..,"seed":..,"stream":..,"histogram":[[k,count],...]}
void write_occupancy_json(std::ostream& out, const SimRun& run);

}  // namespace karlin
