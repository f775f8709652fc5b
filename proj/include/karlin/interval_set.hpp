#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace karlin {

/// Half-open interval [lo, hi).
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return lo <= x && x < hi; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// The ambient interval a set lives in: [0,1], [0,T] or the whole line.
struct Carrier {
    double lo = 0.0;
    double hi = 1.0;

    static Carrier unit() noexcept { return {0.0, 1.0}; }
    static Carrier window(double t) noexcept { return {0.0, t}; }
    static Carrier line() noexcept {
        return {-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    friend bool operator==(const Carrier&, const Carrier&) = default;
};

/**
 * A finite union of disjoint half-open intervals in canonical form: pairs are
 * nonempty, sorted by lo, and neither overlap nor touch. The canonical form is
 * unique, so equality is structural.
 */
class IntervalSet {
public:
    IntervalSet() = default;
    explicit IntervalSet(Carrier carrier) : carrier_(carrier) {}

    /// Canonicalizes arbitrary pairs: drops empty ones (lo >= hi), sorts,
    /// merges overlapping and adjacent ones. Throws DomainError on NaN
    /// endpoints or on pairs leaving the carrier.
    static IntervalSet normalize(std::vector<Interval> raw, Carrier carrier = Carrier::unit());
    static IntervalSet single(double lo, double hi, Carrier carrier = Carrier::unit()) {
        return normalize({{lo, hi}}, carrier);
    }

    std::span<const Interval> intervals() const noexcept { return intervals_; }
    const Carrier& carrier() const noexcept { return carrier_; }
    bool empty() const noexcept { return intervals_.empty(); }
    std::size_t size() const noexcept { return intervals_.size(); }

    double lebesgue() const noexcept;
    bool contains(double x) const noexcept;
    bool is_subset_of(const IntervalSet& other) const;

    /// Image under x -> factor * x (factor > 0), carrier included.
    IntervalSet scaled(double factor) const;
    /// Same intervals declared on a different (enclosing) carrier.
    IntervalSet with_carrier(Carrier carrier) const;

    friend bool operator==(const IntervalSet&, const IntervalSet&) = default;

private:
    Carrier carrier_ = Carrier::unit();
    std::vector<Interval> intervals_;
};

/// Throws DomainError when the carriers differ.
IntervalSet set_union(const IntervalSet& a, const IntervalSet& b);
IntervalSet set_intersection(const IntervalSet& a, const IntervalSet& b);
IntervalSet set_difference(const IntervalSet& a, const IntervalSet& b);
IntervalSet union_all(std::span<const IntervalSet> family);

inline double lebesgue(const IntervalSet& a) noexcept { return a.lebesgue(); }

/// Maximum family size accepted by atomize and the pattern enumerators.
inline constexpr std::size_t kMaxFamily = 20;

/**
 * The Venn decomposition of a family: atoms are the nonempty regions sharing
 * one membership signature, ordered by their leftmost point.
 */
struct AtomDecomposition {
    std::vector<IntervalSet> atoms;
    /// signature[j]: bit i set iff atom j lies inside input i.
    std::vector<std::uint32_t> signature;
    /// membership[i]: indices of the atoms composing input i.
    std::vector<std::vector<std::size_t>> membership;

    /// Bitmask over atoms composing input i.
    std::uint32_t atom_mask(std::size_t input) const;
    std::vector<double> measures() const;
};

/// Throws CapacityError for more than kMaxFamily inputs, DomainError on
/// mixed carriers.
AtomDecomposition atomize(std::span<const IntervalSet> family);

// JSON: {"carrier":[lo,hi],"intervals":[[lo,hi],...]}; carrier defaults to
// [0,1]; null carrier endpoints mean ±infinity.
void to_json(nlohmann::json& j, const IntervalSet& set);
void from_json(const nlohmann::json& j, IntervalSet& set);

}  // namespace karlin
