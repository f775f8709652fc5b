#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "karlin/interval_set.hpp"
#include "karlin/rng.hpp"

namespace karlin {

/// Bit j set iff atom j is hit.
using HitPattern = std::uint32_t;

inline constexpr std::uint64_t kDefaultAtomCap = 1'000'000;
inline constexpr double kMaxEnumeratedPoints = 1e8;

/// Void/hit pattern of `count` i.i.d. uniform points over disjoint atoms of
/// measures mu (Σ mu ≤ 1), drawn exactly by inclusion–exclusion over the
/// 2^m void sets without placing the points. count may be huge or +inf.
HitPattern sample_hits_given_count(Rng& rng, double count, std::span<const double> mu);

/// R^(β) = {U_1..U_Q}, Q ~ Q_β: hit pattern over the atoms. Throws
/// CapacityError for more than 20 atoms, DomainError on invalid measures.
HitPattern sample_rbeta_hits(Rng& rng, double beta, std::span<const double> mu);

/// The same law by explicit point enumeration; CapacityError when Q exceeds
/// kMaxEnumeratedPoints. For cross-checking only.
HitPattern sample_rbeta_hits_enumerated(Rng& rng, double beta, std::span<const double> mu);

struct LimitSample {
    std::vector<double> values;    // M(A_i) per query set
    std::uint64_t atoms_used = 0;  // Poisson atoms generated before the stopping rule fired
};

/**
 * Exact joint sampler of M_{α,β} over a fixed family on [0,1]:
 * M(·) = sup_ℓ Γ_ℓ^{-1/α} 1{R_ℓ ∩ · ≠ ∅}. Atoms arrive with decreasing
 * values, so the first atom hitting a set fixes its value and the series
 * stops once every set is hit. Sets of measure zero are answered 0.
 *
 * The family is atomized once at construction.
 */
class KarlinSampler {
public:
    KarlinSampler(double alpha, double beta, std::vector<IntervalSet> family,
                  std::uint64_t atom_cap = kDefaultAtomCap);

    LimitSample operator()(Rng& rng) const;

    std::size_t size() const noexcept { return family_.size(); }
    const std::vector<IntervalSet>& family() const noexcept { return family_; }
    std::span<const double> atom_measures() const noexcept { return mu_; }
    std::uint32_t atom_mask(std::size_t set) const { return set_masks_.at(set); }

private:
    double alpha_;
    double beta_;
    std::uint64_t atom_cap_;
    double scale_ = 1.0;  // T^{β/α} for windows [0,T]
    std::vector<IntervalSet> family_;
    std::vector<double> mu_;
    std::vector<std::uint32_t> set_masks_;
};

/// One exact draw for a family on [0,1] (serial convenience over KarlinSampler).
LimitSample sample_karlin(Rng& rng, double alpha, double beta, std::span<const IntervalSet> family,
                          std::uint64_t atom_cap = kDefaultAtomCap);

/// Family on a window [0,T]: samples the family scaled by 1/T and multiplies by
/// T^{β/α} (self-similarity).
LimitSample sample_on_window(Rng& rng, double alpha, double beta, std::span<const IntervalSet> family,
                             std::uint64_t atom_cap = kDefaultAtomCap);

/// M*_{α,β} on [0,1] (or a window): each atom's random set is the minimum of
/// its Q_β uniforms, drawn as 1 - (1-U)^{1/Q}.
LimitSample sample_mstar(Rng& rng, double alpha, double beta, std::span<const IntervalSet> family,
                         std::uint64_t atom_cap = kDefaultAtomCap);

/// M and M* built from one point process: the minimum point is drawn first and
/// the remaining Q-1 points are placed on [min, 1). Hence M(A) ≥ M*(A) surely.
struct CoupledSample {
    LimitSample karlin;
    LimitSample star;
};
CoupledSample sample_coupled(Rng& rng, double alpha, double beta, std::span<const IntervalSet> family,
                             std::uint64_t atom_cap = kDefaultAtomCap);

struct LimitAtom {
    double gamma = 0.0;     // Γ_ℓ
    double value = 0.0;     // Γ_ℓ^{-1/α}
    double q = 0.0;         // Q_β draw
    HitPattern hits = 0;    // bit i set iff R_ℓ meets query set i
};

/// The first m atoms of the limit point process with their hit patterns over
/// the family's sets (on [0,1]).
std::vector<LimitAtom> sample_top_m_process(Rng& rng, double alpha, double beta, std::size_t m,
                                            std::span<const IntervalSet> family);

// CSV columns: replica,set_id,value,atoms_used
void write_limit_csv(std::ostream& out, std::span<const LimitSample> samples);

}  // namespace karlin
