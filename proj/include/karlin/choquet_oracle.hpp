#pragma once

#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "karlin/interval_set.hpp"

namespace karlin {

/// Joint threshold query over M_{α,β}: P(M(A_i) ≤ z_i, i = 1..d).
struct ChoquetQuery {
    struct Term {
        IntervalSet set;
        double z = 1.0;
    };
    std::vector<Term> terms;
    double alpha = 1.0;
    double beta = 0.5;

    /// Throws DomainError for invalid α, β or non-positive/non-finite z.
    void validate() const;
};

/// Pattern query δ ∈ {0,1}^d \ {0} over a family.
struct PatternQuery {
    std::vector<IntervalSet> family;
    std::vector<int> delta;
};

/// θ_β(K) = Leb(K)^β with 0^β = 0.
double theta(const IntervalSet& k, double beta);

/// ℓ = ∫ (⋁ z_i^{-α} 1_{A_i}) dθ_β evaluated by the layer-cake sum over the
/// weights sorted in decreasing order.
double tail_dependence(const ChoquetQuery& q);

/// exp(-tail_dependence(q)).
double joint_cdf(const ChoquetQuery& q);

/// P(M([0,t_k]) ≤ x_k, k = 1..d) for increasing positive times; weights x^{-α}.
double extremal_cdf(std::span<const double> times, std::span<const double> levels, double alpha, double beta);

/// τ_z(t) = log P(ζ(0) ≤ z, ζ(t) ≤ z) - 2 log P(ζ(0) ≤ z) for the max-increment
/// process ζ(t) = M((t-1, t]).
double tau_z(double t, double z, double alpha, double beta);

/// Limit of τ^δ_A(n) / ν((0,n]):
/// Γ(1-β) Σ_{S ⊆ H} (-1)^{|S|+1} Leb(∪_{k ∈ S∪M} A_k)^β, H = {δ_k = 1}, M = {δ_k = 0}.
double pattern_limit(const PatternQuery& p, double beta);

/// Extremal coefficient of M* on [a,b): b^β - a^β.
double mstar_theta(double a, double b, double beta);

// {"alpha":..,"beta":..,"terms":[{"set":{...},"z":..},...]}
void to_json(nlohmann::json& j, const ChoquetQuery& q);
void from_json(const nlohmann::json& j, ChoquetQuery& q);

}  // namespace karlin
