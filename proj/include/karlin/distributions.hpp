#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "karlin/rng.hpp"

namespace karlin {

// ---------------------------------------------------------------------------
// Special functions
// ---------------------------------------------------------------------------

/// Gamma function for x > 0 (Lanczos, g = 7). Relative error below 1e-13.
/// Overflows to +inf above x ~ 171.6; use log_gamma there.
double gamma_fn(double x);

/// log Γ(x) for x > 0.
double log_gamma(double x);

/// log(Γ(x + a) / Γ(x)) for x > 0, x + a > 0, accurate for huge x.
double log_gamma_ratio(double x, double a);

/// Riemann zeta ζ(s), s > 1, by Euler–Maclaurin summation.
double riemann_zeta(double s);

/// Σ_{k ≥ first} k^{-s} (Hurwitz tail), s > 1, first ≥ 1.
double zeta_tail(double s, std::uint64_t first);

// ---------------------------------------------------------------------------
// Mark laws
// ---------------------------------------------------------------------------

enum class MarkLaw {
    pareto,   ///< P(ε > y) = y^{-α} on [1, ∞)
    frechet,  ///< P(ε ≤ y) = exp(-y^{-α}); same tail constant
};

/// Heavy-tailed box marks with P(ε > y) ~ c_α y^{-α}.
struct HeavyTailSpec {
    double alpha = 1.0;
    double c_alpha = 1.0;
    MarkLaw law = MarkLaw::pareto;

    /// Throws DomainError unless alpha > 0 and c_alpha > 0.
    void validate() const;
};

/// Inverse-CDF Pareto draw: u^{-1/α}.
double pareto_quantile(double u, const HeavyTailSpec& spec);
double pareto_sample(Rng& rng, const HeavyTailSpec& spec);

/// Draw a mark according to spec.law.
double mark_sample(Rng& rng, const HeavyTailSpec& spec);

/// α-Fréchet law with scale σ: F(z) = exp(-σ z^{-α}).
struct FrechetLaw {
    double alpha = 1.0;
    double sigma = 1.0;
};

/// exp(-σ z^{-α}); returns 0 for z ≤ 0.
double frechet_cdf(double z, const FrechetLaw& law);
/// Exact inverse of frechet_cdf on (0,1).
double frechet_quantile(double p, const FrechetLaw& law);
double frechet_sample(Rng& rng, const FrechetLaw& law);

// ---------------------------------------------------------------------------
// Q_β: p(k) = β (1-β)_{(k-1)↑} / k!, k ≥ 1
// ---------------------------------------------------------------------------

double qbeta_pmf(std::int64_t k, double beta);
double log_qbeta_pmf(std::int64_t k, double beta);

/// P(Q_β > k) = Γ(k+1-β) / (Γ(1-β) Γ(k+1)). Accepts real k ≥ 0 for huge counts.
double qbeta_tail(double k, double beta);
double log_qbeta_tail(double k, double beta);

/// Smallest integer k ≥ 1 with P(Q_β > k) < u. Exponential then binary search
/// over the closed-form tail; never walks the support.
///
/// Q_β has infinite mean and, for small β, draws can exceed 2^64, so the result
/// is an integer-valued double. Returns +inf when the answer exceeds ~1e300.
double qbeta_quantile(double u, double beta);
double qbeta_sample(Rng& rng, double beta);

// ---------------------------------------------------------------------------
// Zeta (Zipf) law: P(Y = ℓ) = ℓ^{-s} / ζ(s)
// ---------------------------------------------------------------------------

/// Returned by the zeta samplers for draws at or above 2^64. Reachable only for
/// s < 2 and with probability below ~2^{-64(s-1)}.
inline constexpr std::uint64_t kOverflowLabel = std::numeric_limits<std::uint64_t>::max();

/// Exact zeta draw by rejection from a discretized Pareto envelope
/// (Devroye 1986, X.6). Expected number of proposals is
/// 2^{s-1} / ((2^{s-1} - 1) ζ(s)), e.g. 1.216 at s = 2.
std::uint64_t zeta_sample(Rng& rng, double s);

/// Table-accelerated exact zeta sampler: Walker alias table over labels
/// 1..head plus one "tail" cell, the tail resolved by the same Pareto-envelope
/// rejection started at head + 1. One 64-bit draw covers ~all head draws.
class ZetaSampler {
public:
    explicit ZetaSampler(double s, std::uint32_t head = 4096);

    std::uint64_t operator()(Rng& rng) const;

    double exponent() const noexcept { return s_; }
    std::uint32_t head() const noexcept { return head_; }
    double normalizer() const noexcept { return zeta_; }
    double tail_mass() const noexcept { return tail_mass_; }

private:
    double s_;
    double zeta_;
    std::uint32_t head_;
    double tail_mass_;
    std::vector<double> accept_;          // alias acceptance thresholds, cells 0..head
    std::vector<std::uint32_t> alias_;
};

/// Labels ≥ first drawn with P(Y = ℓ) ∝ ℓ^{-s}. Exposed for testing.
std::uint64_t zeta_tail_sample(Rng& rng, double s, std::uint64_t first);

}  // namespace karlin
