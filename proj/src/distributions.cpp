#include "karlin/distributions.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "karlin/error.hpp"

namespace karlin {

namespace {

constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
constexpr double kLanczosG = 7.0;
constexpr double kStirlingCutoff = 15.0;

// Stirling correction log Γ(x) - [(x-1/2) log x - x + log(2π)/2].
double stirling_series(double x) {
    const double r = 1.0 / x;
    const double r2 = r * r;
    return r * (1.0 / 12 + r2 * (-1.0 / 360 + r2 * (1.0 / 1260 + r2 * (-1.0 / 1680 + r2 / 1188))));
}

void check_beta(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1), got " + std::to_string(beta));
}

}  // namespace

double gamma_fn(double x) {
    if (!(x > 0.0)) throw DomainError("gamma_fn: argument must be positive, got " + std::to_string(x));
    if (x < 0.5) return std::numbers::pi / (std::sin(std::numbers::pi * x) * gamma_fn(1.0 - x));
    const double y = x - 1.0;
    double acc = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) acc += kLanczos[i] / (y + static_cast<double>(i));
    const double t = y + kLanczosG + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, y + 0.5) * std::exp(-t) * acc;
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
    if (x < kStirlingCutoff) return std::log(gamma_fn(x));
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * std::numbers::pi) + stirling_series(x);
}

double log_gamma_ratio(double x, double a) {
    const double y = x + a;
    if (!(x > 0.0) || !(y > 0.0)) throw DomainError("log_gamma_ratio: arguments must be positive");
    if (x >= kStirlingCutoff && y >= kStirlingCutoff) {
        return (x - 0.5) * std::log1p(a / x) + a * std::log(y) - a + (stirling_series(y) - stirling_series(x));
    }
    return log_gamma(y) - log_gamma(x);
}

double zeta_tail(double s, std::uint64_t first) {
    if (!(s > 1.0)) throw DomainError("zeta: exponent must exceed 1, got " + std::to_string(s));
    if (first == 0) throw DomainError("zeta_tail: first index must be >= 1");
    constexpr std::uint64_t kDirect = 16;
    const std::uint64_t m = first < kDirect ? kDirect : first;
    const double md = static_cast<double>(m);

    // Euler–Maclaurin remainder Σ_{k ≥ m} k^{-s}.
    static constexpr std::array<double, 6> kBernoulliOverFactorial = {
        1.0 / 12, -1.0 / 720, 1.0 / 30240, -1.0 / 1209600, 1.0 / 47900160, -691.0 / 1307674368000.0};
    double tail = std::pow(md, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(md, -s);
    double rising = s;                 // s (s+1) ... (s+2j-2)
    double power = std::pow(md, -s - 1.0);
    for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
        tail += kBernoulliOverFactorial[j] * rising * power;
        rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
        power /= md * md;
    }
    for (std::uint64_t k = m; k-- > first;) tail += std::pow(static_cast<double>(k), -s);
    return tail;
}

double riemann_zeta(double s) { return zeta_tail(s, 1); }

// ---------------------------------------------------------------------------

void HeavyTailSpec::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be positive");
    if (!(c_alpha > 0.0) || !std::isfinite(c_alpha)) throw DomainError("c_alpha must be positive");
}

double pareto_quantile(double u, const HeavyTailSpec& spec) {
    return std::pow(spec.c_alpha / u, 1.0 / spec.alpha);
}

double pareto_sample(Rng& rng, const HeavyTailSpec& spec) { return pareto_quantile(uniform_open(rng), spec); }

double mark_sample(Rng& rng, const HeavyTailSpec& spec) {
    const double u = uniform_open(rng);
    if (spec.law == MarkLaw::frechet) return frechet_quantile(u, FrechetLaw{spec.alpha, spec.c_alpha});
    return pareto_quantile(u, spec);
}

double frechet_cdf(double z, const FrechetLaw& law) {
    if (!(z > 0.0)) return 0.0;
    return std::exp(-law.sigma * std::pow(z, -law.alpha));
}

double frechet_quantile(double p, const FrechetLaw& law) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("frechet_quantile: probability outside [0,1]");
    if (p == 0.0) return 0.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return std::pow(law.sigma / -std::log(p), 1.0 / law.alpha);
}

double frechet_sample(Rng& rng, const FrechetLaw& law) { return frechet_quantile(uniform_open(rng), law); }

// ---------------------------------------------------------------------------

double log_qbeta_pmf(std::int64_t k, double beta) {
    check_beta(beta);
    if (k <= 0) throw DomainError("qbeta_pmf: k must be >= 1");
    const double kd = static_cast<double>(k);
    return std::log(beta) + log_gamma_ratio(kd + 1.0, -1.0 - beta) - log_gamma(1.0 - beta);
}

double qbeta_pmf(std::int64_t k, double beta) { return std::exp(log_qbeta_pmf(k, beta)); }

double log_qbeta_tail(double k, double beta) {
    check_beta(beta);
    if (!(k >= 0.0)) throw DomainError("qbeta_tail: k must be >= 0");
    if (k == 0.0) return 0.0;
    if (std::isinf(k)) return -std::numeric_limits<double>::infinity();
    return log_gamma_ratio(k + 1.0, -beta) - log_gamma(1.0 - beta);
}

double qbeta_tail(double k, double beta) { return std::exp(log_qbeta_tail(k, beta)); }

double qbeta_quantile(double u, double beta) {
    check_beta(beta);
    if (!(u > 0.0 && u < 1.0)) throw DomainError("qbeta_quantile: u must lie in (0,1)");
    const double log_u = std::log(u);
    if (log_qbeta_tail(1.0, beta) < log_u) return 1.0;
    double lo = 1.0;
    double hi = 2.0;
    while (log_qbeta_tail(hi, beta) >= log_u) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return std::numeric_limits<double>::infinity();
    }
    // invariant: T(lo) >= u > T(hi)
    while (hi - lo > 1.0) {
        const double mid = std::floor(lo + 0.5 * (hi - lo));
        if (mid <= lo || mid >= hi) break;
        if (log_qbeta_tail(mid, beta) < log_u)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double qbeta_sample(Rng& rng, double beta) { return qbeta_quantile(uniform_open(rng), beta); }

// ---------------------------------------------------------------------------

namespace {

constexpr double kTwoPow64 = 18446744073709551616.0;

// k^{-s} / (k^{1-s} - (k+1)^{1-s}): target-to-envelope ratio, decreasing in k.
inline double envelope_ratio(double k, double s) {
    return 1.0 / (k * -std::expm1((1.0 - s) * std::log1p(1.0 / k)));
}

}  // namespace

std::uint64_t zeta_tail_sample(Rng& rng, double s, std::uint64_t first) {
    const double e = s - 1.0;
    const double start = static_cast<double>(first);
    const double r_first = envelope_ratio(start, s);
    const double log_start = std::log(start);
    const double log_overflow = std::log(kTwoPow64);
    for (;;) {
        const double u = uniform_open(rng);
        const double v = uniform_open(rng);
        const double log_y = log_start - std::log(u) / e;
        if (log_y >= log_overflow) {
            // every k >= 2^64 has ratio 1/(s-1) to double precision
            if (v * r_first <= 1.0 / e) return kOverflowLabel;
            continue;
        }
        const double k = std::floor(std::exp(log_y));
        if (k >= kTwoPow64) {
            if (v * r_first <= 1.0 / e) return kOverflowLabel;
            continue;
        }
        const double kk = k < start ? start : k;
        if (v * r_first <= envelope_ratio(kk, s)) return static_cast<std::uint64_t>(kk);
    }
}

std::uint64_t zeta_sample(Rng& rng, double s) {
    if (!(s > 1.0)) throw DomainError("zeta_sample: exponent must exceed 1, got " + std::to_string(s));
    return zeta_tail_sample(rng, s, 1);
}

ZetaSampler::ZetaSampler(double s, std::uint32_t head) : s_(s), zeta_(riemann_zeta(s)), head_(head) {
    if (head == 0) throw DomainError("ZetaSampler: head must be positive");
    const std::size_t cells = static_cast<std::size_t>(head) + 1;
    std::vector<double> scaled(cells);
    tail_mass_ = zeta_tail(s, static_cast<std::uint64_t>(head) + 1) / zeta_;
    for (std::uint32_t l = 1; l <= head; ++l)
        scaled[l - 1] = std::pow(static_cast<double>(l), -s) / zeta_ * static_cast<double>(cells);
    scaled[head] = tail_mass_ * static_cast<double>(cells);

    // Vose's alias construction.
    accept_.assign(cells, 1.0);
    alias_.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) alias_[i] = static_cast<std::uint32_t>(i);
    std::vector<std::uint32_t> small, large;
    for (std::size_t i = 0; i < cells; ++i)
        (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
    while (!small.empty() && !large.empty()) {
        const std::uint32_t lo = small.back();
        small.pop_back();
        const std::uint32_t hi = large.back();
        accept_[lo] = scaled[lo];
        alias_[lo] = hi;
        scaled[hi] = (scaled[hi] + scaled[lo]) - 1.0;
        if (scaled[hi] < 1.0) {
            large.pop_back();
            small.push_back(hi);
        }
    }
    for (auto i : large) accept_[i] = 1.0;
    for (auto i : small) accept_[i] = 1.0;
}

std::uint64_t ZetaSampler::operator()(Rng& rng) const {
    const std::uint64_t r = rng();
    const unsigned __int128 product = static_cast<unsigned __int128>(r) * (static_cast<std::uint64_t>(head_) + 1);
    const auto cell = static_cast<std::uint32_t>(product >> 64);
    const double coin = static_cast<double>(static_cast<std::uint64_t>(product)) * 0x1p-64;
    const std::uint32_t pick = coin < accept_[cell] ? cell : alias_[cell];
    if (pick == head_) return zeta_tail_sample(rng, s_, static_cast<std::uint64_t>(head_) + 1);
    return static_cast<std::uint64_t>(pick) + 1;
}

}  // namespace karlin
