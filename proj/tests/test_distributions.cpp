#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "karlin/distributions.hpp"
#include "karlin/error.hpp"
#include "karlin/verify.hpp"
#include "oracles.hpp"

using namespace karlin;

TEST_CASE("gamma function") {
    CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gamma_fn(0.5) == doctest::Approx(1.7724538509055160).epsilon(1e-13));
    CHECK(gamma_fn(1.5) == doctest::Approx(0.8862269254527580).epsilon(1e-13));
    for (double x = 0.05; x < 30.0; x *= 1.37) {
        CHECK(gamma_fn(x) == doctest::Approx(std::tgamma(x)).epsilon(1e-12));
        CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
    }
    CHECK(log_gamma(1e6) == doctest::Approx(std::lgamma(1e6)).epsilon(1e-14));
    CHECK(log_gamma_ratio(1e12, 0.5) == doctest::Approx(0.5 * std::log(1e12)).epsilon(1e-12));
    CHECK_THROWS_AS(gamma_fn(0.0), DomainError);
    CHECK_THROWS_AS(gamma_fn(-1.0), DomainError);
}

TEST_CASE("riemann zeta against a series oracle") {
    CHECK(riemann_zeta(2.0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6).epsilon(1e-13));
    for (double s : {1.1, 1.5, 2.5, 3.3, 5.0, 10.0})
        CHECK(riemann_zeta(s) == doctest::Approx(oracle::zeta_series(s)).epsilon(1e-10));
    CHECK(zeta_tail(2.0, 1) == doctest::Approx(riemann_zeta(2.0)).epsilon(1e-14));
    CHECK(zeta_tail(2.0, 3) == doctest::Approx(riemann_zeta(2.0) - 1.25).epsilon(1e-13));
    CHECK_THROWS_AS(riemann_zeta(1.0), DomainError);
}

TEST_CASE("pareto marks") {
    const HeavyTailSpec a1{1.0, 1.0, MarkLaw::pareto}, a2{2.0, 1.0, MarkLaw::pareto};
    CHECK(pareto_quantile(0.5, a1) == doctest::Approx(2.0));
    CHECK(pareto_quantile(0.25, a2) == doctest::Approx(2.0));
    Rng rng(11, 0);
    const int n = 1'000'000;
    int above = 0;
    for (int i = 0; i < n; ++i) above += pareto_sample(rng, a1) > 10.0;
    CHECK(std::abs(above / double(n) - 0.1) <= 3 * std::sqrt(0.09 / n));
    CHECK_THROWS_AS((HeavyTailSpec{0.0, 1.0}.validate()), DomainError);
    CHECK_THROWS_AS((HeavyTailSpec{1.0, -1.0}.validate()), DomainError);
}

TEST_CASE("frechet law") {
    const FrechetLaw unit{1.0, 1.0};
    CHECK(frechet_cdf(1.0, unit) == doctest::Approx(0.3678794412).epsilon(1e-10));
    CHECK(frechet_cdf(1e300, unit) == doctest::Approx(1.0));
    CHECK(frechet_cdf(0.0, unit) == 0.0);
    CHECK(frechet_cdf(-3.0, unit) == 0.0);
    CHECK(frechet_quantile(0.5, unit) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-14));
    for (double alpha : {0.5, 1.0, 2.3})
        for (double z = 0.1; z < 50.0; z *= 1.5) {
            const FrechetLaw law{alpha, 0.7};
            CHECK(std::abs(frechet_quantile(frechet_cdf(z, law), law) - z) <= 1e-12 * std::max(1.0, z) * 10);
        }
}

TEST_CASE("q_beta pmf and tail") {
    for (double beta : {0.1, 0.5, 0.9}) CHECK(qbeta_pmf(1, beta) == doctest::Approx(beta).epsilon(1e-14));
    CHECK(qbeta_pmf(2, 0.5) == doctest::Approx(0.125).epsilon(1e-14));
    CHECK(qbeta_pmf(3, 0.5) == doctest::Approx(0.0625).epsilon(1e-14));
    CHECK(qbeta_tail(0, 0.5) == 1.0);
    CHECK(qbeta_tail(1, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(qbeta_tail(2, 0.5) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK_THROWS_AS(qbeta_pmf(0, 0.5), DomainError);
    CHECK_THROWS_AS(qbeta_pmf(1, 1.0), DomainError);

    for (int b = 1; b <= 9; ++b) {
        const double beta = b / 10.0;
        const auto rec = oracle::qbeta_tail_recurrence(beta, 10000);
        double worst_rec = 0.0, worst_tel = 0.0;
        for (std::size_t k = 1; k <= 10000; ++k) {
            worst_rec = std::max(worst_rec, std::abs(qbeta_tail(double(k), beta) - rec[k]));
            worst_tel = std::max(worst_tel, std::abs(qbeta_tail(double(k - 1), beta) - qbeta_tail(double(k), beta) -
                                                     qbeta_pmf(std::int64_t(k), beta)));
        }
        CHECK(worst_rec <= 1e-10);
        CHECK(worst_tel <= 1e-12);
    }
    // asymptotic tail k^{-β}/Γ(1-β) far beyond the recurrence range
    CHECK(qbeta_tail(1e15, 0.3) == doctest::Approx(std::pow(1e15, -0.3) / std::tgamma(0.7)).epsilon(1e-9));
}

TEST_CASE("q_beta generating identity E(1-z)^Q = 1 - z^beta") {
    for (int b = 1; b <= 9; b += 2) {
        const double beta = b / 10.0;
        for (int zi = 1; zi <= 9; ++zi) {
            const double z = zi / 10.0;
            double sum = 0.0, tail = 1.0, power = 1.0;
            std::int64_t k = 0;
            do {
                ++k;
                power *= 1.0 - z;
                sum += power * qbeta_pmf(k, beta);
                tail = qbeta_tail(double(k), beta);
            } while (power * (1.0 - z) * tail > 1e-12);
            const double bound = power * (1.0 - z) * tail;
            CHECK(sum <= 1.0 - std::pow(z, beta) + 1e-8);
            CHECK(sum + bound >= 1.0 - std::pow(z, beta) - 1e-8);
        }
    }
}

TEST_CASE("q_beta quantile and sampler") {
    CHECK(qbeta_quantile(0.9, 0.5) == 1.0);
    CHECK(qbeta_quantile(0.4, 0.5) == 2.0);
    CHECK(qbeta_quantile(0.375, 0.5) == 3.0);  // T(2) = 0.375 is not < 0.375
    CHECK(qbeta_quantile(1e-300, 0.1) == std::numeric_limits<double>::infinity());
    const double huge = qbeta_quantile(1e-30, 0.2);
    CHECK(huge > 1e100);
    CHECK(qbeta_tail(huge, 0.2) < 1e-30);
    CHECK(qbeta_tail(huge - 1.0, 0.2) >= 1e-30 * (1 - 1e-9));

    Rng rng(5, 1);
    const int n = 1'000'000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += qbeta_sample(rng, 0.5) == 1.0;
    CHECK(std::abs(ones / double(n) - 0.5) <= 3 * std::sqrt(0.25 / n));
}

TEST_CASE("zeta samplers are exact") {
    CHECK_THROWS_AS(ZetaSampler(1.0), DomainError);
    Rng probe(1, 1);
    CHECK_THROWS_AS(zeta_sample(probe, 0.9), DomainError);
    for (double s : {2.0, 1.4, 3.5}) {
        const ZetaSampler table(s);
        const double z = riemann_zeta(s);
        CHECK(table.normalizer() == doctest::Approx(z).epsilon(1e-13));
        for (int which = 0; which < 2; ++which) {
            Rng rng(21, static_cast<std::uint64_t>(which));
            const std::size_t cells = 50;
            std::vector<std::uint64_t> count(cells + 1, 0);
            const int n = 1'000'000;
            for (int i = 0; i < n; ++i) {
                const auto y = which == 0 ? zeta_sample(rng, s) : table(rng);
                REQUIRE(y >= 1);
                count[std::min<std::uint64_t>(y, cells + 1) - 1]++;
            }
            std::vector<double> p(cells + 1);
            double head = 0.0;
            for (std::size_t l = 1; l <= cells; ++l) head += p[l - 1] = std::pow(double(l), -s) / z;
            p[cells] = 1.0 - head;
            const auto chi = chi_square_test(count, p, 0.99);
            CAPTURE(s);
            CAPTURE(which);
            CHECK(chi.pass());
        }
    }
    Rng rng(3, 3);
    const int n = 1'000'000;
    int ones = 0;
    for (int i = 0; i < n; ++i) ones += zeta_sample(rng, 2.0) == 1;
    const double p1 = 6.0 / (std::numbers::pi * std::numbers::pi);
    CHECK(std::abs(ones / double(n) - p1) <= 3 * std::sqrt(p1 * (1 - p1) / n));
    // the tail sampler respects its lower bound and relative weights
    Rng t(4, 4);
    int first = 0;
    for (int i = 0; i < 200000; ++i) {
        const auto y = zeta_tail_sample(t, 2.0, 100);
        REQUIRE(y >= 100);
        first += y == 100;
    }
    const double p100 = 1e-4 / zeta_tail(2.0, 100);
    CHECK(std::abs(first / 200000.0 - p100) <= 4 * std::sqrt(p100 * (1 - p100) / 200000.0));
}
