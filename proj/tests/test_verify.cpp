#include <doctest.h>

#include <cmath>
#include <sstream>

#include "karlin/distributions.hpp"
#include "karlin/error.hpp"
#include "karlin/verify.hpp"

using namespace karlin;

TEST_CASE("wilson interval") {
    const auto [lo, hi] = wilson_ci(500, 1000, 0.95);
    CHECK(lo == doctest::Approx(0.4690).epsilon(1e-3));
    CHECK(hi == doctest::Approx(0.5310).epsilon(1e-3));
    CHECK(wilson_ci(10, 10, 0.99).second == 1.0);
    CHECK(wilson_ci(0, 10, 0.99).first == 0.0);
    CHECK_THROWS_AS(wilson_ci(0, 0, 0.99), DomainError);
    CHECK_THROWS_AS(wilson_ci(5, 4, 0.99), DomainError);
    CHECK(normal_quantile_two_sided(0.95) == doctest::Approx(1.959963985).epsilon(1e-9));
}

TEST_CASE("kolmogorov-smirnov") {
    const FrechetLaw law{1.0, 1.0};
    auto cdf = [&](double z) { return frechet_cdf(z, law); };
    const std::size_t n = 10000;
    CHECK(ks_critical(n, 0.99) == doctest::Approx(1.628 / 100.0).epsilon(1e-3));
    int below = 0;
    for (std::uint64_t rep = 0; rep < 100; ++rep) {
        Rng rng(31, rep);
        std::vector<double> v(n);
        for (auto& x : v) x = frechet_sample(rng, law);
        std::sort(v.begin(), v.end());
        below += ks_statistic(v, cdf) < ks_critical(n, 0.99);
    }
    CHECK(below >= 95);

    const std::vector<double> point(100, 1.0);
    CHECK(ks_statistic(point, [](double x) { return std::clamp(x, 0.0, 2.0) / 2.0; }) >= 0.5);
    const std::vector<double> mids{0.125, 0.375, 0.625, 0.875};
    CHECK(ks_statistic(mids, [](double x) { return x; }) == doctest::Approx(0.125));
    const std::vector<double> steps{1, 2, 3, 4};
    CHECK(ks_two_sample(steps, steps) == 0.0);
    CHECK(ks_two_sample(std::vector<double>{1, 2}, std::vector<double>{3, 4}) == 1.0);
    CHECK(ks_two_sample(std::vector<double>{1, 3}, std::vector<double>{2, 4}) == doctest::Approx(0.5));
    CHECK_THROWS_AS(ks_statistic(std::vector<double>{2, 1}, cdf), DomainError);
    CHECK_THROWS_AS(ks_statistic(std::vector<double>{1}, cdf), DomainError);
}

TEST_CASE("chi-square and median") {
    const std::vector<std::uint64_t> fair{250, 250, 250, 250};
    const std::vector<double> p(4, 0.25);
    const auto r = chi_square_test(fair, p, 0.99);
    CHECK(r.statistic == 0.0);
    CHECK(r.dof == 3);
    CHECK(r.critical == doctest::Approx(11.3449).epsilon(1e-4));
    const std::vector<std::uint64_t> skew{400, 200, 200, 200};
    CHECK(chi_square_test(skew, p, 0.99).statistic == doctest::Approx(120.0));
    CHECK_FALSE(chi_square_test(skew, p, 0.99).pass());
    CHECK(median({3, 1, 2}) == 2);
    CHECK(median({4, 1, 3, 2}) == 2.5);
    CHECK_THROWS_AS(median({}), DomainError);
}

TEST_CASE("row rules") {
    CHECK(row_within("a", 1.0, 1.1, 0.2).pass);
    CHECK_FALSE(row_within("a", 1.0, 1.5, 0.2).pass);
    CHECK(row_outside("a", 1.0, 1.5, 0.2).pass);
    CHECK(row_at_most("a", 0.02, 0.05).pass);
    CHECK_FALSE(row_at_most("a", 0.06, 0.05).pass);
    CHECK(row_below("a", 0.1, 0.2).pass);
    CHECK_FALSE(row_below("a", 0.2, 0.2).pass);
    CHECK(row_exceeds("a", 0.5, 0.0, 0.1).pass);
    CHECK_FALSE(row_exceeds("a", 0.05, 0.0, 0.1).pass);
    CHECK(row_info("a", 9, 0, 0).pass);
    CHECK(row_wilson("w", 500, 1000, 0.5, 0.95).pass);
    CHECK_FALSE(row_wilson("w", 500, 1000, 0.55, 0.95).pass);
    // the pass flag is a pure function of the stored numbers
    const auto w = row_wilson("w", 480, 1000, 0.5, 0.99);
    CHECK(w.pass == (std::abs(w.estimate - w.target) <= w.se_or_crit));
}

TEST_CASE("report serialization round-trips") {
    SuiteReport r;
    r.suite = "occupancy";
    r.seed = 18446744073709551615ull;
    r.add(row_within("mean[k=1]", 0.1 + 0.2, 1.0 / 3.0, 1e-300), 1000000, 100);
    r.add(row_at_most("ks", 5e-324, 0.05), 7, 200);
    r.add(row_info("big", 1.7976931348623157e308, -0.0, 0), 0, 0);
    std::stringstream csv, js;
    write_csv(csv, r);
    write_json(js, r);
    const auto back_csv = read_csv(csv);
    const auto back_js = read_json(js);
    CHECK(back_csv.rows == r.rows);
    CHECK(back_js.rows == r.rows);
    CHECK(back_csv.seed == r.seed);
    CHECK(back_js.seed == r.seed);
    CHECK(back_js.suite == r.suite);
    std::istringstream bad("nope\n");
    CHECK_THROWS_AS(read_csv(bad), DomainError);
}

TEST_CASE("suite configuration") {
    for (const auto& name : suite_names()) CHECK_NOTHROW(SuiteConfig::defaults(name).validate());
    CHECK_THROWS_AS(SuiteConfig::defaults("nope"), DomainError);
    auto cfg = SuiteConfig::defaults("occupancy");
    cfg.replicas = 99;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = SuiteConfig::defaults("occupancy");
    cfg.confidence = 0.9;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg = SuiteConfig::defaults("occupancy");
    cfg.beta = 1.0;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("suites are deterministic across thread counts") {
    std::vector<SuiteConfig> small;
    auto occ = SuiteConfig::defaults("occupancy");
    occ.n_grid = {20000};
    small.push_back(occ);
    auto pat = SuiteConfig::defaults("patterns");
    pat.n_grid = {20000};
    small.push_back(pat);
    auto marginal = SuiteConfig::defaults("marginal");
    marginal.n_grid = {100, 1000};
    marginal.replicas = 200;
    small.push_back(marginal);
    auto locations = SuiteConfig::defaults("locations");
    locations.n_grid = {2000};
    locations.replicas = 200;
    locations.limit_replicas = 200;
    small.push_back(locations);
    auto lim = SuiteConfig::defaults("limit-oracle");
    lim.limit_replicas = 500;
    lim.random_queries = 3;
    small.push_back(lim);
    auto ext = SuiteConfig::defaults("extremal-mstar");
    ext.n_grid = {2000};
    ext.replicas = 200;
    ext.limit_replicas = 500;
    small.push_back(ext);
    for (auto cfg : small) {
        CAPTURE(cfg.suite);
        std::string first;
        for (unsigned threads : {1u, 3u}) {
            cfg.threads = threads;
            const auto report = run_suite(cfg);
            CHECK(!report.rows.empty());
            std::ostringstream csv, js;
            write_csv(csv, report);
            write_json(js, report);
            if (threads == 1)
                first = csv.str() + js.str();
            else
                CHECK(first == csv.str() + js.str());
        }
    }
}
