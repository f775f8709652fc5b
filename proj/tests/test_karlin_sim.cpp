#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "karlin/error.hpp"
#include "karlin/karlin_sim.hpp"
#include "oracles.hpp"

using namespace karlin;

namespace {
const HeavyTailSpec kUnit{1.0, 1.0, MarkLaw::pareto};
}

TEST_CASE("counting function and normalization") {
    const ZetaFrequencyModel m(0.5);
    CHECK(m.zeta_norm() == doctest::Approx(oracle::zeta_series(2.0)).epsilon(1e-12));
    CHECK(m.nu_count(1e6) == 779);
    CHECK(m.nu_count(1e4) == 77);
    CHECK(m.nu_count(1.5) == 0);
    // ν(x) = #{ℓ : 1/p_ℓ ≤ x} by direct count
    for (double x : {2.0, 10.0, 123.4, 1644.934066848226, 5e4}) {
        std::uint64_t count = 0;
        for (Label l = 1; 1.0 / m.probability(l) <= x; ++l) ++count;
        CHECK(m.nu_count(x) == count);
    }
    CHECK(normalization(m, kUnit, 10000) == doctest::Approx(std::sqrt(std::numbers::pi) * 77).epsilon(1e-12));
    CHECK(normalization(m, HeavyTailSpec{2.0, 1.0}, 10000) == doctest::Approx(11.6823).epsilon(1e-4));
    const auto n1 = static_cast<std::uint64_t>(std::ceil(m.zeta_norm()));
    REQUIRE(m.nu_count(double(n1)) == 1);
    CHECK(normalization(m, HeavyTailSpec{3.0, 2.0}, n1) == doctest::Approx(std::cbrt(2.0 * std::sqrt(std::numbers::pi))));
    CHECK(normalization(m, kUnit, 1) > 0.0);
    double total = 0.0;
    for (Label l = 1; l <= 100000; ++l) total += m.probability(l);
    CHECK(total == doctest::Approx(1.0 - 1.0 / (m.zeta_norm() * 100000.5)).epsilon(1e-9));
    CHECK_THROWS_AS(ZetaFrequencyModel(1.0), DomainError);
}

TEST_CASE("simulate basics") {
    const ZetaFrequencyModel m(0.5);
    const auto one = simulate(m, kUnit, 1, {1, 0});
    CHECK(one.k_n() == 1);
    CHECK(one.boxes()[0].count == 1);
    CHECK(one.boxes()[0].first_index == 1);
    CHECK_THROWS_AS(simulate(m, kUnit, 0, {1, 0}), DomainError);
    CHECK_THROWS_AS(simulate(m, kUnit, 101, {1, 0}, 100), ResourceError);

    const auto run = simulate(m, kUnit, 10000, {5, 2});
    std::uint64_t total = 0;
    std::set<Label> labels;
    for (const auto& b : run.boxes()) {
        total += b.count;
        labels.insert(b.label);
        CHECK(b.mark >= 1.0);
    }
    CHECK(total == run.n());
    CHECK(labels.size() == run.k_n());
    // revisits return the identical mark
    std::map<Label, double> mark_of;
    for (std::uint64_t i = 1; i <= run.n(); ++i) {
        auto [it, fresh] = mark_of.emplace(run.label_at(i), run.value_at(i));
        if (!fresh) REQUIRE(it->second == run.value_at(i));
    }
    const auto again = simulate(m, kUnit, 10000, {5, 2});
    CHECK(std::equal(run.draws().begin(), run.draws().end(), again.draws().begin(), again.draws().end()));
    CHECK(run.boxes()[3].mark == again.boxes()[3].mark);
    const auto other = simulate(m, kUnit, 10000, {5, 3});
    CHECK_FALSE(std::equal(run.draws().begin(), run.draws().end(), other.draws().begin(), other.draws().end()));

    std::uint64_t hist_total = 0;
    for (auto [k, c] : run.occupancy_histogram()) hist_total += k * c;
    CHECK(hist_total == run.n());
}

TEST_CASE("top order statistics and location sets") {
    const ZetaFrequencyModel m(0.5);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto run = simulate(m, kUnit, 10000, {seed, 0});
        const auto top = top_m(run, 5);
        REQUIRE(top.size() == 5);
        std::set<std::uint64_t> used;
        for (std::size_t k = 0; k < top.size(); ++k) {
            CHECK(top[k].rank == k + 1);
            if (k) CHECK(top[k].value <= top[k - 1].value);
            CHECK(top[k].value_normalized == doctest::Approx(top[k].value / run.b_n()));
            std::set<std::uint64_t> expected;
            for (std::uint64_t i = 1; i <= run.n(); ++i)
                if (run.label_at(i) == top[k].label) expected.insert(i);
            CHECK(std::set<std::uint64_t>(top[k].locations.begin(), top[k].locations.end()) == expected);
            for (auto i : top[k].locations) CHECK(used.insert(i).second);
        }
        double max_x = 0.0;
        for (std::uint64_t i = 1; i <= run.n(); ++i) max_x = std::max(max_x, run.value_at(i));
        CHECK(top[0].value == max_x);
        for (auto i : top[0].locations) CHECK(run.value_at(i) == max_x);
        CHECK(top[0].hits(IntervalSet::single(0, 1)));
        CHECK_FALSE(top[0].hits(IntervalSet()));
    }
    const auto tiny = simulate(m, kUnit, 3, {1, 1});
    CHECK(top_m(tiny, 10).size() == tiny.k_n());
}

TEST_CASE("index ranges and empirical sups") {
    auto r = index_range(10, {0.0, 0.5});
    CHECK(r.first == 1);
    CHECK(r.last == 4);
    r = index_range(10, {0.5, 1.0});
    CHECK(r.first == 5);
    CHECK(r.last == 9);
    CHECK(index_range(10, {0.0, 1.0}).last == 9);
    CHECK(index_range(3, {0.1, 0.2}).empty());
    for (std::uint64_t n : {7u, 10u, 1000u})
        for (double lo = 0.0; lo < 1.0; lo += 0.13)
            for (double hi = lo; hi <= 1.0; hi += 0.17) {
                const auto ir = index_range(n, {lo, hi});
                for (std::uint64_t i = 1; i <= n; ++i) {
                    const double x = double(i) / double(n);
                    REQUIRE((lo <= x && x < hi) == (!ir.empty() && ir.first <= i && i <= ir.last));
                }
            }

    const ZetaFrequencyModel m(0.4);
    const auto run = simulate(m, kUnit, 20000, {3, 9});
    Rng rng(8, 8);
    for (int t = 0; t < 200; ++t) {
        const auto a = oracle::random_set(rng, 2, 100), b = oracle::random_set(rng, 2, 100);
        const double sa = empirical_sup(run, a).raw, sb = empirical_sup(run, b).raw;
        REQUIRE(empirical_sup(run, set_union(a, b)).raw == std::max(sa, sb));
        REQUIRE(variant_star_sup(run, a).raw <= sa);
        double brute = 0.0;
        for (std::uint64_t i = 1; i <= run.n(); ++i)
            if (a.contains(double(i) / double(run.n()))) brute = std::max(brute, run.value_at(i));
        REQUIRE(sa == brute);
    }
    const auto unit = IntervalSet::single(0, 1);
    CHECK(empirical_sup(run, IntervalSet()).raw == 0.0);
    CHECK(variant_star_sup(run, IntervalSet()).raw == 0.0);
    CHECK(variant_star_sup(run, unit).raw == empirical_sup(run, unit).raw);
    CHECK(empirical_sup(run, unit).normalized == doctest::Approx(empirical_sup(run, unit).raw / run.b_n()));
}

TEST_CASE("pattern counts") {
    const ZetaFrequencyModel m(0.5);
    const auto run = simulate(m, kUnit, 50000, {2, 2});
    const std::vector<IntervalSet> whole{IntervalSet::single(0, 1)};
    const std::vector<int> one{1};
    CHECK(pattern_counts(run, whole, one) == run.k_n());

    const std::vector<IntervalSet> fam{IntervalSet::single(0, 0.3), IntervalSet::single(0.2, 0.6),
                                       IntervalSet::single(0.8, 0.9)};
    const auto hist = pattern_histogram(run, fam);
    REQUIRE(hist.size() == 8);
    std::uint64_t total = 0;
    for (auto c : hist) total += c;
    CHECK(total == run.k_n());
    CHECK(pattern_counts(run, std::vector<IntervalSet>{union_all(fam)}, one) == total - hist[0]);
    const auto sig = box_signatures(run, fam);
    for (std::uint32_t mask = 1; mask < 8; ++mask) {
        const std::vector<int> delta{int(mask & 1), int((mask >> 1) & 1), int((mask >> 2) & 1)};
        for (std::size_t b = 0; b < run.k_n(); ++b) {
            std::uint32_t s = 0;
            for (std::uint64_t i = 1; i <= run.n(); ++i)
                if (run.box_at(i) == b)
                    for (std::size_t k = 0; k < 3; ++k)
                        if (fam[k].contains(double(i) / double(run.n()))) s |= 1u << k;
            REQUIRE(s == sig[b]);
            if (b > 200) break;  // brute force on a prefix of boxes only
        }
        CHECK(pattern_counts(run, fam, delta) == hist[mask]);
    }
    CHECK_THROWS_AS(delta_mask(std::vector<int>{0, 0}), DomainError);
    CHECK_THROWS_AS(delta_mask(std::vector<int>{2}), DomainError);
    CHECK(delta_mask(std::vector<int>{1, 0, 1}) == 0b101u);
    CHECK_THROWS_AS(box_signatures(run, std::vector<IntervalSet>(21, IntervalSet::single(0, 1))), CapacityError);
}

TEST_CASE("exports") {
    const ZetaFrequencyModel m(0.5);
    const auto run = simulate(m, kUnit, 100, {1, 0});
    std::ostringstream csv;
    const auto top = top_m(run, 2);
    write_top_m_csv(csv, top);
    std::istringstream lines(csv.str());
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    CHECK(header == "rank,value,value_normalized,label,locations");
    CHECK(first.rfind("1,", 0) == 0);
    std::ostringstream js;
    write_occupancy_json(js, run);
    const auto doc = nlohmann::json::parse(js.str());
    CHECK(doc.at("n") == 100);
    CHECK(doc.at("k_n") == run.k_n());
    std::uint64_t balls = 0;
    for (const auto& e : doc.at("histogram")) balls += e[0].get<std::uint64_t>() * e[1].get<std::uint64_t>();
    CHECK(balls == 100);
}
