#include <doctest.h>

#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "karlin/error.hpp"
#include "karlin/interval_set.hpp"
#include "oracles.hpp"

using namespace karlin;

namespace {
IntervalSet make(std::vector<Interval> raw, Carrier c = Carrier::unit()) { return IntervalSet::normalize(raw, c); }
}  // namespace

TEST_CASE("normalize") {
    CHECK(make({{0.2, 0.5}, {0.4, 0.7}}).intervals()[0] == Interval{0.2, 0.7});
    CHECK(make({{0.2, 0.5}, {0.4, 0.7}}).size() == 1);
    CHECK(make({{0.5, 0.5}}).empty());
    const auto sorted = make({{0.6, 0.8}, {0.1, 0.2}});
    REQUIRE(sorted.size() == 2);
    CHECK(sorted.intervals()[0] == Interval{0.1, 0.2});
    CHECK(sorted.intervals()[1] == Interval{0.6, 0.8});
    CHECK(make({{0.0, 0.5}, {0.5, 1.0}}) == IntervalSet::single(0.0, 1.0));
    CHECK(make({{0.7, 0.3}}).empty());
    CHECK(IntervalSet::normalize(std::vector<Interval>(sorted.intervals().begin(), sorted.intervals().end())) == sorted);
    CHECK_THROWS_AS(make({{std::nan(""), 0.5}}), DomainError);
    CHECK_THROWS_AS(make({{0.5, 1.5}}), DomainError);
    CHECK_NOTHROW(make({{0.5, 1.5}}, Carrier::window(2)));
    CHECK_NOTHROW(make({{-5, 3}}, Carrier::line()));
}

TEST_CASE("union, intersection, lebesgue") {
    const auto a = IntervalSet::single(0.0, 0.5), b = IntervalSet::single(0.5, 1.0), c = IntervalSet::single(0.25, 1.0);
    CHECK(set_union(a, b) == IntervalSet::single(0.0, 1.0));
    CHECK(set_intersection(a, c) == IntervalSet::single(0.25, 0.5));
    CHECK(set_intersection(a, IntervalSet()).empty());
    CHECK(set_difference(c, a) == IntervalSet::single(0.5, 1.0));
    CHECK(IntervalSet::single(0.2, 0.45).lebesgue() == doctest::Approx(0.25));
    CHECK(IntervalSet().lebesgue() == 0.0);
    CHECK(make({{0, 0.1}, {0.9, 1}}).lebesgue() == doctest::Approx(0.2));
    CHECK_THROWS_AS(set_union(a, IntervalSet::single(0, 1, Carrier::window(2))), DomainError);
    CHECK(a.contains(0.0));
    CHECK_FALSE(a.contains(0.5));
    CHECK(IntervalSet::single(0.3, 0.4).is_subset_of(c));
    CHECK_FALSE(a.is_subset_of(c));
    const auto s = IntervalSet::single(0.5, 1.0).scaled(2.0);
    CHECK(s.carrier() == Carrier::window(2.0));
    CHECK(s == IntervalSet::single(1.0, 2.0, Carrier::window(2.0)));
}

TEST_CASE("randomized algebra against a fine-grid bitmap") {
    constexpr std::size_t grid = 10000;  // endpoints on multiples of 1e-4, evaluated at cell midpoints
    Rng rng(99, 0);
    for (int trial = 0; trial < 10000; ++trial) {
        const auto a = oracle::random_set(rng, 3, grid), b = oracle::random_set(rng, 3, grid),
                   c = oracle::random_set(rng, 3, grid);
        if (trial % 10 == 0) {  // bitmap comparisons on a subsample keep the runtime low
            const auto ba = oracle::bitmap(a, grid), bb = oracle::bitmap(b, grid);
            const auto u = oracle::bitmap(set_union(a, b), grid), i = oracle::bitmap(set_intersection(a, b), grid),
                       d = oracle::bitmap(set_difference(a, b), grid);
            bool ok = true;
            for (std::size_t k = 0; k < grid; ++k)
                ok = ok && u[k] == (ba[k] || bb[k]) && i[k] == (ba[k] && bb[k]) && d[k] == (ba[k] && !bb[k]);
            REQUIRE(ok);
        }
        REQUIRE(set_union(a, b) == set_union(b, a));
        REQUIRE(set_intersection(a, b) == set_intersection(b, a));
        REQUIRE(set_union(set_union(a, b), c) == set_union(a, set_union(b, c)));
        REQUIRE(set_intersection(set_intersection(a, b), c) == set_intersection(a, set_intersection(b, c)));
        REQUIRE(set_union(a, b).lebesgue() + set_intersection(a, b).lebesgue() ==
                doctest::Approx(a.lebesgue() + b.lebesgue()).epsilon(1e-12));
        REQUIRE(IntervalSet::normalize({a.intervals().begin(), a.intervals().end()}) == a);
    }
}

TEST_CASE("atomize") {
    const std::vector<IntervalSet> f{IntervalSet::single(0.0, 0.6), IntervalSet::single(0.4, 1.0)};
    const auto d = atomize(f);
    REQUIRE(d.atoms.size() == 3);
    CHECK(d.atoms[0] == IntervalSet::single(0.0, 0.4));
    CHECK(d.atoms[1] == IntervalSet::single(0.4, 0.6));
    CHECK(d.atoms[2] == IntervalSet::single(0.6, 1.0));
    CHECK(d.membership[0] == std::vector<std::size_t>{0, 1});
    CHECK(d.membership[1] == std::vector<std::size_t>{1, 2});
    CHECK(d.atom_mask(0) == 0b011u);
    CHECK(d.signature == std::vector<std::uint32_t>{1, 3, 2});

    const auto single = atomize(std::vector<IntervalSet>{IntervalSet::single(0.1, 0.3)});
    REQUIRE(single.atoms.size() == 1);
    CHECK(single.membership[0] == std::vector<std::size_t>{0});
    CHECK(atomize(std::vector<IntervalSet>{IntervalSet::single(0, 0.2), IntervalSet::single(0.5, 0.7)}).atoms.size() == 2);

    CHECK_THROWS_AS(atomize(std::vector<IntervalSet>(21, IntervalSet::single(0, 1))), CapacityError);
    CHECK_THROWS_AS(atomize(std::vector<IntervalSet>{IntervalSet::single(0, 1), IntervalSet::single(0, 1, Carrier::window(2))}),
                    DomainError);

    Rng rng(3, 0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<IntervalSet> fam;
        const int d_sets = 1 + trial % 6;
        for (int k = 0; k < d_sets; ++k) fam.push_back(oracle::random_set(rng, 2, 1000));
        const auto dec = atomize(fam);
        for (std::size_t i = 0; i < fam.size(); ++i) {
            std::vector<IntervalSet> parts;
            for (auto j : dec.membership[i]) parts.push_back(dec.atoms[j]);
            REQUIRE(union_all(parts) == fam[i]);
        }
        for (std::size_t j = 0; j < dec.atoms.size(); ++j)
            for (std::size_t k = j + 1; k < dec.atoms.size(); ++k)
                REQUIRE(set_intersection(dec.atoms[j], dec.atoms[k]).empty());
        REQUIRE(union_all(dec.atoms) == union_all(fam));
    }
}

TEST_CASE("json encoding") {
    const auto s = make({{0.1, 0.2}, {0.5, 0.9}});
    nlohmann::json j = s;
    CHECK(j.dump() == R"({"carrier":[0.0,1.0],"intervals":[[0.1,0.2],[0.5,0.9]]})");
    CHECK(j.get<IntervalSet>() == s);
    const auto line = nlohmann::json::parse(R"({"carrier":[null,null],"intervals":[[-3,4]]})").get<IntervalSet>();
    CHECK(line.carrier() == Carrier::line());
    CHECK(nlohmann::json(line).get<IntervalSet>() == line);
    CHECK(nlohmann::json::parse(R"({"intervals":[[0,0.5]]})").get<IntervalSet>() == IntervalSet::single(0, 0.5));
    CHECK_THROWS_AS(nlohmann::json::parse(R"({"intervals":[[0]]})").get<IntervalSet>(), DomainError);
    CHECK_THROWS_AS(nlohmann::json::parse(R"({"carrier":[0,1]})").get<IntervalSet>(), DomainError);
}
