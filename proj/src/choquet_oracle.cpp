#include "karlin/choquet_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <bit>
#include <numeric>
#include <string>

#include <nlohmann/json.hpp>

#include "karlin/distributions.hpp"
#include "karlin/error.hpp"

namespace karlin {

namespace {

void check_beta(double beta) {
    if (!(beta > 0.0 && beta < 1.0)) throw DomainError("beta must lie in (0,1)");
}

double capacity(double measure, double beta) { return measure > 0.0 ? std::pow(measure, beta) : 0.0; }

}  // namespace

void ChoquetQuery::validate() const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("query: alpha must be positive");
    check_beta(beta);
    for (const auto& t : terms) {
        if (!(t.z > 0.0) || !std::isfinite(t.z)) throw DomainError("query: thresholds z must be positive and finite");
        const double w = std::pow(t.z, -alpha);
        if (!(w > 0.0) || !std::isfinite(w)) throw DomainError("query: weight z^-alpha is not finite and positive");
    }
}

double theta(const IntervalSet& k, double beta) {
    check_beta(beta);
    return capacity(k.lebesgue(), beta);
}

double tail_dependence(const ChoquetQuery& q) {
    q.validate();
    const std::size_t d = q.terms.size();
    if (d == 0) return 0.0;
    std::vector<IntervalSet> family;
    family.reserve(d);
    for (const auto& t : q.terms) family.push_back(t.set);
    (void)atomize(family);  // enforces the family budget and a common carrier

    std::vector<double> w(d);
    for (std::size_t i = 0; i < d; ++i) w[i] = std::pow(q.terms[i].z, -q.alpha);
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });

    double total = 0.0;
    IntervalSet level(family.front().carrier());
    for (std::size_t k = 0; k < d; ++k) {
        level = set_union(level, family[order[k]]);
        const double next = k + 1 < d ? w[order[k + 1]] : 0.0;
        const double step = w[order[k]] - next;
        if (step > 0.0) total += step * capacity(level.lebesgue(), q.beta);
    }
    return total;
}

double joint_cdf(const ChoquetQuery& q) { return std::exp(-tail_dependence(q)); }

double extremal_cdf(std::span<const double> times, std::span<const double> levels, double alpha, double beta) {
    if (times.size() != levels.size() || times.empty())
        throw DomainError("extremal_cdf: times and levels must be nonempty and of equal length");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] > 0.0) || !std::isfinite(times[k])) throw DomainError("extremal_cdf: times must be positive");
        if (k > 0 && !(times[k] > times[k - 1])) throw DomainError("extremal_cdf: times must be strictly increasing");
    }
    ChoquetQuery q;
    q.alpha = alpha;
    q.beta = beta;
    const Carrier window = Carrier::window(times.back());
    for (std::size_t k = 0; k < times.size(); ++k)
        q.terms.push_back({IntervalSet::single(0.0, times[k], window), levels[k]});
    return joint_cdf(q);
}

double tau_z(double t, double z, double alpha, double beta) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("tau_z: t must be >= 0");
    // (-1,0] and (t-1,t] shifted by +1; the law is translation invariant
    const Carrier window = Carrier::window(t + 1.0);
    ChoquetQuery joint;
    joint.alpha = alpha;
    joint.beta = beta;
    joint.terms = {{IntervalSet::single(0.0, 1.0, window), z}, {IntervalSet::single(t, t + 1.0, window), z}};
    const double ell_joint = tail_dependence(joint);
    ChoquetQuery single = joint;
    single.terms.resize(1);
    const double ell_single = tail_dependence(single);
    return -ell_joint + 2.0 * ell_single;
}

double pattern_limit(const PatternQuery& p, double beta) {
    check_beta(beta);
    const std::size_t d = p.family.size();
    if (d > kMaxFamily) throw CapacityError("pattern_limit: family exceeds 20 sets");
    if (p.delta.size() != d) throw DomainError("pattern_limit: delta and family sizes differ");
    std::uint32_t hit = 0;
    for (std::size_t k = 0; k < d; ++k) {
        if (p.delta[k] != 0 && p.delta[k] != 1) throw DomainError("pattern_limit: delta entries must be 0 or 1");
        if (p.delta[k] == 1) hit |= 1u << k;
    }
    if (hit == 0) throw DomainError("pattern_limit: delta must not be the zero vector");
    const std::uint32_t miss = ((d == 32 ? ~0u : (1u << d) - 1u)) & ~hit;
    (void)atomize(p.family);

    auto union_measure = [&](std::uint32_t mask) {
        std::vector<Interval> raw;
        for (std::size_t k = 0; k < d; ++k)
            if (mask & (1u << k)) raw.insert(raw.end(), p.family[k].intervals().begin(), p.family[k].intervals().end());
        return IntervalSet::normalize(std::move(raw), p.family.front().carrier()).lebesgue();
    };
    // enumerate S ⊆ H
    double sum = 0.0;
    for (std::uint32_t s = hit;; s = (s - 1) & hit) {
        const double sign = (std::popcount(s) % 2 == 1) ? 1.0 : -1.0;
        sum += sign * capacity(union_measure(s | miss), beta);
        if (s == 0) break;
    }
    return gamma_fn(1.0 - beta) * sum;
}

double mstar_theta(double a, double b, double beta) {
    check_beta(beta);
    if (!(a >= 0.0)) throw DomainError("mstar_theta: a must be >= 0");
    if (!(a < b)) throw DomainError("mstar_theta: requires a < b");
    return std::pow(b, beta) - capacity(a, beta);
}

void to_json(nlohmann::json& j, const ChoquetQuery& q) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : q.terms) terms.push_back({{"set", t.set}, {"z", t.z}});
    j = nlohmann::json{{"alpha", q.alpha}, {"beta", q.beta}, {"terms", std::move(terms)}};
}

void from_json(const nlohmann::json& j, ChoquetQuery& q) {
    if (!j.is_object()) throw DomainError("query: expected a JSON object");
    for (const char* field : {"alpha", "beta"}) {
        if (!j.contains(field) || !j.at(field).is_number())
            throw DomainError(std::string("query: field '") + field + "' must be a number");
    }
    q.alpha = j.at("alpha").get<double>();
    q.beta = j.at("beta").get<double>();
    if (!j.contains("terms") || !j.at("terms").is_array()) throw DomainError("query: field 'terms' must be an array");
    q.terms.clear();
    for (const auto& t : j.at("terms")) {
        if (!t.contains("set")) throw DomainError("query: field 'terms[].set' is missing");
        if (!t.contains("z") || !t.at("z").is_number()) throw DomainError("query: field 'terms[].z' must be a number");
        q.terms.push_back({t.at("set").get<IntervalSet>(), t.at("z").get<double>()});
    }
}

}  // namespace karlin
