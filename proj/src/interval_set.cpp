#include "karlin/interval_set.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "karlin/error.hpp"

namespace karlin {

namespace {

void require_same_carrier(const IntervalSet& a, const IntervalSet& b) {
    if (!(a.carrier() == b.carrier())) throw DomainError("interval sets live on different carriers");
}

// Sweep over both operands; keep points whose coverage count satisfies pred.
template <typename Pred>
IntervalSet combine(const IntervalSet& a, const IntervalSet& b, Pred pred) {
    require_same_carrier(a, b);
    std::vector<double> cuts;
    cuts.reserve(2 * (a.size() + b.size()));
    for (const auto& iv : a.intervals()) cuts.insert(cuts.end(), {iv.lo, iv.hi});
    for (const auto& iv : b.intervals()) cuts.insert(cuts.end(), {iv.lo, iv.hi});
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<Interval> out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        if (pred(a.contains(lo), b.contains(lo))) out.push_back({lo, cuts[i + 1]});
    }
    return IntervalSet::normalize(std::move(out), a.carrier());
}

}  // namespace

IntervalSet IntervalSet::normalize(std::vector<Interval> raw, Carrier carrier) {
    if (std::isnan(carrier.lo) || std::isnan(carrier.hi) || !(carrier.lo < carrier.hi))
        throw DomainError("carrier must be a nondegenerate interval");
    for (const auto& iv : raw) {
        if (std::isnan(iv.lo) || std::isnan(iv.hi)) throw DomainError("interval endpoint is NaN");
    }
    std::erase_if(raw, [](const Interval& iv) { return !(iv.lo < iv.hi); });
    for (const auto& iv : raw) {
        if (iv.lo < carrier.lo || iv.hi > carrier.hi)
            throw DomainError("interval [" + std::to_string(iv.lo) + "," + std::to_string(iv.hi) +
                              ") leaves its carrier");
    }
    std::sort(raw.begin(), raw.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
    IntervalSet set(carrier);
    for (const auto& iv : raw) {
        if (!set.intervals_.empty() && iv.lo <= set.intervals_.back().hi)
            set.intervals_.back().hi = std::max(set.intervals_.back().hi, iv.hi);
        else
            set.intervals_.push_back(iv);
    }
    return set;
}

double IntervalSet::lebesgue() const noexcept {
    double total = 0.0;
    for (const auto& iv : intervals_) total += iv.length();
    return total;
}

bool IntervalSet::contains(double x) const noexcept {
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), x,
                               [](double v, const Interval& iv) { return v < iv.lo; });
    if (it == intervals_.begin()) return false;
    return std::prev(it)->contains(x);
}

bool IntervalSet::is_subset_of(const IntervalSet& other) const {
    return set_difference(*this, other).empty();
}

IntervalSet IntervalSet::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw DomainError("scale factor must be positive");
    IntervalSet out(Carrier{carrier_.lo * factor, carrier_.hi * factor});
    out.intervals_.reserve(intervals_.size());
    for (const auto& iv : intervals_) out.intervals_.push_back({iv.lo * factor, iv.hi * factor});
    return out;
}

IntervalSet IntervalSet::with_carrier(Carrier carrier) const {
    return normalize({intervals_.begin(), intervals_.end()}, carrier);
}

IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
    require_same_carrier(a, b);
    std::vector<Interval> raw(a.intervals().begin(), a.intervals().end());
    raw.insert(raw.end(), b.intervals().begin(), b.intervals().end());
    return IntervalSet::normalize(std::move(raw), a.carrier());
}

IntervalSet set_intersection(const IntervalSet& a, const IntervalSet& b) {
    return combine(a, b, [](bool x, bool y) { return x && y; });
}

IntervalSet set_difference(const IntervalSet& a, const IntervalSet& b) {
    return combine(a, b, [](bool x, bool y) { return x && !y; });
}

IntervalSet union_all(std::span<const IntervalSet> family) {
    if (family.empty()) return IntervalSet{};
    std::vector<Interval> raw;
    for (const auto& s : family) {
        require_same_carrier(family.front(), s);
        raw.insert(raw.end(), s.intervals().begin(), s.intervals().end());
    }
    return IntervalSet::normalize(std::move(raw), family.front().carrier());
}

std::uint32_t AtomDecomposition::atom_mask(std::size_t input) const {
    std::uint32_t mask = 0;
    for (auto j : membership.at(input)) mask |= 1u << j;
    return mask;
}

std::vector<double> AtomDecomposition::measures() const {
    std::vector<double> out;
    out.reserve(atoms.size());
    for (const auto& a : atoms) out.push_back(a.lebesgue());
    return out;
}

AtomDecomposition atomize(std::span<const IntervalSet> family) {
    if (family.size() > kMaxFamily)
        throw CapacityError("atomize: family of " + std::to_string(family.size()) + " sets exceeds the budget of " +
                            std::to_string(kMaxFamily));
    AtomDecomposition out;
    out.membership.resize(family.size());
    if (family.empty()) return out;
    const Carrier carrier = family.front().carrier();
    std::vector<double> cuts;
    for (const auto& s : family) {
        require_same_carrier(family.front(), s);
        for (const auto& iv : s.intervals()) cuts.insert(cuts.end(), {iv.lo, iv.hi});
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

    // signature -> raw pieces, keyed in order of first appearance
    std::map<std::uint32_t, std::size_t> index_of;
    std::vector<std::vector<Interval>> pieces;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        std::uint32_t sig = 0;
        for (std::size_t k = 0; k < family.size(); ++k)
            if (family[k].contains(cuts[i])) sig |= 1u << k;
        if (sig == 0) continue;
        auto [it, inserted] = index_of.try_emplace(sig, pieces.size());
        if (inserted) {
            pieces.emplace_back();
            out.signature.push_back(sig);
        }
        pieces[it->second].push_back({cuts[i], cuts[i + 1]});
    }
    out.atoms.reserve(pieces.size());
    for (auto& p : pieces) out.atoms.push_back(IntervalSet::normalize(std::move(p), carrier));
    for (std::size_t j = 0; j < out.signature.size(); ++j)
        for (std::size_t k = 0; k < family.size(); ++k)
            if (out.signature[j] & (1u << k)) out.membership[k].push_back(j);
    return out;
}

void to_json(nlohmann::json& j, const IntervalSet& set) {
    auto endpoint = [](double v) -> nlohmann::json {
        if (std::isinf(v)) return nullptr;
        return v;
    };
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& iv : set.intervals()) intervals.push_back({iv.lo, iv.hi});
    j = nlohmann::json{{"carrier", {endpoint(set.carrier().lo), endpoint(set.carrier().hi)}},
                       {"intervals", std::move(intervals)}};
}

void from_json(const nlohmann::json& j, IntervalSet& set) {
    if (!j.is_object()) throw DomainError("interval set: expected an object");
    Carrier carrier = Carrier::unit();
    if (j.contains("carrier")) {
        const auto& c = j.at("carrier");
        if (!c.is_array() || c.size() != 2) throw DomainError("interval set: field 'carrier' must be [lo,hi]");
        carrier.lo = c[0].is_null() ? -std::numeric_limits<double>::infinity() : c[0].get<double>();
        carrier.hi = c[1].is_null() ? std::numeric_limits<double>::infinity() : c[1].get<double>();
    }
    if (!j.contains("intervals") || !j.at("intervals").is_array())
        throw DomainError("interval set: field 'intervals' must be an array");
    std::vector<Interval> raw;
    for (const auto& pair : j.at("intervals")) {
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
            throw DomainError("interval set: field 'intervals' entries must be [lo,hi] numbers");
        raw.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    set = IntervalSet::normalize(std::move(raw), carrier);
}

}  // namespace karlin
