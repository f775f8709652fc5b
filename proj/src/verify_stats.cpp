#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "karlin/error.hpp"
#include "karlin/verify.hpp"

namespace karlin {

double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf) {
    if (sorted.size() < 2) throw DomainError("ks_statistic: need at least two samples");
    if (!std::is_sorted(sorted.begin(), sorted.end())) throw DomainError("ks_statistic: samples must be sorted");
    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;  // tie block
        const double f = cdf(sorted[i]);
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(j) / n - f});
        i = j;
    }
    return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    if (!std::is_sorted(a.begin(), a.end()) || !std::is_sorted(b.begin(), b.end()))
        throw DomainError("ks_two_sample: samples must be sorted");
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        double x;
        if (j == b.size() || (i < a.size() && a[i] <= b[j]))
            x = a[i];
        else
            x = b[j];
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

namespace {

double ks_coefficient(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0,1)");
    return std::sqrt(-0.5 * std::log((1.0 - confidence) / 2.0));
}

}  // namespace

double ks_critical(std::uint64_t n, double confidence) {
    return ks_coefficient(confidence) / std::sqrt(static_cast<double>(n));
}

double ks_two_sample_critical(std::uint64_t n, std::uint64_t m, double confidence) {
    const double nd = static_cast<double>(n), md = static_cast<double>(m);
    return ks_coefficient(confidence) * std::sqrt((nd + md) / (nd * md));
}

double normal_quantile_two_sided(double confidence) {
    if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("confidence must lie in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), 0.5 + 0.5 * confidence);
}

std::pair<double, double> wilson_ci(std::uint64_t hits, std::uint64_t trials, double confidence) {
    if (trials == 0) throw DomainError("wilson_ci: trials must be positive");
    if (hits > trials) throw DomainError("wilson_ci: hits exceed trials");
    const double z = normal_quantile_two_sided(confidence);
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(hits) / n;
    const double z2 = z * z;
    const double center = (p + z2 / (2 * n)) / (1 + z2 / n);
    const double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n);
    const double lo = hits == 0 ? 0.0 : std::max(0.0, center - half);
    const double hi = hits == trials ? 1.0 : std::min(1.0, center + half);
    return {lo, hi};
}

ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                                double confidence) {
    if (observed.size() != probabilities.size() || observed.size() < 2)
        throw DomainError("chi_square_test: need matching cell counts and probabilities");
    double total = 0.0;
    for (auto o : observed) total += static_cast<double>(o);
    if (total == 0.0) throw DomainError("chi_square_test: no observations");
    ChiSquareResult r;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        const double expected = total * probabilities[k];
        if (!(expected > 0.0)) throw DomainError("chi_square_test: cell probabilities must be positive");
        const double diff = static_cast<double>(observed[k]) - expected;
        r.statistic += diff * diff / expected;
    }
    r.dof = observed.size() - 1;
    r.critical = boost::math::quantile(boost::math::chi_squared_distribution<double>(static_cast<double>(r.dof)),
                                       confidence);
    return r;
}

double median(std::vector<double> values) {
    if (values.empty()) throw DomainError("median: empty input");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

// ---------------------------------------------------------------------------

namespace {

ReportRow make_row(std::string check, double estimate, double target, double se_or_crit) {
    ReportRow r;
    r.check = std::move(check);
    r.estimate = estimate;
    r.target = target;
    r.se_or_crit = se_or_crit;
    return r;
}

}  // namespace

ReportRow row_within(std::string check, double estimate, double target, double tolerance) {
    ReportRow r = make_row(std::move(check), estimate, target, tolerance);
    r.pass = std::abs(estimate - target) <= tolerance;
    return r;
}

ReportRow row_outside(std::string check, double estimate, double target, double tolerance) {
    ReportRow r = make_row(std::move(check), estimate, target, tolerance);
    r.pass = std::abs(estimate - target) > tolerance;
    return r;
}

ReportRow row_at_most(std::string check, double estimate, double critical) {
    ReportRow r = make_row(std::move(check), estimate, 0.0, critical);
    r.pass = estimate <= critical;
    return r;
}

ReportRow row_below(std::string check, double estimate, double target) {
    ReportRow r = make_row(std::move(check), estimate, target, 0.0);
    r.pass = estimate < target;
    return r;
}

ReportRow row_exceeds(std::string check, double estimate, double target, double margin) {
    ReportRow r = make_row(std::move(check), estimate, target, margin);
    r.pass = estimate - margin > target;
    return r;
}

ReportRow row_info(std::string check, double estimate, double target, double se_or_crit) {
    ReportRow r = make_row(std::move(check), estimate, target, se_or_crit);
    r.pass = true;
    return r;
}

ReportRow row_wilson(std::string check, std::uint64_t hits, std::uint64_t trials, double target, double confidence) {
    const auto [lo, hi] = wilson_ci(hits, trials, confidence);
    const double p = static_cast<double>(hits) / static_cast<double>(trials);
    // distance from p̂ to the CI edge on the target's side
    const double reach = target >= p ? hi - p : p - lo;
    return row_within(std::move(check), p, target, reach);
}

bool SuiteReport::all_pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.pass; });
}

void SuiteReport::add(ReportRow row, std::uint64_t n, std::uint64_t replicas) {
    row.suite = suite;
    row.n = n;
    row.replicas = replicas;
    rows.push_back(std::move(row));
}

void write_csv(std::ostream& out, const SuiteReport& report, bool header) {
    if (header) out << "suite,check,estimate,target,se_or_crit,pass,n,replicas,seed\n";
    for (const auto& r : report.rows)
        out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.suite, r.check, r.estimate, r.target, r.se_or_crit,
                           r.pass ? 1 : 0, r.n, r.replicas, report.seed);
}

void write_json(std::ostream& out, const SuiteReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows)
        rows.push_back({{"suite", r.suite},
                        {"check", r.check},
                        {"estimate", r.estimate},
                        {"target", r.target},
                        {"se_or_crit", r.se_or_crit},
                        {"pass", r.pass},
                        {"n", r.n},
                        {"replicas", r.replicas},
                        {"seed", report.seed}});
    nlohmann::json doc{{"suite", report.suite}, {"seed", report.seed}, {"rows", std::move(rows)}};
    out << doc.dump(2) << '\n';
}

namespace {

double parse_double(const std::string& s) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw DomainError("report: malformed number '" + s + "'");
    return v;
}

std::uint64_t parse_count(const std::string& s) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size()) throw DomainError("report: malformed count '" + s + "'");
    return v;
}

}  // namespace

SuiteReport read_csv(std::istream& in) {
    SuiteReport report;
    std::string line;
    if (!std::getline(in, line) || line != "suite,check,estimate,target,se_or_crit,pass,n,replicas,seed")
        throw DomainError("report: missing CSV header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 9) throw DomainError("report: expected 9 CSV fields, got " + std::to_string(f.size()));
        ReportRow r;
        r.suite = f[0];
        r.check = f[1];
        r.estimate = parse_double(f[2]);
        r.target = parse_double(f[3]);
        r.se_or_crit = parse_double(f[4]);
        r.pass = f[5] == "1";
        r.n = parse_count(f[6]);
        r.replicas = parse_count(f[7]);
        report.seed = parse_count(f[8]);
        if (report.suite.empty()) report.suite = r.suite;
        report.rows.push_back(std::move(r));
    }
    return report;
}

SuiteReport read_json(std::istream& in) {
    const auto doc = nlohmann::json::parse(in);
    SuiteReport report;
    report.suite = doc.at("suite").get<std::string>();
    report.seed = doc.at("seed").get<std::uint64_t>();
    for (const auto& j : doc.at("rows")) {
        ReportRow r;
        r.suite = j.at("suite").get<std::string>();
        r.check = j.at("check").get<std::string>();
        r.estimate = j.at("estimate").get<double>();
        r.target = j.at("target").get<double>();
        r.se_or_crit = j.at("se_or_crit").get<double>();
        r.pass = j.at("pass").get<bool>();
        r.n = j.at("n").get<std::uint64_t>();
        r.replicas = j.at("replicas").get<std::uint64_t>();
        report.rows.push_back(std::move(r));
    }
    return report;
}

}  // namespace karlin
