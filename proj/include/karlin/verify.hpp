#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "karlin/interval_set.hpp"

namespace karlin {

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

/// sup_x |F_N(x) - F(x)| over the jump points of the empirical CDF.
/// Throws DomainError on fewer than two samples or unsorted input.
double ks_statistic(std::span<const double> sorted, const std::function<double(double)>& cdf);

/// Two-sample sup distance between empirical CDFs (inputs sorted).
double ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Asymptotic one-sample critical value c(conf)/√N, c = sqrt(-ln((1-conf)/2)/2).
double ks_critical(std::uint64_t n, double confidence);
double ks_two_sample_critical(std::uint64_t n, std::uint64_t m, double confidence);

/// Two-sided standard normal quantile for the confidence level.
double normal_quantile_two_sided(double confidence);

/// Wilson score interval. Throws DomainError when trials = 0 or hits > trials.
std::pair<double, double> wilson_ci(std::uint64_t hits, std::uint64_t trials, double confidence);

struct ChiSquareResult {
    double statistic = 0.0;
    std::size_t dof = 0;
    double critical = 0.0;
    bool pass() const { return statistic <= critical; }
};

/// Pearson goodness of fit of observed counts against cell probabilities
/// (which must sum to 1).
ChiSquareResult chi_square_test(std::span<const std::uint64_t> observed, std::span<const double> probabilities,
                                double confidence);

double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Suites
// ---------------------------------------------------------------------------

struct SuiteConfig {
    std::string suite;
    double alpha = 1.0;
    double beta = 0.5;
    std::vector<std::uint64_t> n_grid;
    std::uint64_t replicas = 0;        // discrete-model runs
    std::uint64_t limit_replicas = 0;  // exact limit draws
    std::vector<IntervalSet> family;
    std::uint64_t seed = 42;
    double confidence = 0.99;
    unsigned threads = 0;

    // Calibration constants. The limit theorems carry no rates, so these are
    // chosen for the pure power-law frequencies at the default sizes.
    double ks_threshold = 0.05;       // KS(M_n/b_n, Fréchet) at the largest n
    double star_ks_threshold = 0.07;  // KS(M*_n/b_n, M* law)
    double occupancy_rel_tol = 0.02;  // mean K_n/ν vs Γ(1-β)
    double singleton_rel_tol = 0.01;  // fraction of boxes with one ball vs β
    double pattern_rel_tol = 0.05;    // τ^δ(n)/ν vs its limit
    double median_rel_tol = 0.02;     // median of M([0,t])
    double se_multiplier = 3.0;       // binomial / delta-method SE multiples
    std::size_t repetitions = 3;      // harness repetitions for the KS trend
    std::size_t random_queries = 10;

    /// Defaults for one suite name, sized for the acceptance run.
    static SuiteConfig defaults(const std::string& suite);
    /// Throws DomainError when invariants fail (replicas ≥ 100, confidence ∈ {0.95, 0.99}, ...).
    void validate() const;
};

struct ReportRow {
    std::string suite;
    std::string check;
    double estimate = 0.0;
    double target = 0.0;
    double se_or_crit = 0.0;
    bool pass = false;
    std::uint64_t n = 0;
    std::uint64_t replicas = 0;

    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

// Row builders; each fixes the pass rule from the row's own numbers.
ReportRow row_within(std::string check, double estimate, double target, double tolerance);  // |e-t| ≤ tol
ReportRow row_outside(std::string check, double estimate, double target, double tolerance);  // |e-t| > tol
ReportRow row_at_most(std::string check, double estimate, double critical);                  // e ≤ crit
ReportRow row_below(std::string check, double estimate, double target);                      // e < t
ReportRow row_exceeds(std::string check, double estimate, double target, double margin);     // e-margin > t
ReportRow row_info(std::string check, double estimate, double target, double se_or_crit);    // reported only
/// Wilson-interval row: passes iff target ∈ CI(hits/trials).
ReportRow row_wilson(std::string check, std::uint64_t hits, std::uint64_t trials, double target, double confidence);

struct SuiteReport {
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<ReportRow> rows;
    double runtime_seconds = 0.0;  // not serialized: reports stay byte-identical across runs

    bool all_pass() const;
    void add(ReportRow row, std::uint64_t n, std::uint64_t replicas);
};

// CSV schema: suite,check,estimate,target,se_or_crit,pass,n,replicas,seed
void write_csv(std::ostream& out, const SuiteReport& report, bool header = true);
void write_json(std::ostream& out, const SuiteReport& report);
SuiteReport read_csv(std::istream& in);
SuiteReport read_json(std::istream& in);

SuiteReport suite_thm2_marginal(const SuiteConfig& cfg);
SuiteReport suite_thm1_locations(const SuiteConfig& cfg);
SuiteReport suite_occupancy(const SuiteConfig& cfg);
SuiteReport suite_patterns(const SuiteConfig& cfg);
SuiteReport suite_limit_vs_oracle(const SuiteConfig& cfg);
SuiteReport suite_extremal_and_mstar(const SuiteConfig& cfg);

/// Suite names: marginal, locations, occupancy, patterns, limit-oracle, extremal-mstar.
const std::vector<std::string>& suite_names();
SuiteReport run_suite(const SuiteConfig& cfg);

}  // namespace karlin
