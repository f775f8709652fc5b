#include "cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "karlin/choquet_oracle.hpp"
#include "karlin/error.hpp"
#include "karlin/karlin_sim.hpp"
#include "karlin/limit_sim.hpp"
#include "karlin/parallel.hpp"
#include "karlin/verify.hpp"

namespace karlin::cli {

namespace {

using nlohmann::json;

struct Options {
    double alpha = 1.0;
    std::optional<double> beta;
    std::vector<std::uint64_t> n;
    std::optional<std::uint64_t> replicas;
    std::optional<std::uint64_t> limit_replicas;
    std::optional<std::uint64_t> seed;
    std::string query;
    std::string out;
    std::string format = "csv";
    std::optional<unsigned> threads;
    std::string suite;
    std::string variant = "karlin";
    std::size_t top = 5;
    std::optional<double> confidence;
    std::optional<double> ks_threshold;
    std::optional<double> star_ks_threshold;
    std::optional<std::size_t> repetitions;
};

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::uint64_t resolve_seed(const Options& o, std::ostream& err) {
    if (o.seed) return *o.seed;
    const auto seed = entropy_seed();
    err << "seed: " << seed << '\n';
    return seed;
}

unsigned resolve_thread_option(const Options& o) {
    if (o.threads) return *o.threads;
    if (const char* env = std::getenv("KARLIN_THREADS")) {
        try {
            return static_cast<unsigned>(std::stoul(env));
        } catch (const std::exception&) {
            throw UsageError(fmt::format("KARLIN_THREADS: '{}' is not a thread count", env));
        }
    }
    return 0;
}

double require_beta(const Options& o) {
    if (!o.beta) throw UsageError("--beta is required");
    return *o.beta;
}

json load_json(const std::string& text_or_path) {
    if (text_or_path.empty()) throw UsageError("--query is required");
    std::string text = text_or_path;
    const auto first = text.find_first_not_of(" \t\n");
    if (first == std::string::npos || (text[first] != '{' && text[first] != '[')) {
        std::ifstream in(text_or_path);
        if (!in) throw UsageError("cannot open query file '" + text_or_path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("query: malformed JSON: ") + e.what());
    }
}

double number_field(const json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_number())
        throw DomainError(std::string("query: field '") + field + "' must be a number");
    return j.at(field).get<double>();
}

std::vector<double> number_array(const json& j, const char* field) {
    if (!j.contains(field) || !j.at(field).is_array())
        throw DomainError(std::string("query: field '") + field + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j.at(field)) {
        if (!v.is_number()) throw DomainError(std::string("query: field '") + field + "' must hold numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

std::vector<IntervalSet> family_from_json(const json& j) {
    const json* list = &j;
    if (j.is_object()) {
        if (j.contains("sets"))
            list = &j.at("sets");
        else if (j.contains("family"))
            list = &j.at("family");
        else if (j.contains("terms")) {
            std::vector<IntervalSet> out;
            for (const auto& t : j.at("terms")) {
                if (!t.contains("set")) throw DomainError("query: field 'terms[].set' is missing");
                out.push_back(t.at("set").get<IntervalSet>());
            }
            return out;
        } else if (j.contains("intervals")) {
            return {j.get<IntervalSet>()};
        } else {
            throw DomainError("query: expected field 'sets' with a list of interval sets");
        }
    }
    if (!list->is_array()) throw DomainError("query: field 'sets' must be an array");
    std::vector<IntervalSet> out;
    for (const auto& s : *list) out.push_back(s.get<IntervalSet>());
    return out;
}

class Output {
public:
    explicit Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("cannot open output file '" + path + "'");
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void check_format(const Options& o) {
    if (o.format != "csv" && o.format != "json") throw UsageError("--format must be csv or json");
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
    check_format(o);
    const double beta = require_beta(o);
    if (o.n.empty()) throw UsageError("--n is required");
    const HeavyTailSpec spec{o.alpha, 1.0, MarkLaw::pareto};
    spec.validate();
    const ZetaFrequencyModel model(beta);
    const auto seed = resolve_seed(o, err);
    const auto replicas = o.replicas.value_or(1);
    const unsigned threads = resolve_thread_option(o);

    struct Run {
        std::uint64_t n = 0;
        std::size_t k_n = 0;
        double b_n = 0.0;
        std::vector<TopOrderStat> top;
        json occupancy;
    };
    std::vector<Run> runs;
    for (std::size_t g = 0; g < o.n.size(); ++g) {
        auto batch = parallel_map<Run>(replicas, threads, [&](std::uint64_t r) {
            const auto run = simulate(model, spec, o.n[g], StreamKey{seed, (g << 40) | r});
            Run s{run.n(), run.k_n(), run.b_n(), top_m(run, o.top), {}};
            if (o.format == "json") {
                std::ostringstream os;
                write_occupancy_json(os, run);
                s.occupancy = json::parse(os.str());
            }
            return s;
        });
        for (auto& b : batch) runs.push_back(std::move(b));
    }

    Output sink(o.out, out);
    if (o.format == "csv") {
        *sink << "replica,n,k_n,b_n,rank,value,value_normalized,label,locations\n";
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto& r = runs[i];
            for (const auto& t : r.top) {
                std::string locs;
                for (std::size_t j = 0; j < t.locations.size(); ++j)
                    locs += (j ? ";" : "") + fmt::format("{}", t.position(j));
                *sink << fmt::format("{},{},{},{},{},{},{},{},{}\n", i % replicas, r.n, r.k_n, r.b_n, t.rank, t.value,
                                     t.value_normalized, t.label, locs);
            }
        }
    } else {
        json doc = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            auto entry = runs[i].occupancy;
            entry["replica"] = i % replicas;
            json top = json::array();
            for (const auto& t : runs[i].top)
                top.push_back({{"rank", t.rank},
                               {"value", t.value},
                               {"value_normalized", t.value_normalized},
                               {"label", t.label},
                               {"locations", t.locations},
                               {"positions", [&] {
                                    std::vector<double> p;
                                    for (std::size_t j = 0; j < t.locations.size(); ++j) p.push_back(t.position(j));
                                    return p;
                                }()}});
            entry["top"] = std::move(top);
            doc.push_back(std::move(entry));
        }
        *sink << doc.dump(2) << '\n';
    }
    return kExitOk;
}

int cmd_limit_sample(const Options& o, std::ostream& out, std::ostream& err) {
    check_format(o);
    const double beta = require_beta(o);
    const auto family = family_from_json(load_json(o.query));
    if (family.empty()) throw DomainError("query: the family is empty");
    if (o.variant != "karlin" && o.variant != "mstar" && o.variant != "coupled")
        throw UsageError("--variant must be karlin, mstar or coupled");
    const auto seed = resolve_seed(o, err);
    const auto replicas = o.replicas.value_or(1000);
    const unsigned threads = resolve_thread_option(o);

    auto draws = parallel_map<CoupledSample>(replicas, threads, [&](std::uint64_t r) {
        Rng rng(StreamKey{seed, r});
        CoupledSample s;
        if (o.variant == "karlin")
            s.karlin = sample_on_window(rng, o.alpha, beta, family);
        else if (o.variant == "mstar")
            s.karlin = sample_mstar(rng, o.alpha, beta, family);
        else
            s = sample_coupled(rng, o.alpha, beta, family);
        return s;
    });

    Output sink(o.out, out);
    if (o.format == "csv") {
        if (o.variant == "coupled") {
            *sink << "replica,set_id,value,star_value\n";
            for (std::size_t r = 0; r < draws.size(); ++r)
                for (std::size_t i = 0; i < family.size(); ++i)
                    *sink << fmt::format("{},{},{},{}\n", r, i, draws[r].karlin.values[i], draws[r].star.values[i]);
        } else {
            std::vector<LimitSample> samples;
            samples.reserve(draws.size());
            for (auto& d : draws) samples.push_back(std::move(d.karlin));
            write_limit_csv(*sink, samples);
        }
    } else {
        json samples = json::array();
        for (const auto& d : draws) {
            json s{{"values", d.karlin.values}, {"atoms_used", d.karlin.atoms_used}};
            if (o.variant == "coupled") s["star_values"] = d.star.values;
            samples.push_back(std::move(s));
        }
        json doc{{"variant", o.variant}, {"alpha", o.alpha}, {"beta", beta},
                 {"seed", seed},          {"sets", family},  {"samples", std::move(samples)}};
        *sink << doc.dump(2) << '\n';
    }
    return kExitOk;
}

double evaluate_oracle(const json& j) {
    const std::string functional = j.is_object() && j.contains("functional") ? j.at("functional").get<std::string>()
                                                                             : "joint_cdf";
    if (functional == "joint_cdf" || functional == "tail_dependence") {
        const auto q = j.get<ChoquetQuery>();
        q.validate();
        return functional == "joint_cdf" ? joint_cdf(q) : tail_dependence(q);
    }
    if (functional == "theta") {
        if (!j.contains("set")) throw DomainError("query: field 'set' is missing");
        return theta(j.at("set").get<IntervalSet>(), number_field(j, "beta"));
    }
    if (functional == "tau_z")
        return tau_z(number_field(j, "t"), number_field(j, "z"), number_field(j, "alpha"), number_field(j, "beta"));
    if (functional == "pattern_limit") {
        PatternQuery p;
        if (!j.contains("family")) throw DomainError("query: field 'family' is missing");
        p.family = family_from_json(j.at("family"));
        for (double v : number_array(j, "delta")) p.delta.push_back(static_cast<int>(v));
        return pattern_limit(p, number_field(j, "beta"));
    }
    if (functional == "mstar_theta")
        return mstar_theta(number_field(j, "a"), number_field(j, "b"), number_field(j, "beta"));
    if (functional == "extremal_cdf")
        return extremal_cdf(number_array(j, "times"), number_array(j, "levels"), number_field(j, "alpha"),
                            number_field(j, "beta"));
    throw DomainError("query: field 'functional' has unknown value '" + functional + "'");
}

int cmd_oracle(const Options& o, std::ostream& out) {
    const double value = evaluate_oracle(load_json(o.query));
    Output sink(o.out, out);
    *sink << fmt::format("{:.12g}\n", value);
    return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
    check_format(o);
    const double beta = require_beta(o);
    if (o.suite.empty()) throw UsageError("--suite is required");
    std::vector<std::string> suites;
    if (o.suite == "all")
        suites = suite_names();
    else
        suites.push_back(o.suite);
    const auto seed = resolve_seed(o, err);
    std::optional<std::vector<IntervalSet>> family;
    if (!o.query.empty()) family = family_from_json(load_json(o.query));

    std::vector<SuiteReport> reports;
    for (const auto& name : suites) {
        auto cfg = SuiteConfig::defaults(name);
        cfg.alpha = o.alpha;
        cfg.beta = beta;
        cfg.seed = seed;
        cfg.threads = resolve_thread_option(o);
        if (!o.n.empty()) cfg.n_grid = o.n;
        if (o.replicas) cfg.replicas = *o.replicas;
        if (o.limit_replicas) cfg.limit_replicas = *o.limit_replicas;
        if (family) cfg.family = *family;
        if (o.confidence) cfg.confidence = *o.confidence;
        if (o.ks_threshold) cfg.ks_threshold = *o.ks_threshold;
        if (o.star_ks_threshold) cfg.star_ks_threshold = *o.star_ks_threshold;
        if (o.repetitions) cfg.repetitions = *o.repetitions;
        cfg.validate();
        reports.push_back(run_suite(cfg));
        const auto& r = reports.back();
        std::size_t passed = 0;
        for (const auto& row : r.rows) passed += row.pass;
        err << fmt::format("{}: {}/{} rows pass ({:.1f} s)\n", name, passed, r.rows.size(), r.runtime_seconds);
    }

    Output sink(o.out, out);
    bool ok = true;
    if (o.format == "csv") {
        for (std::size_t i = 0; i < reports.size(); ++i) write_csv(*sink, reports[i], i == 0);
    } else if (reports.size() == 1) {
        write_json(*sink, reports[0]);
    } else {
        std::ostringstream joined;
        joined << '[';
        for (std::size_t i = 0; i < reports.size(); ++i) {
            std::ostringstream one;
            write_json(one, reports[i]);
            joined << (i ? "," : "") << one.str();
        }
        joined << ']';
        *sink << json::parse(joined.str()).dump(2) << '\n';
    }
    for (const auto& r : reports) ok = ok && r.all_pass();
    return ok ? kExitOk : kExitFailedVerification;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--alpha", o.alpha, "Tail index of the marks")->capture_default_str();
    sub->add_option("--beta", o.beta, "Regular-variation index in (0,1)");
    sub->add_option("--seed", o.seed, "Master seed (drawn from entropy when absent)");
    sub->add_option("--out", o.out, "Output path (stdout when absent)");
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores; env KARLIN_THREADS)");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Karlin random sup-measures: simulation, exact limit sampling, oracle, verification"};
    app.name("karlin");
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Simulate the Karlin model and report top order statistics");
    add_common(sim, o);
    sim->add_option("--n", o.n, "Sample sizes (comma list)")->delimiter(',');
    sim->add_option("--replicas", o.replicas, "Runs per sample size");
    sim->add_option("--top", o.top, "Number of top order statistics")->capture_default_str();
    sim->add_option("--format", o.format, "csv or json")->capture_default_str();

    auto* lim = app.add_subcommand("limit-sample", "Exact draws of the limit sup-measure over a family");
    add_common(lim, o);
    lim->add_option("--query", o.query, "Family JSON (file path or inline)");
    lim->add_option("--replicas", o.replicas, "Number of draws");
    lim->add_option("--variant", o.variant, "karlin, mstar or coupled")->capture_default_str();
    lim->add_option("--format", o.format, "csv or json")->capture_default_str();

    auto* orc = app.add_subcommand("oracle", "Evaluate a closed-form functional");
    orc->add_option("--query", o.query, "Query JSON (file path or inline)");
    orc->add_option("--out", o.out, "Output path (stdout when absent)");

    auto* ver = app.add_subcommand("verify", "Run a verification suite");
    add_common(ver, o);
    ver->add_option("--suite", o.suite, "marginal, locations, occupancy, patterns, limit-oracle, extremal-mstar or all");
    ver->add_option("--n", o.n, "Sample-size grid (comma list)")->delimiter(',');
    ver->add_option("--replicas", o.replicas, "Discrete-model runs");
    ver->add_option("--limit-replicas", o.limit_replicas, "Exact limit draws");
    ver->add_option("--query", o.query, "Query family JSON (file path or inline)");
    ver->add_option("--format", o.format, "csv or json")->capture_default_str();
    ver->add_option("--confidence", o.confidence, "0.95 or 0.99");
    ver->add_option("--ks-threshold", o.ks_threshold, "KS calibration threshold for M_n/b_n");
    ver->add_option("--star-ks-threshold", o.star_ks_threshold, "KS calibration threshold for the first-visit variant");
    ver->add_option("--repetitions", o.repetitions, "Harness repetitions for the KS trend");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (sim->parsed()) return cmd_simulate(o, out, err);
        if (lim->parsed()) return cmd_limit_sample(o, out, err);
        if (orc->parsed()) return cmd_oracle(o, out);
        return cmd_verify(o, out, err);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << '\n';
    } catch (const CapacityError& e) {
        err << "capacity error: " << e.what() << '\n';
    } catch (const json::exception& e) {
        err << "query error: " << e.what() << '\n';
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
    }
    return kExitUsage;
}

}  // namespace karlin::cli
