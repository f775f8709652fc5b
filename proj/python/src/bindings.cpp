#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "karlin/choquet_oracle.hpp"
#include "karlin/distributions.hpp"
#include "karlin/error.hpp"
#include "karlin/karlin_sim.hpp"
#include "karlin/limit_sim.hpp"
#include "karlin/parallel.hpp"
#include "karlin/verify.hpp"

namespace py = pybind11;
using namespace karlin;

namespace {

using Pairs = std::vector<std::pair<double, double>>;

IntervalSet make_set(const Pairs& pairs, std::pair<double, double> carrier) {
    std::vector<Interval> raw;
    for (const auto& [lo, hi] : pairs) raw.push_back({lo, hi});
    return IntervalSet::normalize(std::move(raw), Carrier{carrier.first, carrier.second});
}

ChoquetQuery make_query(const std::vector<IntervalSet>& sets, const std::vector<double>& z, double alpha,
                        double beta) {
    if (sets.size() != z.size()) throw DomainError("query: sets and z differ in length");
    ChoquetQuery q;
    for (std::size_t i = 0; i < sets.size(); ++i) q.terms.push_back({sets[i], z[i]});
    q.alpha = alpha;
    q.beta = beta;
    return q;
}

py::array_t<double> limit_sample(const std::vector<IntervalSet>& family, double alpha, double beta,
                                 std::uint64_t replicas, std::uint64_t seed, const std::string& variant,
                                 unsigned threads) {
    if (variant != "karlin" && variant != "mstar") throw DomainError("variant must be karlin or mstar");
    std::vector<LimitSample> draws;
    {
        py::gil_scoped_release release;
        draws = parallel_map<LimitSample>(replicas, threads, [&](std::uint64_t r) {
            Rng rng(StreamKey{seed, r});
            return variant == "karlin" ? sample_on_window(rng, alpha, beta, family)
                                       : sample_mstar(rng, alpha, beta, family);
        });
    }
    py::array_t<double> out({static_cast<py::ssize_t>(replicas), static_cast<py::ssize_t>(family.size())});
    auto view = out.mutable_unchecked<2>();
    for (std::size_t r = 0; r < draws.size(); ++r)
        for (std::size_t i = 0; i < family.size(); ++i) view(r, i) = draws[r].values[i];
    return out;
}

py::dict suite(const std::string& name, double beta, std::uint64_t seed, unsigned threads, const py::kwargs& kw) {
    auto cfg = SuiteConfig::defaults(name);
    cfg.beta = beta;
    cfg.seed = seed;
    cfg.threads = threads;
    for (const auto& [key, value] : kw) {
        const auto k = key.cast<std::string>();
        if (k == "alpha") cfg.alpha = value.cast<double>();
        else if (k == "n_grid") cfg.n_grid = value.cast<std::vector<std::uint64_t>>();
        else if (k == "replicas") cfg.replicas = value.cast<std::uint64_t>();
        else if (k == "limit_replicas") cfg.limit_replicas = value.cast<std::uint64_t>();
        else if (k == "family") cfg.family = value.cast<std::vector<IntervalSet>>();
        else if (k == "confidence") cfg.confidence = value.cast<double>();
        else if (k == "ks_threshold") cfg.ks_threshold = value.cast<double>();
        else if (k == "star_ks_threshold") cfg.star_ks_threshold = value.cast<double>();
        else if (k == "repetitions") cfg.repetitions = value.cast<std::size_t>();
        else throw DomainError("unknown suite option '" + k + "'");
    }
    cfg.validate();
    SuiteReport report;
    {
        py::gil_scoped_release release;
        report = run_suite(cfg);
    }
    py::list rows;
    for (const auto& r : report.rows) {
        py::dict d;
        d["check"] = r.check;
        d["estimate"] = r.estimate;
        d["target"] = r.target;
        d["se_or_crit"] = r.se_or_crit;
        d["pass"] = r.pass;
        d["n"] = r.n;
        d["replicas"] = r.replicas;
        rows.append(d);
    }
    std::ostringstream csv;
    write_csv(csv, report);
    py::dict out;
    out["suite"] = report.suite;
    out["seed"] = report.seed;
    out["all_pass"] = report.all_pass();
    out["rows"] = rows;
    out["csv"] = csv.str();
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Karlin random sup-measures: simulation, exact limit sampling and closed forms";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);

    py::class_<IntervalSet>(m, "IntervalSet")
        .def(py::init(&make_set), py::arg("intervals"), py::arg("carrier") = std::pair{0.0, 1.0})
        .def_property_readonly("intervals",
                               [](const IntervalSet& s) {
                                   Pairs out;
                                   for (const auto& iv : s.intervals()) out.emplace_back(iv.lo, iv.hi);
                                   return out;
                               })
        .def_property_readonly("carrier",
                               [](const IntervalSet& s) { return std::pair{s.carrier().lo, s.carrier().hi}; })
        .def("lebesgue", &IntervalSet::lebesgue)
        .def("__contains__", &IntervalSet::contains)
        .def("__or__", &set_union)
        .def("__and__", &set_intersection)
        .def("__sub__", &set_difference)
        .def("__eq__", [](const IntervalSet& a, const IntervalSet& b) { return a == b; })
        .def("__repr__", [](const IntervalSet& s) {
            std::ostringstream os;
            os << "IntervalSet([";
            for (std::size_t i = 0; i < s.size(); ++i)
                os << (i ? ", " : "") << '(' << s.intervals()[i].lo << ", " << s.intervals()[i].hi << ')';
            os << "])";
            return os.str();
        });

    py::implicitly_convertible<py::list, IntervalSet>();

    m.def("riemann_zeta", &riemann_zeta, py::arg("s"));
    m.def("qbeta_pmf", &qbeta_pmf, py::arg("k"), py::arg("beta"));
    m.def("qbeta_tail", &qbeta_tail, py::arg("k"), py::arg("beta"));
    m.def("qbeta_quantile", &qbeta_quantile, py::arg("u"), py::arg("beta"));
    m.def(
        "frechet_cdf", [](double z, double alpha, double sigma) { return frechet_cdf(z, FrechetLaw{alpha, sigma}); },
        py::arg("z"), py::arg("alpha") = 1.0, py::arg("sigma") = 1.0);

    m.def("theta", &theta, py::arg("set"), py::arg("beta"));
    m.def(
        "tail_dependence",
        [](const std::vector<IntervalSet>& sets, const std::vector<double>& z, double alpha, double beta) {
            return tail_dependence(make_query(sets, z, alpha, beta));
        },
        py::arg("sets"), py::arg("z"), py::arg("alpha"), py::arg("beta"));
    m.def(
        "joint_cdf",
        [](const std::vector<IntervalSet>& sets, const std::vector<double>& z, double alpha, double beta) {
            return joint_cdf(make_query(sets, z, alpha, beta));
        },
        py::arg("sets"), py::arg("z"), py::arg("alpha"), py::arg("beta"));
    m.def(
        "extremal_cdf",
        [](const std::vector<double>& t, const std::vector<double>& levels, double alpha, double beta) {
            return extremal_cdf(t, levels, alpha, beta);
        },
        py::arg("times"), py::arg("levels"), py::arg("alpha"), py::arg("beta"));
    m.def("tau_z", &tau_z, py::arg("t"), py::arg("z"), py::arg("alpha"), py::arg("beta"));
    m.def(
        "pattern_limit",
        [](const std::vector<IntervalSet>& family, const std::vector<int>& delta, double beta) {
            return pattern_limit(PatternQuery{family, delta}, beta);
        },
        py::arg("family"), py::arg("delta"), py::arg("beta"));
    m.def("mstar_theta", &mstar_theta, py::arg("a"), py::arg("b"), py::arg("beta"));

    py::class_<SimRun>(m, "SimRun")
        .def_property_readonly("n", &SimRun::n)
        .def_property_readonly("k_n", &SimRun::k_n)
        .def_property_readonly("b_n", &SimRun::b_n)
        .def("occupancy_histogram", &SimRun::occupancy_histogram)
        .def("values",
             [](const SimRun& run) {
                 std::vector<double> v(run.n());
                 for (std::uint64_t i = 1; i <= run.n(); ++i) v[i - 1] = run.value_at(i);
                 return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
             })
        .def(
            "top",
            [](const SimRun& run, std::size_t m) {
                py::list out;
                for (const auto& t : top_m(run, m)) {
                    std::vector<double> pos;
                    for (std::size_t j = 0; j < t.locations.size(); ++j) pos.push_back(t.position(j));
                    py::dict d;
                    d["rank"] = t.rank;
                    d["value"] = t.value;
                    d["value_normalized"] = t.value_normalized;
                    d["label"] = t.label;
                    d["positions"] = pos;
                    out.append(d);
                }
                return out;
            },
            py::arg("m") = 5)
        .def(
            "sup", [](const SimRun& run, const IntervalSet& s) { return empirical_sup(run, s).normalized; },
            py::arg("set"))
        .def(
            "star_sup", [](const SimRun& run, const IntervalSet& s) { return variant_star_sup(run, s).normalized; },
            py::arg("set"))
        .def(
            "pattern_count",
            [](const SimRun& run, const std::vector<IntervalSet>& family, const std::vector<int>& delta) {
                return pattern_counts(run, family, delta);
            },
            py::arg("family"), py::arg("delta"));

    m.def(
        "simulate",
        [](std::uint64_t n, double beta, double alpha, std::uint64_t seed, std::uint64_t stream) {
            const HeavyTailSpec spec{alpha, 1.0, MarkLaw::pareto};
            spec.validate();
            const ZetaFrequencyModel model(beta);
            py::gil_scoped_release release;
            return simulate(model, spec, n, StreamKey{seed, stream});
        },
        py::arg("n"), py::arg("beta"), py::arg("alpha") = 1.0, py::arg("seed") = 0, py::arg("stream") = 0);

    m.def("limit_sample", &limit_sample, py::arg("family"), py::arg("alpha"), py::arg("beta"),
          py::arg("replicas") = 1000, py::arg("seed") = 0, py::arg("variant") = "karlin", py::arg("threads") = 0);

    m.def("suite_names", &suite_names);
    m.def("run_suite", &suite, py::arg("name"), py::arg("beta") = 0.5, py::arg("seed") = 42, py::arg("threads") = 0);
}
