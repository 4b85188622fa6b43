#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "cope/benchmarks.hpp"
#include "cope/config.hpp"
#include "cope/io.hpp"
#include "cope/mechanism.hpp"
#include "cope/numerics.hpp"
#include "cope/verify.hpp"
#include "cope/version.hpp"

namespace py = pybind11;
using namespace cope;

namespace {

CostTypeDistribution uniform(double lo, double hi) { return CostTypeDistribution::uniform(lo, hi); }

py::list payments(const PaymentRule& rule) {
    py::list out;
    for (const auto& p : rule) out.append(py::dict(py::arg("pi") = p.pi, py::arg("K") = p.K, py::arg("S") = p.S));
    return out;
}

// Runs an experiment from config text; returns the CSV rows as dicts.
py::list run(const std::string& config_text) {
    const auto cfg = parse_config_string(config_text);
    std::vector<ExperimentResult> results;
    {
        py::gil_scoped_release release;
        results = run_experiment(to_experiment_spec(cfg));
    }
    py::list out;
    for (const auto& r : to_rows(results))
        out.append(py::dict(py::arg("mechanism") = r.mechanism, py::arg("cost") = r.cost, py::arg("N") = r.n_agents,
                            py::arg("theta_dagger") = r.theta_dagger, py::arg("metric") = r.metric,
                            py::arg("mean") = r.mean, py::arg("se") = r.se, py::arg("n_trials") = r.n_trials));
    return out;
}

py::dict verify(const std::string& suite, std::uint64_t seed, int instances) {
    VerifyOptions opts;
    opts.seed = seed;
    if (instances > 0) opts.instances = instances;
    const auto rep = run_suite(suite, opts);
    py::list rows;
    for (const auto& r : rep.rows)
        rows.append(py::dict(py::arg("name") = r.name, py::arg("measured") = r.measured, py::arg("tolerance") = r.tolerance,
                             py::arg("pass") = r.pass, py::arg("gating") = r.gating, py::arg("detail") = r.detail));
    return py::dict(py::arg("suite") = rep.suite, py::arg("passed") = rep.all_pass(), py::arg("rows") = rows);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cost and prediction elicitation: mechanisms, benchmarks and simulation";
    m.attr("__version__") = kVersion;

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def(
        "solve_cubic",
        [](double a, double s) {
            const auto r = solve_cubic(a, s);
            return py::make_tuple(r.W, r.lambda);
        },
        py::arg("a"), py::arg("s"), "Positive root W of W^3 - a W^2 - s and lambda.");

    m.def(
        "effort_linear",
        [](const std::vector<double>& r, double var0, double lo, double hi) { return effort_linear(r, uniform(lo, hi), var0); },
        py::arg("reports"), py::arg("var0") = 1.0, py::arg("theta_lo") = 0.0, py::arg("theta_hi") = 1.0);
    m.def(
        "effort_quadratic",
        [](const std::vector<double>& r, double var0, double lo, double hi) {
            return effort_quadratic(r, uniform(lo, hi), var0);
        },
        py::arg("reports"), py::arg("var0") = 1.0, py::arg("theta_lo") = 0.0, py::arg("theta_hi") = 1.0);
    m.def(
        "payment_rule_linear",
        [](const std::vector<double>& r, double var0, double lo, double hi) {
            return payments(payment_rule_linear(r, uniform(lo, hi), var0));
        },
        py::arg("reports"), py::arg("var0") = 1.0, py::arg("theta_lo") = 0.0, py::arg("theta_hi") = 1.0);
    m.def(
        "payment_rule_quadratic",
        [](const std::vector<double>& r, double var0, double lo, double hi) {
            return payments(payment_rule_quadratic(r, uniform(lo, hi), var0));
        },
        py::arg("reports"), py::arg("var0") = 1.0, py::arg("theta_lo") = 0.0, py::arg("theta_hi") = 1.0);

    m.def(
        "centralized_efforts",
        [](const std::vector<double>& types, const std::string& cost, double var0) {
            return centralized_efforts(types, parse_cost(cost), var0).efforts;
        },
        py::arg("types"), py::arg("cost"), py::arg("var0") = 1.0);
    m.def(
        "homogeneous_contract",
        [](double td, int n, const std::string& cost, double var0) {
            const auto c = homogeneous_contract(td, n, parse_cost(cost), var0);
            return py::dict(py::arg("q_dagger") = c.q_dagger, py::arg("alpha") = c.alpha, py::arg("beta") = c.beta);
        },
        py::arg("theta_dagger"), py::arg("n_agents"), py::arg("cost"), py::arg("var0") = 1.0);

    m.def("run", &run, py::arg("config_text") = "", "Run an experiment described by INI text; returns result rows.");
    m.def("verify", &verify, py::arg("suite"), py::arg("seed") = VerifyOptions{}.seed, py::arg("instances") = 0);
    m.def("suite_names", &suite_names);
}
