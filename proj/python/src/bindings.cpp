#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qthermo/config.hpp"
#include "qthermo/deming.hpp"
#include "qthermo/error_lab.hpp"
#include "qthermo/errors.hpp"
#include "qthermo/pipeline.hpp"
#include "qthermo/pulse.hpp"
#include "qthermo/report.hpp"
#include "qthermo/thermometry.hpp"

namespace py = pybind11;
using namespace qthermo;

namespace {

// Results that already have a JSON form cross the boundary as JSON text;
// the Python side decodes them.
std::string run_config_json(const std::string &config_json) {
    const RunConfig c = parse_config(config_json);
    c.validate();
    const auto r = run_pipeline(c.pipeline);
    nlohmann::json j;
    j["estimate"] = estimate_json(r.estimate, c.pipeline.readout, c.pipeline.seed);
    j["populations"] = populations_json(r);
    j["calibration"] = calibration_json(r.system.calibration, r.system.pulses);
    j["warnings"] = r.warnings;
    return j.dump();
}

std::string estimate_from_arrays(const std::vector<std::tuple<std::string, std::vector<double>, std::vector<double>,
                                                              std::vector<double>>> &traces,
                                 double f_ge, double f_gf, const std::string &config_json) {
    const RunConfig c = parse_config(config_json);
    std::vector<IQTrace> ts;
    for (const auto &[label, t, i, q] : traces) ts.push_back({t, i, q, label});
    const auto levels = LevelEnergies::from_transitions(f_ge, f_gf);
    levels.validate();
    const auto rep = estimate_from_traces(ts, levels, c.pipeline.readout, c.pipeline.system.resonator,
                                          c.pipeline.protocol);
    return estimate_json(rep, c.pipeline.readout, c.pipeline.seed).dump();
}

std::string bias_study_json(const std::string &config_json) {
    const RunConfig c = parse_config(config_json);
    c.validate();
    auto rep = slope_bias_study(c.montecarlo.spec, c.montecarlo.lambda_grid);
    temperature_discrepancy(rep, LevelEnergies::from_transitions(c.montecarlo.f_ge_ghz, c.montecarlo.f_gf_ghz),
                            c.montecarlo.t_grid_mk);
    return bias_json(rep).dump();
}

}  // namespace

PYBIND11_MODULE(_qthermo, m) {
    m.doc() = "Three-level transmon thermometry";

    auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<TruncationError>(m, "TruncationError", base.ptr());
    py::register_exception<ResourceError>(m, "ResourceError", base.ptr());
    py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
    py::register_exception<IntegrationError>(m, "IntegrationError", base.ptr());
    py::register_exception<AmbiguityError>(m, "AmbiguityError", base.ptr());
    py::register_exception<SolveError>(m, "SolveError", base.ptr());
    py::register_exception<CalibrationError>(m, "CalibrationError", base.ptr());
    py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
    py::register_exception<FitError>(m, "FitError", base.ptr());
    py::register_exception<OutOfRangeError>(m, "OutOfRangeError", base.ptr());
    py::register_exception<GridMismatchError>(m, "GridMismatchError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    py::enum_<Coefficient>(m, "Coefficient").value("A", Coefficient::A).value("B", Coefficient::B).value("C", Coefficient::C);

    py::class_<LevelEnergies>(m, "LevelEnergies")
        .def_static("from_transitions", &LevelEnergies::from_transitions, py::arg("f_ge_ghz"), py::arg("f_gf_ghz"))
        .def_static("from_energies", &LevelEnergies::from_energies)
        .def_readonly("f_ge_ghz", &LevelEnergies::f_ge_ghz)
        .def_readonly("f_gf_ghz", &LevelEnergies::f_gf_ghz)
        .def_readonly("f_ef_ghz", &LevelEnergies::f_ef_ghz)
        .def_property_readonly("anharmonicity_ghz", &LevelEnergies::anharmonicity_ghz)
        .def("validate", &LevelEnergies::validate);

    py::class_<Populations>(m, "Populations")
        .def(py::init([](double g, double e, double f) { return Populations{g, e, f}; }), py::arg("p_g"),
             py::arg("p_e"), py::arg("p_f"))
        .def_readwrite("p_g", &Populations::p_g)
        .def_readwrite("p_e", &Populations::p_e)
        .def_readwrite("p_f", &Populations::p_f)
        .def("sum", &Populations::sum)
        .def("normalized", &Populations::normalized)
        .def("as_tuple", [](const Populations &p) { return py::make_tuple(p.p_g, p.p_e, p.p_f); })
        .def("__repr__", [](const Populations &p) {
            return "Populations(" + std::to_string(p.p_g) + ", " + std::to_string(p.p_e) + ", " + std::to_string(p.p_f) + ")";
        });

    m.def("thermal_populations", &thermal_populations, py::arg("levels"), py::arg("t_mk"));
    m.def("sequence_labels", &sequence_labels);
    m.def(
        "apply_sequence_ideal",
        [](const Populations &p, const std::string &label) { return apply_sequence_ideal(p, compile_sequence(label)); },
        py::arg("populations"), py::arg("label"));
    m.def(
        "sequence_gates",
        [](const std::string &label) {
            std::vector<std::string> out;
            for (auto t : compile_sequence(label).gates) out.push_back(to_string(t));
            return out;
        },
        py::arg("label"));

    m.def("coefficient_from_populations", &coefficient_from_populations, py::arg("populations"), py::arg("which"));
    m.def("coefficient_vs_temperature", &coefficient_vs_temperature, py::arg("levels"), py::arg("t_mk"),
          py::arg("which"));
    m.def(
        "invert_temperature",
        [](double value, Coefficient which, const LevelEnergies &levels, bool clamp) {
            SlopeEstimate s;
            s.coefficient = which;
            s.value = value;
            InversionOptions o;
            o.clamp = clamp;
            return invert_temperature(s, levels, o).t_mk;
        },
        py::arg("value"), py::arg("which"), py::arg("levels"), py::arg("clamp") = false);

    py::class_<DemingFit>(m, "DemingFit")
        .def_readonly("slope", &DemingFit::slope)
        .def_readonly("intercept", &DemingFit::intercept)
        .def_readonly("n_points", &DemingFit::n_points)
        .def_readonly("slope_ci95", &DemingFit::slope_ci95)
        .def_readonly("slope_se", &DemingFit::slope_se)
        .def_readonly("residual_rms", &DemingFit::residual_rms)
        .def_readonly("ellipticity", &DemingFit::ellipticity)
        .def_readonly("degenerate", &DemingFit::degenerate);
    m.def(
        "deming_fit",
        [](const std::vector<double> &xs, const std::vector<double> &ys, double delta, int n_bootstrap,
           std::uint64_t seed) {
            DemingOptions o;
            o.delta = delta;
            o.n_bootstrap = n_bootstrap;
            o.seed = seed;
            return deming_fit(xs, ys, o);
        },
        py::arg("xs"), py::arg("ys"), py::arg("delta") = 1.0, py::arg("n_bootstrap") = 1000, py::arg("seed") = 0);

    m.def("default_config_json", [] { return dump_config(RunConfig{}); });
    m.def("normalize_config_json", [](const std::string &s) { return dump_config(parse_config(s)); });
    m.def("_run_pipeline", &run_config_json, py::arg("config_json"), py::call_guard<py::gil_scoped_release>());
    m.def("_estimate", &estimate_from_arrays, py::arg("traces"), py::arg("f_ge_ghz"), py::arg("f_gf_ghz"),
          py::arg("config_json"), py::call_guard<py::gil_scoped_release>());
    m.def("_bias_study", &bias_study_json, py::arg("config_json"), py::call_guard<py::gil_scoped_release>());
}
