#include "qthermo/report.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

#include "qthermo/errors.hpp"

namespace qthermo {

using nlohmann::json;

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json pops(const Populations &p) { return json{{"p_g", p.p_g}, {"p_e", p.p_e}, {"p_f", p.p_f}}; }

}  // namespace

json slope_json(const SlopeEstimate &s) {
    json j{{"coefficient", to_string(s.coefficient)},
           {"value", number(s.value)},
           {"ci95", {number(s.ci95.first), number(s.ci95.second)}},
           {"standard_error", number(s.standard_error)},
           {"residual_rms", number(s.residual_rms)},
           {"intercept", number(s.intercept)},
           {"ellipticity", number(s.ellipticity)}};
    if (s.direction) j["direction"] = to_string(*s.direction);
    return j;
}

json estimate_json(const EstimateReport &rep, const ReadoutConfig &readout, std::uint64_t seed) {
    json j;
    const char *keys[3] = {"T_A_mK", "T_B_mK", "T_C_mK"};
    json temps = json::object();
    for (int c = 0; c < 3; ++c) {
        const auto &t = rep.temperatures[c];
        j[keys[c]] = t.t_mk;
        temps[to_string(t.source)] = {{"T_mK", t.t_mk},
                                      {"T_ci95_mK", {t.t_ci95_mk.first, t.t_ci95_mk.second}},
                                      {"clamped", t.clamped},
                                      {"slope", slope_json(rep.combined[c])}};
    }
    j["temperatures"] = temps;
    json pairs = json::array();
    for (const auto &p : rep.pairs) pairs.push_back(slope_json(p));
    j["pairs"] = pairs;
    j["consistency"] = number(rep.consistency);
    j["consistent"] = rep.consistent;
    j["warnings"] = rep.warnings;
    j["n_points"] = rep.n_points;
    j["window_ns"] = {readout.window_start_ns, readout.window_end_ns};
    j["seed"] = seed;
    return j;
}

json calibration_json(const std::vector<CalibrationReport> &reports, const PulseSet &pulses) {
    json arr = json::array();
    for (const auto &r : reports) {
        json scan = json::array();
        for (const auto &[a, p] : r.scan) scan.push_back({a, p});
        arr.push_back({{"transition", to_string(r.transition)},
                       {"carrier_ghz", r.pulse.carrier_ghz},
                       {"amplitude_ghz", r.pulse.amplitude},
                       {"duration_ns", r.pulse.duration_ns},
                       {"detuning_ghz", r.detuning_ghz},
                       {"transfer_probability", r.transfer_probability},
                       {"scan", scan}});
    }
    return json{{"pulses", arr}, {"guard_ns", pulses.guard_ns}};
}

json stats_json(const RepeatedStats &stats) {
    json j{{"n_runs", stats.n_runs}, {"n_failed", stats.n_failed}, {"failures", stats.failures}};
    const char *names[3] = {"A", "B", "C"};
    for (int c = 0; c < 3; ++c) {
        const auto &s = stats.coefficients[c];
        j[names[c]] = {{"mean_mK", s.mean}, {"std_mK", s.std}, {"n", s.t_mk.size()}};
    }
    return j;
}

json bias_json(const MonteCarloReport &report) {
    json pts = json::array();
    for (const auto &p : report.points) {
        pts.push_back({{"lambda", p.lambda},
                       {"mean", number(p.mean_fit)},
                       {"ci95", {number(p.ci_low), number(p.ci_high)}},
                       {"sd", number(p.sd_fit)},
                       {"n_ok", p.n_ok},
                       {"n_failed", p.n_failed}});
    }
    json dis = json::array();
    for (const auto &d : report.discrepancy) {
        dis.push_back({{"T_mK", d.t_mk}, {"dT_A", d.dt_mk[0]}, {"dT_B", d.dt_mk[1]}, {"dT_C", d.dt_mk[2]}});
    }
    return json{{"points", pts},
                {"discrepancy", dis},
                {"skipped_out_of_range", report.skipped_out_of_range},
                {"n_experiments", report.spec.n_experiments},
                {"noise_sigma", report.spec.noise_sigma},
                {"x_span", report.spec.x_span}};
}

json populations_json(const SimulationResult &r) {
    json seqs = json::object();
    for (const auto &o : r.outcomes) {
        seqs[o.label] = {{"simulated", pops(o.populations)},
                         {"ideal", pops(apply_sequence_ideal(r.initial_populations, compile_sequence(o.label)))}};
    }
    return json{{"initial", pops(r.initial_populations)}, {"thermal", pops(r.thermal_populations)}, {"sequences", seqs}};
}

void write_sweep_csv(std::ostream &os, const std::string &control_name, const std::vector<SweepRow> &rows) {
    os << control_name << ",ok,T_A_mK,T_A_lo,T_A_hi,T_B_mK,T_B_lo,T_B_hi,T_C_mK,T_C_lo,T_C_hi,consistency,error\n";
    os.precision(10);
    for (const auto &r : rows) {
        os << r.control << ',' << (r.ok ? 1 : 0);
        for (int c = 0; c < 3; ++c) {
            if (r.ok) {
                os << ',' << r.t_mk[c] << ',' << r.ci[c].first << ',' << r.ci[c].second;
            } else {
                os << ",,,";
            }
        }
        os << ',';
        if (r.ok) os << r.consistency;
        os << ",\"";
        for (char ch : r.error) os << (ch == '"' ? '\'' : ch);
        os << "\"\n";
    }
}

void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ResourceError("cannot write '" + path + "'");
    out << text;
    if (!out) throw ResourceError("failed writing '" + path + "'");
}

}  // namespace qthermo
