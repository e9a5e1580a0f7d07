#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "qthermo/config.hpp"
#include "qthermo/error_lab.hpp"
#include "qthermo/errors.hpp"
#include "qthermo/pipeline.hpp"
#include "qthermo/report.hpp"

namespace qthermo::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    bool noiseless = false;
    std::string out;
    std::string quadratures;
    // estimate
    std::string trace_dir;
    std::optional<double> f_ge, f_gf;
    // montecarlo
    std::optional<int> runs;
    // sweep
    std::vector<double> bath_mk, flux;
};

RunConfig load(const Options &o) {
    RunConfig c = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.seed) c.pipeline.seed = *o.seed;
    c.montecarlo.spec.seed = c.pipeline.seed;
    c.pipeline.protocol.seed = c.pipeline.seed;
    if (o.noiseless) c.pipeline.noiseless = true;
    if (!o.quadratures.empty()) c.pipeline.protocol.quadratures = parse_quadratures(o.quadratures);
    c.output_dir = resolve_output_dir(o.out, c.output_dir);
    c.validate();
    return c;
}

std::string prepare_dir(const std::string &dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ResourceError("cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

std::string join(const std::string &dir, const std::string &name) { return (fs::path(dir) / name).string(); }

void write_traces(const std::string &dir, const std::vector<IQTrace> &traces) {
    for (const auto &t : traces) {
        std::ostringstream os;
        write_traces_csv(os, {t});
        write_text_file(join(dir, "trace_" + t.label + ".csv"), os.str());
    }
}

void print_estimate(std::ostream &out, const EstimateReport &rep) {
    out.precision(6);
    for (const auto &t : rep.temperatures) {
        out << "T_" << to_string(t.source) << " = " << t.t_mk << " mK  [" << t.t_ci95_mk.first << ", "
            << t.t_ci95_mk.second << "]  slope " << t.slope.value << (t.clamped ? "  (clamped)" : "") << '\n';
    }
    out << "consistency |C - A B| / C = " << rep.consistency << '\n';
    for (const auto &w : rep.warnings) out << "warning: " << w << '\n';
}

int cmd_simulate(const Options &o, std::ostream &out) {
    const RunConfig c = load(o);
    const auto dir = prepare_dir(c.output_dir);
    const auto r = run_pipeline(c.pipeline);
    write_traces(dir, r.traces);
    write_text_file(join(dir, "calibration.json"), calibration_json(r.system.calibration, r.system.pulses).dump(2));
    write_text_file(join(dir, "estimate.json"), estimate_json(r.estimate, c.pipeline.readout, c.pipeline.seed).dump(2));
    write_text_file(join(dir, "populations.json"), populations_json(r).dump(2));
    write_text_file(join(dir, "config.json"), dump_config(c));
    print_estimate(out, r.estimate);
    out << "wrote " << dir << '\n';
    return 0;
}

std::vector<IQTrace> read_trace_dir(const std::string &dir) {
    if (!fs::is_directory(dir)) throw ResourceError("trace directory '" + dir + "' does not exist");
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.rfind("trace_", 0) == 0 && e.path().extension() == ".csv") {
            files.push_back(e.path());
        }
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ResourceError("no trace_*.csv files in '" + dir + "'");
    std::vector<IQTrace> traces;
    for (const auto &f : files) {
        std::ifstream in(f);
        if (!in) throw ResourceError("cannot read '" + f.string() + "'");
        for (auto &t : read_traces_csv(in)) traces.push_back(std::move(t));
    }
    return traces;
}

int cmd_estimate(const Options &o, std::ostream &out) {
    const RunConfig c = load(o);
    LevelEnergies levels;
    if (o.f_ge.has_value() != o.f_gf.has_value()) throw ConfigError("--f-ge and --f-gf must be given together");
    if (o.f_ge) {
        levels = LevelEnergies::from_transitions(*o.f_ge, *o.f_gf);
        levels.validate();
    } else {
        const auto L = build_liouvillian(c.pipeline.system, c.pipeline.dissipation);
        levels = LevelEnergies::from_transitions(L.dressed_transition_ghz(0, 1), L.dressed_transition_ghz(0, 2));
    }
    const auto traces = read_trace_dir(o.trace_dir);
    std::vector<std::string> warnings;
    const auto rep = estimate_from_traces(traces, levels, c.pipeline.readout, c.pipeline.system.resonator,
                                          c.pipeline.protocol, &warnings);
    const auto dir = prepare_dir(c.output_dir);
    write_text_file(join(dir, "estimate.json"), estimate_json(rep, c.pipeline.readout, c.pipeline.seed).dump(2));
    for (const auto &w : warnings) out << "warning: " << w << '\n';
    print_estimate(out, rep);
    if (!rep.consistent) {
        out << "INCONSISTENT: difference pairs do not share one slope per coefficient\n";
        return 1;
    }
    return 0;
}

int cmd_montecarlo(const Options &o, std::ostream &out) {
    const RunConfig c = load(o);
    const auto dir = prepare_dir(c.output_dir);
    auto rep = slope_bias_study(c.montecarlo.spec, c.montecarlo.lambda_grid);
    const auto levels = LevelEnergies::from_transitions(c.montecarlo.f_ge_ghz, c.montecarlo.f_gf_ghz);
    temperature_discrepancy(rep, levels, c.montecarlo.t_grid_mk);
    {
        std::ostringstream os;
        write_bias_csv(os, rep);
        write_text_file(join(dir, "bias.csv"), os.str());
    }
    {
        std::ostringstream os;
        write_discrepancy_csv(os, rep);
        write_text_file(join(dir, "discrepancy.csv"), os.str());
    }
    write_text_file(join(dir, "bias.json"), bias_json(rep).dump(2));
    out.precision(6);
    for (const auto &p : rep.points) {
        out << "lambda " << p.lambda << ": mean fit " << p.mean_fit << " [" << p.ci_low << ", " << p.ci_high << "]\n";
    }

    const int runs = o.runs.value_or(c.montecarlo.repeated_runs);
    if (runs > 0) {
        const auto clean = run_pipeline(c.pipeline);
        const auto stats = repeated_measurement_stats(clean, c.pipeline, runs);
        std::ostringstream os;
        write_cdf_csv(os, stats);
        write_text_file(join(dir, "cdf.csv"), os.str());
        write_text_file(join(dir, "stats.json"), stats_json(stats).dump(2));
        for (int k = 0; k < 3; ++k) {
            out << "T_" << to_string(static_cast<Coefficient>(k)) << ": mean " << stats.coefficients[k].mean
                << " mK, std " << stats.coefficients[k].std << " mK\n";
        }
    }
    out << "wrote " << dir << '\n';
    return 0;
}

int cmd_sweep(const Options &o, std::ostream &out) {
    if (o.bath_mk.empty() == o.flux.empty()) throw ConfigError("sweep needs exactly one of --bath-mk or --flux");
    const RunConfig c = load(o);
    const auto dir = prepare_dir(c.output_dir);
    const bool bath = !o.bath_mk.empty();
    const auto &values = bath ? o.bath_mk : o.flux;
    std::optional<PulseSet> pulses;
    std::vector<CalibrationReport> reports;
    std::vector<SweepRow> rows;
    for (double v : values) {
        SweepRow row;
        row.control = v;
        try {
            PipelineConfig pc = c.pipeline;
            if (bath) {
                pc.dissipation.bath_t_mk = v;
            } else {
                pc.system.transmon.flux_quantum_fraction = v;
            }
            const auto sys = prepare_system(pc, bath ? pulses : std::nullopt, reports);
            if (bath && !pulses) {
                pulses = sys.pulses;
                reports = sys.calibration;
            }
            const auto r = run_pipeline(pc, sys);
            for (int k = 0; k < 3; ++k) {
                row.t_mk[k] = r.estimate.temperatures[k].t_mk;
                row.ci[k] = r.estimate.temperatures[k].t_ci95_mk;
            }
            row.consistency = r.estimate.consistency;
            row.ok = true;
        } catch (const Error &e) {
            row.error = e.what();
        }
        out << (bath ? "bath " : "flux ") << v << ": "
            << (row.ok ? "T_A " + std::to_string(row.t_mk[0]) + " T_B " + std::to_string(row.t_mk[1]) + " T_C " +
                             std::to_string(row.t_mk[2])
                       : "failed: " + row.error)
            << '\n';
        rows.push_back(row);
    }
    std::ostringstream os;
    write_sweep_csv(os, bath ? "bath_T_mK" : "flux", rows);
    write_text_file(join(dir, "sweep.csv"), os.str());
    out << "wrote " << dir << '\n';
    return 0;
}

int cmd_calibrate(const Options &o, std::ostream &out) {
    const RunConfig c = load(o);
    const auto dir = prepare_dir(c.output_dir);
    const auto L = build_liouvillian(c.pipeline.system, c.pipeline.dissipation);
    std::vector<CalibrationReport> reports;
    const auto pulses = calibrate_pulses(L, c.pipeline.pulses.pi_ge_duration_ns, c.pipeline.pulses.pi_ef_duration_ns,
                                         c.pipeline.pulses.guard_ns, c.pipeline.calibration, &reports);
    write_text_file(join(dir, "calibration.json"), calibration_json(reports, pulses).dump(2));
    out.precision(10);
    for (const auto &r : reports) {
        out << "pi_" << to_string(r.transition) << ": carrier " << r.pulse.carrier_ghz << " GHz, amplitude "
            << r.pulse.amplitude << " GHz, transfer " << r.transfer_probability << '\n';
    }
    return 0;
}

}  // namespace

std::string resolve_output_dir(const std::string &flag, const std::string &config_value) {
    if (!flag.empty()) return flag;
    if (const char *env = std::getenv("QTHERMO_OUT_DIR"); env && *env) return env;
    return config_value;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Three-level transmon thermometry toolkit"};
    app.require_subcommand(1);
    Options o;

    auto common = [&](CLI::App *sub) {
        sub->add_option("--config", o.config_path, "JSON config file");
        sub->add_option("--seed", o.seed, "Master seed");
        sub->add_flag("--noiseless", o.noiseless, "Skip readout noise");
        sub->add_option("--out", o.out, "Output directory");
        sub->add_option("--quadratures", o.quadratures, "Quadratures used in fits")
            ->check(CLI::IsMember({"I", "IQ"}));
    };
    auto *sim = app.add_subcommand("simulate", "Full pipeline: traces, calibration and estimate");
    common(sim);
    auto *est = app.add_subcommand("estimate", "Estimate temperature from trace files");
    common(est);
    est->add_option("--traces", o.trace_dir, "Directory holding trace_*.csv")->required();
    est->add_option("--f-ge", o.f_ge, "g-e transition frequency, GHz");
    est->add_option("--f-gf", o.f_gf, "g-f transition frequency, GHz");
    auto *mc = app.add_subcommand("montecarlo", "Slope bias study and repeated-measurement statistics");
    common(mc);
    mc->add_option("--runs", o.runs, "Repeated end-to-end runs (0 skips)")->check(CLI::NonNegativeNumber);
    auto *sw = app.add_subcommand("sweep", "Estimate over a list of bath temperatures or flux points");
    common(sw);
    sw->add_option("--bath-mk", o.bath_mk, "Bath temperatures, mK")->delimiter(',');
    sw->add_option("--flux", o.flux, "Flux points in units of the flux quantum")->delimiter(',');
    auto *cal = app.add_subcommand("calibrate", "Calibrate pi pulses only");
    common(cal);

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(o, out);
        if (est->parsed()) return cmd_estimate(o, out);
        if (mc->parsed()) return cmd_montecarlo(o, out);
        if (sw->parsed()) return cmd_sweep(o, out);
        if (cal->parsed()) return cmd_calibrate(o, out);
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace qthermo::cli
