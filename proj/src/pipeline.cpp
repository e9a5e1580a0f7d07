#include "qthermo/pipeline.hpp"

#include "qthermo/errors.hpp"
#include "qthermo/rng.hpp"

namespace qthermo {

void PipelineConfig::validate() const {
    system.validate();
    dissipation.validate(system.resonator);
    readout.validate();
    if (!(pulses.guard_ns >= 0.0)) throw ConfigError("pulses.guard_ns must be non-negative");
    if (!(protocol.delta > 0.0)) throw ConfigError("protocol.deming_delta must be positive");
    if (protocol.n_bootstrap < 0) throw ConfigError("protocol.n_bootstrap must be non-negative");
    if (!(protocol.max_ellipticity > 0.0)) throw ConfigError("protocol.max_ellipticity must be positive");
}

PreparedSystem prepare_system(const PipelineConfig &config, const std::optional<PulseSet> &pulses,
                              const std::vector<CalibrationReport> &reports) {
    config.validate();
    PreparedSystem sys;
    auto L = std::make_shared<LiouvillianSpec>(build_liouvillian(config.system, config.dissipation));
    sys.L = L;
    if (pulses) {
        sys.pulses = *pulses;
        sys.calibration = reports;
    } else {
        sys.pulses = calibrate_pulses(*L, config.pulses.pi_ge_duration_ns, config.pulses.pi_ef_duration_ns,
                                      config.pulses.guard_ns, config.calibration, &sys.calibration);
    }
    sys.kernel = std::make_shared<ReadoutKernel>(*L, config.readout);
    sys.levels = LevelEnergies::from_transitions(L->dressed_transition_ghz(0, 1), L->dressed_transition_ghz(0, 2));
    return sys;
}

std::vector<SequenceOutcome> run_sequences(const PreparedSystem &sys, const DensityMatrix &initial,
                                           const ReadoutConfig &readout, const OdeOptions &ode) {
    std::vector<SequenceOutcome> out;
    for (const auto &label : sequence_labels()) {
        const auto seq = compile_sequence(label);
        DensityMatrix rho = apply_sequence_simulated(initial, seq, *sys.L, sys.pulses, ode);
        if (readout.probe_delay_ns > 0.0) {
            rho = evolve(rho, *sys.L, {}, {0.0, readout.probe_delay_ns}, ode).states.back();
        }
        SequenceOutcome o;
        o.label = label;
        o.populations = transmon_populations(*sys.L, rho.matrix());
        o.clean_trace = sys.kernel->trace(rho, label);
        o.state = std::move(rho);
        out.push_back(std::move(o));
    }
    return out;
}

std::vector<IQTrace> acquire(const std::vector<SequenceOutcome> &outcomes, const ReadoutConfig &readout,
                             std::uint64_t seed, int run_index, bool noiseless) {
    std::vector<IQTrace> out;
    const auto &labels = sequence_labels();
    for (const auto &o : outcomes) {
        IQTrace t = o.clean_trace;
        if (!noiseless && readout.noise_sigma > 0.0) {
            std::uint64_t j = 0;
            while (j < labels.size() && labels[j] != o.label) ++j;
            t = add_noise(t, readout.noise_sigma, readout.n_averages,
                          stream_seed(seed, "noise", 6 * static_cast<std::uint64_t>(run_index) + j));
        }
        out.push_back(quantize(t));
    }
    return out;
}

std::vector<IQTrace> window_all(const std::vector<IQTrace> &traces, const ReadoutConfig &readout,
                                const ResonatorSpec &resonator, std::vector<std::string> *warnings) {
    std::vector<IQTrace> out;
    WindowDiagnostics diag;
    for (const auto &t : traces) out.push_back(window(t, readout, &resonator, &diag));
    if (warnings && !diag.warnings.empty()) warnings->push_back(diag.warnings.front());
    return out;
}

std::vector<IQTrace> synthesize_traces(const std::map<std::string, Populations> &populations,
                                       const PureStateResponses &basis) {
    std::vector<IQTrace> out;
    for (const auto &label : sequence_labels()) {
        const auto it = populations.find(label);
        if (it == populations.end()) throw DomainError("no populations for sequence " + label);
        const Populations &p = it->second;
        IQTrace t;
        t.label = label;
        t.t_ns = basis.phi_g.t_ns;
        t.i_vals.resize(t.t_ns.size());
        t.q_vals.resize(t.t_ns.size());
        for (size_t k = 0; k < t.t_ns.size(); ++k) {
            t.i_vals[k] = p.p_g * basis.phi_g.i_vals[k] + p.p_e * basis.phi_e.i_vals[k] + p.p_f * basis.phi_f.i_vals[k];
            t.q_vals[k] = p.p_g * basis.phi_g.q_vals[k] + p.p_e * basis.phi_e.q_vals[k] + p.p_f * basis.phi_f.q_vals[k];
        }
        out.push_back(std::move(t));
    }
    return out;
}

EstimateReport estimate_from_traces(const std::vector<IQTrace> &traces, const LevelEnergies &levels,
                                    const ReadoutConfig &readout, const ResonatorSpec &resonator,
                                    const EstimateOptions &opts, std::vector<std::string> *warnings) {
    const auto windowed = window_all(traces, readout, resonator, warnings);
    return estimate_temperature(SequenceResponses::from_traces(windowed), levels, opts);
}

SimulationResult run_pipeline(const PipelineConfig &config, const std::optional<PreparedSystem> &prepared) {
    SimulationResult r;
    r.system = prepared ? *prepared : prepare_system(config);
    const auto &L = *r.system.L;
    r.initial = steady_state(L);
    r.initial_populations = transmon_populations(L, r.initial.matrix());
    r.thermal_populations = thermal_populations(r.system.levels, config.dissipation.bath_t_mk);
    r.outcomes = run_sequences(r.system, r.initial, config.readout, config.calibration.ode);
    r.traces = acquire(r.outcomes, config.readout, config.seed, 0, config.noiseless);
    r.windowed = window_all(r.traces, config.readout, config.system.resonator, &r.warnings);
    EstimateOptions opts = config.protocol;
    opts.seed = config.seed;
    r.estimate = estimate_temperature(SequenceResponses::from_traces(r.windowed), r.system.levels, opts);
    for (const auto &w : r.estimate.warnings) r.warnings.push_back(w);
    return r;
}

}  // namespace qthermo
