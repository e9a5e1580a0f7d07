#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qthermo/lindblad.hpp"
#include "qthermo/pulse.hpp"
#include "qthermo/readout.hpp"
#include "qthermo/thermometry.hpp"

namespace qthermo {

struct PulseConfig {
    double pi_ge_duration_ns = 56.0;
    double pi_ef_duration_ns = 56.0;
    double guard_ns = 4.0;
};

struct PipelineConfig {
    SystemSpec system;
    DissipationSpec dissipation;
    ReadoutConfig readout;
    PulseConfig pulses;
    CalibrationOptions calibration;
    EstimateOptions protocol;
    std::uint64_t seed = 0;
    bool noiseless = false;

    void validate() const;
};

/// Engine, calibrated pulses and readout kernel for one parameter point.
struct PreparedSystem {
    std::shared_ptr<const LiouvillianSpec> L;
    PulseSet pulses;
    std::vector<CalibrationReport> calibration;
    std::shared_ptr<const ReadoutKernel> kernel;
    LevelEnergies levels;
};

/// Calibration only depends on the Hamiltonian, so pulses from an earlier
/// point with the same system block can be passed in and reused.
PreparedSystem prepare_system(const PipelineConfig &config, const std::optional<PulseSet> &pulses = std::nullopt,
                              const std::vector<CalibrationReport> &reports = {});

struct SequenceOutcome {
    std::string label;
    DensityMatrix state;      // at probe start
    Populations populations;  // dressed
    IQTrace clean_trace;      // full probe record, noiseless
};

/// Runs the six sequences from the initial state, then the probe delay.
std::vector<SequenceOutcome> run_sequences(const PreparedSystem &sys, const DensityMatrix &initial,
                                           const ReadoutConfig &readout, const OdeOptions &ode = {});

/// Adds noise (unless noiseless) and rounds to the file precision.
/// Noise for sequence j of run r uses stream "noise", index 6 r + j.
std::vector<IQTrace> acquire(const std::vector<SequenceOutcome> &outcomes, const ReadoutConfig &readout,
                             std::uint64_t seed, int run_index, bool noiseless);

std::vector<IQTrace> window_all(const std::vector<IQTrace> &traces, const ReadoutConfig &readout,
                                const ResonatorSpec &resonator, std::vector<std::string> *warnings = nullptr);

/// Noiseless traces sum_k p_k phi_k built from populations and a response trio.
std::vector<IQTrace> synthesize_traces(const std::map<std::string, Populations> &populations,
                                       const PureStateResponses &basis);

struct SimulationResult {
    PreparedSystem system;
    DensityMatrix initial;
    Populations initial_populations;
    Populations thermal_populations;  // Boltzmann at the bath temperature
    std::vector<SequenceOutcome> outcomes;
    std::vector<IQTrace> traces;  // as written to disk
    std::vector<IQTrace> windowed;
    EstimateReport estimate;
    std::vector<std::string> warnings;
};

SimulationResult run_pipeline(const PipelineConfig &config, const std::optional<PreparedSystem> &prepared = std::nullopt);

/// Estimate from six labelled traces (windowing applied here).
EstimateReport estimate_from_traces(const std::vector<IQTrace> &traces, const LevelEnergies &levels,
                                    const ReadoutConfig &readout, const ResonatorSpec &resonator,
                                    const EstimateOptions &opts, std::vector<std::string> *warnings = nullptr);

}  // namespace qthermo
