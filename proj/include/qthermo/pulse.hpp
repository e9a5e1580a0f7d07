#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "qthermo/envelope.hpp"
#include "qthermo/lindblad.hpp"

namespace qthermo {

enum class Transition { GE, EF };

std::string to_string(Transition t);
Transition parse_transition(const std::string &s);

struct GateSequence {
    std::string label;
    std::vector<Transition> gates;  // in application order
    /// Outcome population on level i is the initial population of level
    /// expected_permutation[i].
    std::array<int, 3> expected_permutation{0, 1, 2};
};

const std::array<std::string, 6> &sequence_labels();
GateSequence compile_sequence(const std::string &label);
Populations apply_sequence_ideal(const Populations &p, const GateSequence &seq);

struct PulseSet {
    PulseEnvelope pi_ge;
    PulseEnvelope pi_ef;
    double guard_ns = 4.0;

    const PulseEnvelope &get(Transition t) const { return t == Transition::GE ? pi_ge : pi_ef; }
};

/// Pulses of a sequence laid end to end from t_start, separated by the guard gap.
std::vector<PulseEnvelope> schedule(const GateSequence &seq, const PulseSet &pulses, double t_start = 0.0);
/// Time at which the last pulse ends (t_start when the sequence is empty).
double sequence_end(const GateSequence &seq, const PulseSet &pulses, double t_start = 0.0);

struct CalibrationOptions {
    int coarse_points = 32;
    int rounds = 2;
    bool tune_frequency = true;
    OdeOptions ode;
};

struct CalibrationReport {
    Transition transition = Transition::GE;
    PulseEnvelope pulse;
    double transfer_probability = 0.0;
    /// Carrier offset from the dressed transition frequency, GHz.
    double detuning_ghz = 0.0;
    std::vector<std::pair<double, double>> scan;  // (amplitude, transfer)
};

/// Closed-system population transfer of one pulse from the dressed source
/// level (g for GE, e for EF) with the resonator empty.
double transfer_probability(const LiouvillianSpec &L, Transition t, const PulseEnvelope &pulse,
                            const OdeOptions &ode = {});

/// Simulated Rabi calibration: coarse amplitude scan to the first maximum,
/// then alternating golden-section refinement of amplitude and carrier.
CalibrationReport calibrate_pi(const LiouvillianSpec &L, Transition t, double duration_ns,
                               const CalibrationOptions &opts = {});

PulseSet calibrate_pulses(const LiouvillianSpec &L, double ge_duration_ns, double ef_duration_ns,
                          double guard_ns = 4.0, const CalibrationOptions &opts = {},
                          std::vector<CalibrationReport> *reports = nullptr);

/// Evolves rho through the sequence with dissipation; returns the state at
/// sequence_end(seq, pulses).
DensityMatrix apply_sequence_simulated(const DensityMatrix &rho, const GateSequence &seq, const LiouvillianSpec &L,
                                       const PulseSet &pulses, const OdeOptions &ode = {});

}  // namespace qthermo
