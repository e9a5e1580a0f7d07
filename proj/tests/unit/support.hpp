#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qthermo/lindblad.hpp"
#include "qthermo/pulse.hpp"
#include "qthermo/readout.hpp"

namespace qthermo::testing {

inline double max_abs_diff(const Populations &a, const Populations &b) {
    return std::max({std::abs(a.p_g - b.p_g), std::abs(a.p_e - b.p_e), std::abs(a.p_f - b.p_f)});
}

/// Default device with default dissipation, built once per process.
inline const LiouvillianSpec &default_engine() {
    static const LiouvillianSpec L = build_liouvillian(SystemSpec{}, DissipationSpec{});
    return L;
}

/// Default device with every rate zero.
inline const LiouvillianSpec &closed_engine() {
    static const LiouvillianSpec L = build_liouvillian(SystemSpec{}, DissipationSpec::none(150.0));
    return L;
}

/// Calibrated 56 ns pulses, tight tolerances.
inline const PulseSet &calibrated_pulses() {
    static const PulseSet p = [] {
        CalibrationOptions opts;
        opts.ode.rtol = 1e-10;
        opts.ode.atol = 1e-12;
        return calibrate_pulses(closed_engine(), 56.0, 56.0, 4.0, opts);
    }();
    return p;
}

/// Arbitrary but distinguishable response trio on the default window grid.
inline PureStateResponses synthetic_basis(int n = 350, double t0 = 100.0) {
    PureStateResponses b;
    IQTrace *ts[3] = {&b.phi_g, &b.phi_e, &b.phi_f};
    const double amp[3] = {1.0, 0.8, 0.55};
    const double ph[3] = {0.0, 0.9, 2.1};
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < n; ++i) {
            const double t = t0 + i;
            const double env = amp[k] * (1.0 - std::exp(-(t - t0 + 5.0) / (40.0 + 15.0 * k)));
            const double w = 2.0 * M_PI * 0.05 * t + ph[k];
            ts[k]->t_ns.push_back(t);
            ts[k]->i_vals.push_back(env * std::cos(w));
            ts[k]->q_vals.push_back(env * std::sin(w));
        }
    }
    b.phi_g.label = "g";
    b.phi_e.label = "e";
    b.phi_f.label = "f";
    return b;
}

/// Sum p_k phi_k for one population vector.
inline IQTrace mix(const PureStateResponses &b, const Populations &p, const std::string &label) {
    IQTrace out = b.phi_g;
    out.label = label;
    for (size_t i = 0; i < out.size(); ++i) {
        out.i_vals[i] = p.p_g * b.phi_g.i_vals[i] + p.p_e * b.phi_e.i_vals[i] + p.p_f * b.phi_f.i_vals[i];
        out.q_vals[i] = p.p_g * b.phi_g.q_vals[i] + p.p_e * b.phi_e.q_vals[i] + p.p_f * b.phi_f.q_vals[i];
    }
    return out;
}

/// Six traces from the ideal permutation of p.
inline std::vector<IQTrace> oracle_traces(const PureStateResponses &b, const Populations &p) {
    std::vector<IQTrace> out;
    for (const auto &label : sequence_labels()) out.push_back(mix(b, apply_sequence_ideal(p, compile_sequence(label)), label));
    return out;
}

}  // namespace qthermo::testing
