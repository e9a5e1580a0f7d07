#include "qthermo/pulse.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <tuple>

#include "qthermo/errors.hpp"

namespace qthermo {

namespace {

const double kPedestal = std::exp(-2.0);

int source_level(Transition t) { return t == Transition::GE ? 0 : 1; }

template <class F>
std::pair<double, double> golden_max(F f, double lo, double hi, double tol, int max_iter = 200) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
        if (f1 >= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 >= f2 ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

}  // namespace

PulseEnvelope PulseEnvelope::gaussian(double carrier_ghz, double amplitude, double duration_ns, double start_ns) {
    PulseEnvelope p;
    p.kind = PulseKind::GaussianDrive;
    p.carrier_ghz = carrier_ghz;
    p.amplitude = amplitude;
    p.duration_ns = duration_ns;
    p.sigma_ns = duration_ns / 4.0;
    p.start_ns = start_ns;
    p.validate();
    return p;
}

PulseEnvelope PulseEnvelope::probe(double carrier_ghz, double amplitude, double duration_ns, double start_ns) {
    PulseEnvelope p;
    p.kind = PulseKind::RectangularProbe;
    p.carrier_ghz = carrier_ghz;
    p.amplitude = amplitude;
    p.duration_ns = duration_ns;
    p.start_ns = start_ns;
    p.validate();
    return p;
}

double PulseEnvelope::shape(double t_ns) const {
    if (t_ns < start_ns || t_ns > end_ns()) return 0.0;
    if (kind == PulseKind::RectangularProbe) return 1.0;
    const double x = (t_ns - start_ns - 2.0 * sigma_ns) / sigma_ns;
    return std::max(0.0, (std::exp(-0.5 * x * x) - kPedestal) / (1.0 - kPedestal));
}

double PulseEnvelope::area_ns() const {
    if (kind == PulseKind::RectangularProbe) return duration_ns;
    const double gauss = sigma_ns * std::sqrt(2.0 * std::numbers::pi) * std::erf(std::numbers::sqrt2);
    return (gauss - 4.0 * sigma_ns * kPedestal) / (1.0 - kPedestal);
}

void PulseEnvelope::validate() const {
    if (!(duration_ns > 0.0) || !std::isfinite(duration_ns)) throw DomainError("pulse duration must be positive");
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw DomainError("pulse amplitude must be non-negative");
    if (!(carrier_ghz >= 0.0) || !std::isfinite(carrier_ghz)) throw DomainError("pulse carrier must be non-negative");
    if (!std::isfinite(start_ns)) throw DomainError("pulse start must be finite");
    if (kind == PulseKind::GaussianDrive && std::abs(duration_ns - 4.0 * sigma_ns) > 1e-9 * duration_ns) {
        throw DomainError("gaussian pulse duration must equal 4 sigma");
    }
}

std::string to_string(Transition t) { return t == Transition::GE ? "ge" : "ef"; }

Transition parse_transition(const std::string &s) {
    if (s == "ge") return Transition::GE;
    if (s == "ef") return Transition::EF;
    throw DomainError("unknown transition '" + s + "' (expected ge or ef)");
}

const std::array<std::string, 6> &sequence_labels() {
    static const std::array<std::string, 6> labels{"x0", "x1", "x2", "y0", "y1", "y2"};
    return labels;
}

GateSequence compile_sequence(const std::string &label) {
    using T = Transition;
    if (label == "x0") return {label, {}, {0, 1, 2}};
    if (label == "x1") return {label, {T::GE}, {1, 0, 2}};
    if (label == "x2") return {label, {T::GE, T::EF}, {1, 2, 0}};
    if (label == "y0") return {label, {T::EF}, {0, 2, 1}};
    if (label == "y1") return {label, {T::EF, T::GE}, {2, 0, 1}};
    if (label == "y2") return {label, {T::EF, T::GE, T::EF}, {2, 1, 0}};
    throw DomainError("unknown sequence label '" + label + "'");
}

Populations apply_sequence_ideal(const Populations &p, const GateSequence &seq) {
    const auto &m = seq.expected_permutation;
    return {p[m[0]], p[m[1]], p[m[2]]};
}

std::vector<PulseEnvelope> schedule(const GateSequence &seq, const PulseSet &pulses, double t_start) {
    std::vector<PulseEnvelope> out;
    double t = t_start;
    for (size_t i = 0; i < seq.gates.size(); ++i) {
        if (i > 0) t += pulses.guard_ns;
        PulseEnvelope p = pulses.get(seq.gates[i]);
        p.start_ns = t;
        out.push_back(p);
        t = p.end_ns();
    }
    return out;
}

double sequence_end(const GateSequence &seq, const PulseSet &pulses, double t_start) {
    const auto s = schedule(seq, pulses, t_start);
    return s.empty() ? t_start : s.back().end_ns();
}

double transfer_probability(const LiouvillianSpec &L, Transition t, const PulseEnvelope &pulse,
                            const OdeOptions &ode) {
    const int src = source_level(t);
    const auto &space = L.ops.space;
    const Eigen::VectorXcd psi0 = L.dressed.vectors.col(space.index(src, 0));
    const Eigen::VectorXcd psi = evolve_pure(psi0, L, {pulse}, pulse.start_ns, pulse.end_ns(), ode);
    double p = 0.0;
    for (int n = 0; n < space.fock_dim; ++n) {
        p += std::norm(L.dressed.vectors.col(space.index(src + 1, n)).dot(psi));
    }
    return p;
}

CalibrationReport calibrate_pi(const LiouvillianSpec &L, Transition t, double duration_ns,
                               const CalibrationOptions &opts) {
    if (!(duration_ns >= 40.0 && duration_ns <= 200.0)) {
        throw DomainError("pi-pulse duration must lie in [40, 200] ns");
    }
    if (opts.coarse_points < 4) throw DomainError("calibration needs at least 4 scan points");
    const int src = source_level(t);
    const double f0 = L.dressed_transition_ghz(src, src + 1);
    const Eigen::MatrixXd &n_op = L.transmon.charge_operator;
    const double element = n_op(src + 1, src) / n_op(1, 0);

    PulseEnvelope pulse = PulseEnvelope::gaussian(f0, 0.0, duration_ns);
    const double guess = 1.0 / (4.0 * pulse.area_ns() * element);

    CalibrationReport rep;
    rep.transition = t;
    auto transfer_at = [&](double amp, double det) {
        PulseEnvelope p = pulse;
        p.amplitude = amp;
        p.carrier_ghz = f0 + det;
        return transfer_probability(L, t, p, opts.ode);
    };

    const double a_max = 2.5 * guess;
    for (int i = 0; i < opts.coarse_points; ++i) {
        const double a = a_max * (i + 1) / opts.coarse_points;
        rep.scan.emplace_back(a, transfer_at(a, 0.0));
    }
    int peak = -1;
    for (int i = 0; i + 1 < opts.coarse_points; ++i) {
        const bool rising = i == 0 || rep.scan[i].second >= rep.scan[i - 1].second;
        if (rising && rep.scan[i].second > rep.scan[i + 1].second) {
            peak = i;
            break;
        }
    }
    auto diagnostics = [&]() {
        std::ostringstream os;
        os << " scan:";
        for (const auto &[a, p] : rep.scan) os << " (" << a << ", " << p << ")";
        return os.str();
    };
    if (peak < 0) throw CalibrationError("no Rabi maximum found for " + to_string(t) + diagnostics());

    double lo = peak > 0 ? rep.scan[peak - 1].first : 0.0;
    double hi = rep.scan[peak + 1].first;
    double amp = rep.scan[peak].first, det = 0.0, best = rep.scan[peak].second;
    double det_half = 0.5 / duration_ns;
    for (int round = 0; round < opts.rounds; ++round) {
        std::tie(amp, best) = golden_max([&](double a) { return transfer_at(a, det); }, lo, hi, 1e-9 * amp);
        if (opts.tune_frequency) {
            std::tie(det, best) =
                golden_max([&](double d) { return transfer_at(amp, d); }, det - det_half, det + det_half, 1e-9);
        }
        const double span = 0.02 * amp / (round + 1);
        lo = amp - span;
        hi = amp + span;
        det_half *= 0.25;
    }
    if (best < 0.99) {
        throw CalibrationError("pi-pulse calibration for " + to_string(t) + " reached transfer " +
                               std::to_string(best) + diagnostics());
    }
    rep.pulse = pulse;
    rep.pulse.amplitude = amp;
    rep.pulse.carrier_ghz = f0 + det;
    rep.detuning_ghz = det;
    rep.transfer_probability = best;
    return rep;
}

PulseSet calibrate_pulses(const LiouvillianSpec &L, double ge_duration_ns, double ef_duration_ns, double guard_ns,
                          const CalibrationOptions &opts, std::vector<CalibrationReport> *reports) {
    if (!(guard_ns >= 0.0)) throw DomainError("guard gap must be non-negative");
    const auto ge = calibrate_pi(L, Transition::GE, ge_duration_ns, opts);
    const auto ef = calibrate_pi(L, Transition::EF, ef_duration_ns, opts);
    if (reports) *reports = {ge, ef};
    return {ge.pulse, ef.pulse, guard_ns};
}

DensityMatrix apply_sequence_simulated(const DensityMatrix &rho, const GateSequence &seq, const LiouvillianSpec &L,
                                       const PulseSet &pulses, const OdeOptions &ode) {
    if (seq.gates.empty()) return rho;
    const auto drives = schedule(seq, pulses, 0.0);
    const auto traj = evolve(rho, L, drives, {0.0, drives.back().end_ns()}, ode);
    return traj.states.back();
}

}  // namespace qthermo
