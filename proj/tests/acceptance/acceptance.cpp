// Acceptance runner. Usage: qthermo_acceptance <1-8 | all>
// Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "qthermo/constants.hpp"
#include "qthermo/error_lab.hpp"
#include "qthermo/errors.hpp"
#include "qthermo/pipeline.hpp"
#include "qthermo/thermometry.hpp"

using namespace qthermo;

namespace {

// Tolerances.
constexpr double kRoundTripMk = 2.0;
constexpr double kNoisySigmas = 3.0;
constexpr int kNoisyRuns = 100;
constexpr double kAnchorA = 54.0, kAnchorATol = 1.0;
constexpr double kAnchorB = 161.0, kAnchorBTol = 2.0;
constexpr double kIdentityTol = 1e-12;
constexpr double kPairTol = 1e-10;
constexpr double kBoltzmannTol = 1e-6;
constexpr double kDetailedBalanceTol = 1e-12;
constexpr double kOpenTol = 0.01;
constexpr double kClosedTol = 1e-6;
constexpr double kTransferMin = 0.999;
constexpr double kBiasShiftA = 5.0, kBiasShiftATol = 3.0, kBiasShiftBC = 2.5;
constexpr double kBandLow = 5.0, kBandHigh = 25.0;
constexpr double kRobustMk = 1.0;

const LevelEnergies kWorking = LevelEnergies::from_transitions(6.74, 13.14);
const char *kNames[3] = {"A", "B", "C"};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string &what) {
        if (!ok) pass = false;
        detail << (ok ? "" : "!") << what << "; ";
    }
};

std::string fmt(double v, int prec = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

double max_abs_diff(const Populations &a, const Populations &b) {
    return std::max({std::abs(a.p_g - b.p_g), std::abs(a.p_e - b.p_e), std::abs(a.p_f - b.p_f)});
}

OdeOptions tight() {
    OdeOptions o;
    o.rtol = 1e-10;
    o.atol = 1e-12;
    return o;
}

// 1: full pipeline round trip at four bath temperatures.
void round_trip(Outcome &out) {
    PipelineConfig cfg;
    std::optional<PulseSet> pulses;
    std::vector<CalibrationReport> reports;
    for (double t : {50.0, 100.0, 150.0, 200.0}) {
        cfg.dissipation.bath_t_mk = t;
        cfg.noiseless = true;
        const auto sys = prepare_system(cfg, pulses, reports);
        if (!pulses) {
            pulses = sys.pulses;
            reports = sys.calibration;
        }
        const auto clean = run_pipeline(cfg, sys);
        for (int k = 0; k < 3; ++k) {
            const double got = clean.estimate.temperatures[k].t_mk;
            out.require(std::abs(got - t) <= kRoundTripMk, fmt(t) + "mK T_" + kNames[k] + "=" + fmt(got, 6));
        }

        PipelineConfig noisy = cfg;
        noisy.noiseless = false;
        const auto stats = repeated_measurement_stats(clean, noisy, kNoisyRuns);
        const auto traces = acquire(clean.outcomes, noisy.readout, noisy.seed + 1, 0, false);
        const auto rep = estimate_from_traces(traces, sys.levels, noisy.readout, noisy.system.resonator, noisy.protocol);
        for (int k = 0; k < 3; ++k) {
            const double got = rep.temperatures[k].t_mk;
            const double sd = stats.coefficients[k].std;
            out.require(std::abs(got - t) <= kNoisySigmas * sd,
                        fmt(t) + "mK noisy T_" + kNames[k] + "=" + fmt(got, 6) + " sd=" + fmt(sd, 3));
        }
    }
}

// 2: slope-to-temperature anchors.
void anchors(Outcome &out) {
    SlopeEstimate a;
    a.coefficient = Coefficient::A;
    a.value = 0.9936;
    const double ta = invert_temperature(a, LevelEnergies::from_transitions(5.7, 11.1)).t_mk;
    out.require(std::abs(ta - kAnchorA) <= kAnchorATol, "A anchor " + fmt(ta, 5) + " mK");
    SlopeEstimate b;
    b.coefficient = Coefficient::B;
    b.value = 0.1320;
    const double tb = invert_temperature(b, kWorking).t_mk;
    out.require(std::abs(tb - kAnchorB) <= kAnchorBTol, "B anchor " + fmt(tb, 5) + " mK");
}

// 3: C = A B on random triples and the nine pair slopes on exact responses.
void identities(Outcome &out) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    int n = 0;
    while (n < 10000) {
        double x = u(rng), y = u(rng), z = u(rng);
        const double s = x + y + z;
        const Populations p{x / s, y / s, z / s};
        if (std::abs(p.p_g - p.p_e) < 1e-3 || std::abs(p.p_g - p.p_f) < 1e-3) continue;
        const double a = coefficient_from_populations(p, Coefficient::A);
        const double b = coefficient_from_populations(p, Coefficient::B);
        const double c = coefficient_from_populations(p, Coefficient::C);
        worst = std::max(worst, std::abs(c - a * b));
        ++n;
    }
    out.require(worst <= kIdentityTol, "max |C - AB| " + fmt(worst, 3));

    // Three distinguishable responses on the readout window.
    PureStateResponses basis;
    IQTrace *phis[3] = {&basis.phi_g, &basis.phi_e, &basis.phi_f};
    const double amp[3] = {1.0, 0.8, 0.55}, phase[3] = {0.0, 1.9, 3.7};
    for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 350; ++i) {
            const double t = 100.0 + i;
            const double env = 1.0 - std::exp(-t / (20.0 + 15.0 * k));
            const auto z = amp[k] * env * std::polar(1.0, 2.0 * M_PI * 0.05 * t + phase[k]);
            phis[k]->t_ns.push_back(t);
            phis[k]->i_vals.push_back(z.real());
            phis[k]->q_vals.push_back(z.imag());
        }
    }
    const auto p0 = thermal_populations(kWorking, 163.0);
    std::map<std::string, Populations> pops;
    for (const auto &label : sequence_labels()) pops[label] = apply_sequence_ideal(p0, compile_sequence(label));
    const auto responses = SequenceResponses::from_traces(synthesize_traces(pops, basis));
    EstimateOptions opts;
    opts.n_bootstrap = 0;
    const auto rep = estimate_temperature(responses, kWorking, opts);
    double pair_err = 0.0;
    for (const auto &s : rep.pairs) {
        const double truth = coefficient_from_populations(p0, s.coefficient);
        pair_err = std::max(pair_err, std::abs(s.value - truth));
    }
    out.require(rep.pairs.size() == 9 && pair_err <= kPairTol, "pair slope error " + fmt(pair_err, 3));
}

// 4: drive-off steady state against Boltzmann; detailed balance of the rates.
void thermalization(Outcome &out) {
    for (double t : {50.0, 100.0, 200.0}) {
        SystemSpec sys;
        sys.resonator.coupling_ghz = 0.001;
        DissipationSpec d;
        d.bath_t_mk = t;
        const auto L = build_liouvillian(sys, d);
        const auto rho = steady_state(L);
        const auto pops = transmon_populations(L, rho.matrix());
        // Bare transmon levels, renormalized over g, e, f.
        const auto eig = diagonalize_transmon(sys.transmon);
        const auto levels = LevelEnergies::from_energies(eig.energies_ghz[0], eig.energies_ghz[1], eig.energies_ghz[2]);
        const auto boltz = thermal_populations(levels, t);
        const double err = max_abs_diff(pops.normalized(), boltz);
        out.require(err <= kBoltzmannTol, fmt(t) + "mK steady-state error " + fmt(err, 3));

        double db = 0.0;
        const std::pair<const char *, std::pair<int, int>> channels[] = {{"eg", {0, 1}}, {"fe", {1, 2}}};
        for (const auto &[name, lv] : channels) {
            double up = 0.0, down = 0.0;
            for (const auto &j : L.jumps) {
                if (j.name == std::string("up_") + name) up = j.rate_per_ns;
                if (j.name == std::string("down_") + name) down = j.rate_per_ns;
            }
            const double f = L.dressed_transition_ghz(lv.first, lv.second);
            db = std::max(db, std::abs(up / down - std::exp(-units::reduced_energy(f, t))));
        }
        double up = 0.0, down = 0.0;
        for (const auto &j : L.jumps) {
            if (j.name == "resonator_up") up = j.rate_per_ns;
            if (j.name == "resonator_down") down = j.rate_per_ns;
        }
        const auto &space = L.ops.space;
        const double fr = L.dressed.energies_ghz(space.index(0, 1)) - L.dressed.energies_ghz(space.index(0, 0));
        db = std::max(db, std::abs(up / down - std::exp(-units::reduced_energy(fr, t))));
        out.require(db <= kDetailedBalanceTol, fmt(t) + "mK detailed balance " + fmt(db, 3));
    }
}

// 5: sequence outcomes against ideal permutations.
void sequence_fidelity(Outcome &out) {
    PipelineConfig cfg;
    cfg.noiseless = true;
    const auto r = run_pipeline(cfg);
    double open = 0.0;
    for (const auto &o : r.outcomes) {
        open = std::max(open, max_abs_diff(o.populations, apply_sequence_ideal(r.initial_populations, compile_sequence(o.label))));
    }
    out.require(open <= kOpenTol, "open-system max error " + fmt(open, 3));

    const auto L = build_liouvillian(SystemSpec{}, DissipationSpec::none(150.0));
    CalibrationOptions c;
    c.ode = tight();
    std::vector<CalibrationReport> reports;
    const auto ps = calibrate_pulses(L, 56.0, 56.0, 4.0, c, &reports);
    for (const auto &rep : reports) {
        out.require(rep.transfer_probability >= kTransferMin,
                    "pi_" + to_string(rep.transition) + " transfer " + fmt(rep.transfer_probability, 6));
    }
    const auto p0 = thermal_populations(
        LevelEnergies::from_transitions(L.dressed_transition_ghz(0, 1), L.dressed_transition_ghz(0, 2)), 150.0);
    const auto rho0 = dressed_product_state(L, {p0.p_g, p0.p_e, p0.p_f});
    double closed = 0.0;
    for (const auto &label : sequence_labels()) {
        const auto seq = compile_sequence(label);
        const auto rho = apply_sequence_simulated(rho0, seq, L, ps, tight());
        closed = std::max(closed, max_abs_diff(transmon_populations(L, rho.matrix()), apply_sequence_ideal(p0, seq)));
    }
    out.require(closed <= kClosedTol, "closed-system max error " + fmt(closed, 3));
}

// 6: slope bias of the errors-in-variables fit and the resulting temperature shift.
void slope_bias(Outcome &out) {
    MonteCarloSpec spec;  // span 0.042, sigma 0.002, 1000 experiments
    auto rep = slope_bias_study(spec, {spec.true_slope});
    const auto &p = rep.points[0];
    out.require(p.mean_fit < p.lambda && p.ci_high < p.lambda,
                "mean fit " + fmt(p.mean_fit, 7) + " CI [" + fmt(p.ci_low, 7) + ", " + fmt(p.ci_high, 7) + "]");

    // Bias curve across the range so every coefficient at the working point
    // picks up its own interpolated bias.
    rep = slope_bias_study(spec, {0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.8834, 0.9, 0.95, 1.0});
    SlopeEstimate a;
    a.coefficient = Coefficient::A;
    a.value = spec.true_slope;
    const double t0 = invert_temperature(a, kWorking).t_mk;
    temperature_discrepancy(rep, kWorking, {t0});
    if (rep.discrepancy.empty()) {
        out.require(false, "discrepancy out of range");
        return;
    }
    const auto &dt = rep.discrepancy[0].dt_mk;
    out.require(std::abs(dt[0] - kBiasShiftA) <= kBiasShiftATol, "dT_A " + fmt(dt[0], 3) + " mK at " + fmt(t0, 5) + " mK");
    out.require(std::abs(dt[1]) <= kBiasShiftBC, "dT_B " + fmt(dt[1], 3));
    out.require(std::abs(dt[2]) <= kBiasShiftBC, "dT_C " + fmt(dt[2], 3));
}

// 7: spread of 100 noisy end-to-end runs.
void repeated(Outcome &out) {
    PipelineConfig cfg;
    cfg.noiseless = true;
    const auto clean = run_pipeline(cfg);
    cfg.noiseless = false;
    const auto st = repeated_measurement_stats(clean, cfg, 100);
    const double sa = st.coefficients[0].std, sb = st.coefficients[1].std;
    out.require(sa > sb, "std(T_A) " + fmt(sa, 3) + " vs std(T_B) " + fmt(sb, 3));
    out.require(sa >= kBandLow && sa <= kBandHigh, "std(T_A) in band");
    out.require(sb >= kBandLow && sb <= kBandHigh, "std(T_B) in band");
}

// 8: dephasing and an alternative response basis leave T unchanged.
void robustness(Outcome &out) {
    PipelineConfig cfg;
    cfg.noiseless = true;
    const auto base = run_pipeline(cfg);
    PipelineConfig deph = cfg;
    deph.dissipation.dephasing_mhz = 0.05;
    const auto dr = run_pipeline(deph);
    for (int k = 0; k < 3; ++k) {
        const double d = dr.estimate.temperatures[k].t_mk - base.estimate.temperatures[k].t_mk;
        out.require(std::abs(d) < kRobustMk, std::string("dephasing dT_") + kNames[k] + " " + fmt(d, 3));
    }

    // Rotate each pure-state response in the IQ plane by its own angle and
    // rescale it.
    const auto basis = base.system.kernel->pure_state_responses();
    PureStateResponses rotated = basis;
    IQTrace *phis[3] = {&rotated.phi_g, &rotated.phi_e, &rotated.phi_f};
    const double angle[3] = {0.4, 1.3, 2.2}, gain[3] = {0.9, 1.2, 0.7};
    for (int k = 0; k < 3; ++k) {
        for (size_t i = 0; i < phis[k]->size(); ++i) {
            const auto z = gain[k] * std::complex<double>(phis[k]->i_vals[i], phis[k]->q_vals[i]) * std::polar(1.0, angle[k]);
            phis[k]->i_vals[i] = z.real();
            phis[k]->q_vals[i] = z.imag();
        }
    }
    rotated.check_distinguishable(cfg.readout.distinguishability_threshold);
    std::map<std::string, Populations> pops;
    for (const auto &o : base.outcomes) pops[o.label] = o.populations;
    const auto lv = base.system.levels;
    const auto a = estimate_from_traces(synthesize_traces(pops, basis), lv, cfg.readout, cfg.system.resonator, cfg.protocol);
    const auto b = estimate_from_traces(synthesize_traces(pops, rotated), lv, cfg.readout, cfg.system.resonator, cfg.protocol);
    for (int k = 0; k < 3; ++k) {
        const double d = b.temperatures[k].t_mk - a.temperatures[k].t_mk;
        out.require(std::abs(d) < kRobustMk, std::string("rotated basis dT_") + kNames[k] + " " + fmt(d, 3));
    }
}

const std::map<int, std::pair<const char *, std::function<void(Outcome &)>>> kCriteria{
    {1, {"round-trip temperature recovery", round_trip}},
    {2, {"slope-to-temperature anchors", anchors}},
    {3, {"algebraic identities", identities}},
    {4, {"thermalization", thermalization}},
    {5, {"sequence fidelity", sequence_fidelity}},
    {6, {"slope bias", slope_bias}},
    {7, {"repeated-measurement statistics", repeated}},
    {8, {"robustness", robustness}},
};

bool run_one(int id) {
    const auto &[name, fn] = kCriteria.at(id);
    Outcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        fn(out);
    } catch (const std::exception &e) {
        out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << ", " << fmt(secs, 3)
              << " s): " << out.detail.str() << std::endl;
    return out.pass;
}

}  // namespace

int main(int argc, char **argv) {
    if (argc != 2) {
        std::cerr << "usage: qthermo_acceptance <1-8|all>\n";
        return 2;
    }
    const std::string arg = argv[1];
    if (arg == "all") {
        bool ok = true;
        for (const auto &[id, _] : kCriteria) ok = run_one(id) && ok;
        return ok ? 0 : 1;
    }
    int id = 0;
    try {
        id = std::stoi(arg);
    } catch (...) {
    }
    if (!kCriteria.count(id)) {
        std::cerr << "unknown criterion '" << arg << "'\n";
        return 2;
    }
    return run_one(id) ? 0 : 1;
}
