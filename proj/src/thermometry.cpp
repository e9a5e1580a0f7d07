#include "qthermo/thermometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qthermo/constants.hpp"
#include "qthermo/errors.hpp"
#include "qthermo/rng.hpp"

namespace qthermo {

namespace {

struct PairSpec {
    Coefficient c;
    Direction d;
    const char *num_a, *num_b, *den_a, *den_b;
};

// numerator = slope * denominator
constexpr PairSpec kPairs[9] = {
    {Coefficient::A, Direction::GE, "x0", "x1", "y0", "y1"},
    {Coefficient::A, Direction::GF, "y0", "x2", "x0", "y2"},
    {Coefficient::A, Direction::EF, "y1", "y2", "x1", "x2"},
    {Coefficient::B, Direction::GF, "x1", "y1", "y0", "x2"},
    {Coefficient::B, Direction::GE, "x2", "y2", "x0", "x1"},
    {Coefficient::B, Direction::EF, "x0", "y0", "y1", "y2"},
    {Coefficient::C, Direction::GF, "x1", "y1", "x0", "y2"},
    {Coefficient::C, Direction::GE, "x2", "y2", "y0", "y1"},
    {Coefficient::C, Direction::EF, "x0", "y0", "x1", "x2"},
};

constexpr double kGuardLowMk = 0.1;
constexpr double kGuardHighMk = 1e4;

std::vector<double> difference(const IQTrace &a, const IQTrace &b, Quadratures q) {
    std::vector<double> out;
    out.reserve(2 * a.size());
    for (size_t k = 0; k < a.size(); ++k) out.push_back(a.i_vals[k] - b.i_vals[k]);
    if (q == Quadratures::IQ) {
        for (size_t k = 0; k < a.size(); ++k) out.push_back(a.q_vals[k] - b.q_vals[k]);
    }
    return out;
}

bool decreasing(Coefficient c) { return c == Coefficient::A; }

}  // namespace

std::string to_string(Coefficient c) {
    switch (c) {
        case Coefficient::A:
            return "A";
        case Coefficient::B:
            return "B";
        default:
            return "C";
    }
}

std::string to_string(Direction d) {
    switch (d) {
        case Direction::GE:
            return "ge";
        case Direction::GF:
            return "gf";
        default:
            return "ef";
    }
}

std::string to_string(Quadratures q) { return q == Quadratures::I ? "I" : "IQ"; }

Coefficient parse_coefficient(const std::string &s) {
    if (s == "A") return Coefficient::A;
    if (s == "B") return Coefficient::B;
    if (s == "C") return Coefficient::C;
    throw DomainError("unknown coefficient '" + s + "'");
}

Quadratures parse_quadratures(const std::string &s) {
    if (s == "I") return Quadratures::I;
    if (s == "IQ") return Quadratures::IQ;
    throw DomainError("unknown quadrature mode '" + s + "' (expected I or IQ)");
}

const IQTrace &SequenceResponses::get(const std::string &label) const {
    if (label == "x0") return x0;
    if (label == "x1") return x1;
    if (label == "x2") return x2;
    if (label == "y0") return y0;
    if (label == "y1") return y1;
    if (label == "y2") return y2;
    throw DomainError("unknown sequence label '" + label + "'");
}

void SequenceResponses::validate() const {
    for (const IQTrace *t : {&x0, &x1, &x2, &y0, &y1, &y2}) {
        t->validate();
        if (t->size() != x0.size()) throw GridMismatchError("sequence traces differ in length");
        for (size_t k = 0; k < t->size(); ++k) {
            if (std::abs(t->t_ns[k] - x0.t_ns[k]) > 1e-9) {
                throw GridMismatchError("sequence traces have different time grids");
            }
        }
    }
    if (x0.size() == 0) throw GridMismatchError("sequence traces are empty");
}

SequenceResponses SequenceResponses::from_traces(const std::vector<IQTrace> &traces) {
    SequenceResponses r;
    IQTrace *slots[6] = {&r.x0, &r.x1, &r.x2, &r.y0, &r.y1, &r.y2};
    const char *labels[6] = {"x0", "x1", "x2", "y0", "y1", "y2"};
    for (int k = 0; k < 6; ++k) {
        int found = 0;
        for (const auto &t : traces) {
            if (t.label == labels[k]) {
                *slots[k] = t;
                ++found;
            }
        }
        if (found == 0) throw DomainError(std::string("missing trace for sequence ") + labels[k]);
        if (found > 1) throw DomainError(std::string("duplicate traces for sequence ") + labels[k]);
    }
    for (const auto &t : traces) {
        if (std::find(std::begin(labels), std::end(labels), t.label) == std::end(labels)) {
            throw DomainError("unexpected trace label '" + t.label + "'");
        }
    }
    r.validate();
    return r;
}

std::vector<DifferencePair> difference_pairs(const SequenceResponses &r, Quadratures q) {
    r.validate();
    std::vector<DifferencePair> out;
    for (const auto &p : kPairs) {
        DifferencePair d;
        d.coefficient = p.c;
        d.direction = p.d;
        d.numerator = std::string(p.num_a) + "-" + p.num_b;
        d.denominator = std::string(p.den_a) + "-" + p.den_b;
        d.ys = difference(r.get(p.num_a), r.get(p.num_b), q);
        d.xs = difference(r.get(p.den_a), r.get(p.den_b), q);
        out.push_back(std::move(d));
    }
    return out;
}

double coefficient_from_populations(const Populations &p, Coefficient which) {
    double num = 0.0, den = 0.0;
    switch (which) {
        case Coefficient::A:
            num = p.p_g - p.p_e;
            den = p.p_g - p.p_f;
            break;
        case Coefficient::B:
            num = p.p_e - p.p_f;
            den = p.p_g - p.p_e;
            break;
        case Coefficient::C:
            num = p.p_e - p.p_f;
            den = p.p_g - p.p_f;
            break;
    }
    if (!(std::abs(den) > 1e-12)) {
        throw DegenerateError("coefficient " + to_string(which) + " undefined: denominator vanishes");
    }
    return num / den;
}

double coefficient_vs_temperature(const LevelEnergies &levels, double t_mk, Coefficient which) {
    if (!(t_mk >= kGuardLowMk && t_mk <= kGuardHighMk)) {
        std::ostringstream os;
        os << "temperature " << t_mk << " mK outside the guard range [" << kGuardLowMk << ", " << kGuardHighMk
           << "] mK";
        throw DomainError(os.str());
    }
    // 1 - r = -expm1(-x) keeps precision where r -> 1 or r -> 0.
    const double x1 = units::reduced_energy(levels.f_ge_ghz, t_mk);
    const double x2 = units::reduced_energy(levels.f_gf_ghz, t_mk);
    const double one_minus_r1 = -std::expm1(-x1);
    const double one_minus_r2 = -std::expm1(-x2);
    const double r1_minus_r2 = std::exp(-x1) * -std::expm1(x1 - x2);
    switch (which) {
        case Coefficient::A:
            return one_minus_r1 / one_minus_r2;
        case Coefficient::B:
            return r1_minus_r2 / one_minus_r1;
        default:
            return r1_minus_r2 / one_minus_r2;
    }
}

std::pair<double, double> attainable_range(const LevelEnergies &levels, Coefficient which,
                                           const InversionOptions &opts) {
    const double a = coefficient_vs_temperature(levels, opts.t_low_mk, which);
    const double b = coefficient_vs_temperature(levels, opts.t_high_mk, which);
    return {std::min(a, b), std::max(a, b)};
}

TemperatureEstimate invert_temperature(const SlopeEstimate &slope, const LevelEnergies &levels,
                                       const InversionOptions &opts) {
    if (!(opts.t_low_mk < opts.t_high_mk)) throw DomainError("inversion bracket is empty");
    const Coefficient which = slope.coefficient;
    const bool dec = decreasing(which);
    const double c_low = coefficient_vs_temperature(levels, opts.t_low_mk, which);
    const double c_high = coefficient_vs_temperature(levels, opts.t_high_mk, which);
    if (dec ? !(c_low > c_high) : !(c_low < c_high)) {
        throw Error("coefficient " + to_string(which) + " is not monotonic on the inversion bracket");
    }
    const double lo_val = std::min(c_low, c_high), hi_val = std::max(c_low, c_high);

    auto solve = [&](double target, bool &clamped) {
        clamped = false;
        if (!std::isfinite(target) || target < lo_val || target > hi_val) {
            if (!opts.clamp) {
                std::ostringstream os;
                os << "slope " << to_string(which) << " = " << target << " outside the attainable range [" << lo_val
                   << ", " << hi_val << "]";
                throw OutOfRangeError(os.str(), lo_val, hi_val);
            }
            clamped = true;
            const bool above = !(target <= hi_val);
            return (above == dec) ? opts.t_low_mk : opts.t_high_mk;
        }
        double lo = opts.t_low_mk, hi = opts.t_high_mk;
        for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double c = coefficient_vs_temperature(levels, mid, which);
            if ((c > target) == dec) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    TemperatureEstimate est;
    est.source = which;
    est.slope = slope;
    est.t_mk = solve(slope.value, est.clamped);

    // Interval ends are always clamped.
    auto solve_loose = [&](double v) {
        if (std::isnan(v)) return est.t_mk;
        if (v <= lo_val) return dec ? opts.t_high_mk : opts.t_low_mk;
        if (v >= hi_val) return dec ? opts.t_low_mk : opts.t_high_mk;
        bool unused = false;
        return solve(v, unused);
    };
    const double ta = solve_loose(slope.ci95.first), tb = solve_loose(slope.ci95.second);
    est.t_ci95_mk = {std::min({ta, tb, est.t_mk}), std::max({ta, tb, est.t_mk})};
    return est;
}

SlopeEstimate combine_slopes(const std::vector<SlopeEstimate> &parts, Coefficient which) {
    std::vector<const SlopeEstimate *> sel;
    for (const auto &p : parts) {
        if (p.coefficient == which) sel.push_back(&p);
    }
    if (sel.empty()) throw DomainError("no slope estimates for coefficient " + to_string(which));

    SlopeEstimate out;
    out.coefficient = which;
    bool any_zero = false;
    for (const auto *p : sel) any_zero = any_zero || !(p->standard_error > 0.0);
    std::vector<double> w;
    for (const auto *p : sel) {
        if (any_zero) {
            w.push_back(p->standard_error > 0.0 ? 0.0 : 1.0);
        } else {
            w.push_back(1.0 / (p->standard_error * p->standard_error));
        }
    }
    double wsum = 0.0;
    for (double x : w) wsum += x;
    for (size_t i = 0; i < sel.size(); ++i) {
        const double f = w[i] / wsum;
        out.value += f * sel[i]->value;
        out.intercept += f * sel[i]->intercept;
        out.residual_rms += f * sel[i]->residual_rms;
        out.ellipticity = std::max(out.ellipticity, sel[i]->ellipticity);
        out.degenerate = out.degenerate || sel[i]->degenerate;
    }
    out.standard_error = any_zero ? 0.0 : 1.0 / std::sqrt(wsum);
    out.ci95 = {out.value - 1.96 * out.standard_error, out.value + 1.96 * out.standard_error};
    return out;
}

EstimateReport estimate_temperature(const SequenceResponses &responses, const LevelEnergies &levels,
                                    const EstimateOptions &opts) {
    const auto pairs = difference_pairs(responses, opts.quadratures);
    EstimateReport rep;
    rep.n_points = static_cast<int>(pairs.front().xs.size());

    for (size_t i = 0; i < pairs.size(); ++i) {
        const auto &p = pairs[i];
        const std::string name =
            to_string(p.coefficient) + "[" + to_string(p.direction) + "] (" + p.numerator + ")/(" + p.denominator + ")";
        DemingOptions dopt;
        dopt.delta = opts.delta;
        dopt.n_bootstrap = opts.n_bootstrap;
        dopt.seed = stream_seed(opts.seed, "bootstrap", i);
        DemingFit fit;
        try {
            fit = deming_fit(p.xs, p.ys, dopt);
        } catch (const FitError &e) {
            throw DegenerateError("difference pair " + name + " cannot be fitted: " + e.what());
        }
        if (fit.degenerate) throw DegenerateError("difference pair " + name + " has a degenerate slope");
        SlopeEstimate s;
        s.coefficient = p.coefficient;
        s.direction = p.direction;
        s.value = fit.slope;
        s.ci95 = fit.slope_ci95;
        s.residual_rms = fit.residual_rms;
        s.standard_error = fit.slope_se;
        s.intercept = fit.intercept;
        s.ellipticity = fit.ellipticity;
        rep.pairs.push_back(s);
        if (fit.ellipticity > opts.max_ellipticity) {
            rep.consistent = false;
            std::ostringstream os;
            os << "pair " << name << " scatter is elliptical (ellipticity " << fit.ellipticity
               << "), differences are not collinear";
            rep.warnings.push_back(os.str());
        }
    }

    InversionOptions inv;
    inv.clamp = opts.clamp;
    for (int c = 0; c < 3; ++c) {
        const auto which = static_cast<Coefficient>(c);
        rep.combined[c] = combine_slopes(rep.pairs, which);
        for (const auto &s : rep.pairs) {
            if (s.coefficient != which) continue;
            const double gap = std::abs(s.value - rep.combined[c].value);
            if (gap > opts.outlier_sigmas * s.standard_error + 1e-3) {
                rep.consistent = false;
                std::ostringstream os;
                os << "pair " << to_string(which) << "[" << to_string(*s.direction) << "] slope " << s.value
                   << " disagrees with the combined " << rep.combined[c].value;
                rep.warnings.push_back(os.str());
            }
        }
        rep.temperatures[c] = invert_temperature(rep.combined[c], levels, inv);
        if (rep.temperatures[c].clamped) {
            rep.warnings.push_back("slope " + to_string(which) + " clamped to the attainable range");
        }
    }
    const double a = rep.combined[0].value, b = rep.combined[1].value, cc = rep.combined[2].value;
    rep.consistency = std::abs(cc - a * b) / std::abs(cc);
    return rep;
}

}  // namespace qthermo
