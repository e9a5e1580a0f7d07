#include "qthermo/error_lab.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "qthermo/constants.hpp"
#include "qthermo/deming.hpp"
#include "qthermo/errors.hpp"
#include "qthermo/rng.hpp"

namespace qthermo {

void MonteCarloSpec::validate() const {
    if (n_experiments < 100) throw DomainError("montecarlo.n_experiments must be at least 100");
    if (!(x_span > 0.0)) throw DomainError("montecarlo.x_span must be positive");
    if (!(noise_sigma >= 0.0)) throw DomainError("montecarlo.noise_sigma must be non-negative");
    if (n_points < 3) throw DomainError("montecarlo.n_points must be at least 3");
    if (!(delta > 0.0)) throw DomainError("montecarlo.delta must be positive");
    if (!(dt_ns > 0.0)) throw DomainError("montecarlo.dt_ns must be positive");
}

double pairwise_sum(const double *v, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

std::vector<double> monte_carlo_abscissa(const MonteCarloSpec &spec) {
    std::vector<double> xs(spec.n_points);
    if (spec.abscissa == Abscissa::Uniform) {
        for (int i = 0; i < spec.n_points; ++i) {
            xs[i] = -spec.x_span + 2.0 * spec.x_span * double(i) / double(spec.n_points - 1);
        }
        return xs;
    }
    const int n_i = (spec.n_points + 1) / 2;
    const double w = units::kTwoPi * spec.if_mhz * 1e-3;
    for (int i = 0; i < spec.n_points; ++i) {
        const int k = i < n_i ? i : i - n_i;
        const double t = spec.t_start_ns + spec.dt_ns * k;
        xs[i] = spec.x_span * (i < n_i ? std::sin(w * t) : std::cos(w * t));
    }
    return xs;
}

namespace {

double ols_slope(const std::vector<double> &xs, const std::vector<double> &ys) {
    const size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    double sxx = 0.0, sxy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw FitError("x series has zero variance");
    return sxy / sxx;
}

double sample_std(const std::vector<double> &v, double mean) {
    if (v.size() < 2) return 0.0;
    std::vector<double> d(v.size());
    for (size_t i = 0; i < v.size(); ++i) d[i] = (v[i] - mean) * (v[i] - mean);
    return std::sqrt(pairwise_sum(d.data(), d.size()) / double(v.size() - 1));
}

}  // namespace

MonteCarloReport slope_bias_study(const MonteCarloSpec &spec, const std::vector<double> &lambda_grid) {
    spec.validate();
    if (lambda_grid.empty()) throw DomainError("slope grid is empty");
    MonteCarloReport rep;
    rep.spec = spec;
    const auto x0 = monte_carlo_abscissa(spec);
    std::vector<double> xs(x0.size()), ys(x0.size());
    DemingOptions dopt;
    dopt.delta = spec.delta;
    dopt.n_bootstrap = 0;

    for (size_t g = 0; g < lambda_grid.size(); ++g) {
        const double lambda = lambda_grid[g];
        BiasPoint bp;
        bp.lambda = lambda;
        std::vector<double> fits;
        fits.reserve(spec.n_experiments);
        for (int e = 0; e < spec.n_experiments; ++e) {
            auto rng = make_stream(spec.seed, "montecarlo", g * std::uint64_t(spec.n_experiments) + e);
            std::normal_distribution<double> noise(0.0, 1.0);
            for (size_t i = 0; i < x0.size(); ++i) {
                xs[i] = x0[i] + spec.noise_sigma * noise(rng);
                ys[i] = lambda * x0[i] + spec.noise_sigma * noise(rng);
            }
            try {
                double s = 0.0;
                if (spec.estimator == SlopeEstimator::Deming) {
                    const auto fit = deming_fit(xs, ys, dopt);
                    if (fit.degenerate) throw FitError("degenerate");
                    s = fit.slope;
                } else {
                    s = ols_slope(xs, ys);
                }
                fits.push_back(s);
            } catch (const FitError &) {
                ++bp.n_failed;
            }
        }
        bp.n_ok = static_cast<int>(fits.size());
        if (fits.empty()) {
            bp.mean_fit = bp.ci_low = bp.ci_high = std::nan("");
        } else {
            bp.mean_fit = pairwise_sum(fits.data(), fits.size()) / double(fits.size());
            bp.sd_fit = sample_std(fits, bp.mean_fit);
            const double half = 1.96 * bp.sd_fit / std::sqrt(double(fits.size()));
            bp.ci_low = bp.mean_fit - half;
            bp.ci_high = bp.mean_fit + half;
        }
        rep.points.push_back(bp);
    }
    return rep;
}

double interpolate_bias(const MonteCarloReport &report, double lambda) {
    std::vector<const BiasPoint *> pts;
    for (const auto &p : report.points) {
        if (std::isfinite(p.mean_fit)) pts.push_back(&p);
    }
    if (pts.empty()) throw DomainError("bias curve has no valid points");
    std::sort(pts.begin(), pts.end(), [](auto *a, auto *b) { return a->lambda < b->lambda; });
    if (lambda <= pts.front()->lambda) return pts.front()->bias();
    if (lambda >= pts.back()->lambda) return pts.back()->bias();
    for (size_t i = 1; i < pts.size(); ++i) {
        if (lambda <= pts[i]->lambda) {
            const double u = (lambda - pts[i - 1]->lambda) / (pts[i]->lambda - pts[i - 1]->lambda);
            return (1.0 - u) * pts[i - 1]->bias() + u * pts[i]->bias();
        }
    }
    return pts.back()->bias();
}

void temperature_discrepancy(MonteCarloReport &report, const LevelEnergies &levels,
                             const std::vector<double> &t_grid_mk) {
    report.discrepancy.clear();
    report.skipped_out_of_range = 0;
    for (double t : t_grid_mk) {
        DiscrepancyPoint dp;
        dp.t_mk = t;
        bool ok = true;
        for (int c = 0; c < 3 && ok; ++c) {
            const auto which = static_cast<Coefficient>(c);
            SlopeEstimate s;
            s.coefficient = which;
            const double truth = coefficient_vs_temperature(levels, t, which);
            s.value = truth + interpolate_bias(report, truth);
            s.ci95 = {s.value, s.value};
            try {
                dp.dt_mk[c] = invert_temperature(s, levels).t_mk - t;
            } catch (const OutOfRangeError &) {
                ok = false;
            }
        }
        if (ok) {
            report.discrepancy.push_back(dp);
        } else {
            ++report.skipped_out_of_range;
        }
    }
}

double EmpiricalCdf::operator()(double v) const {
    const auto it = std::upper_bound(x.begin(), x.end(), v);
    const auto k = it - x.begin();
    return x.empty() ? 0.0 : double(k) / double(x.size());
}

EmpiricalCdf empirical_cdf(std::vector<double> values) {
    EmpiricalCdf cdf;
    std::sort(values.begin(), values.end());
    cdf.x = std::move(values);
    const double n = double(cdf.x.size());
    for (size_t i = 0; i < cdf.x.size(); ++i) cdf.f.push_back(double(i + 1) / n);
    return cdf;
}

RepeatedStats repeated_measurement_stats(const SimulationResult &clean, const PipelineConfig &config, int n_runs) {
    if (n_runs < 1) throw DomainError("number of runs must be positive");
    RepeatedStats st;
    st.n_runs = n_runs;
    EstimateOptions opts = config.protocol;
    opts.n_bootstrap = 0;
    for (int r = 0; r < n_runs; ++r) {
        const auto traces = acquire(clean.outcomes, config.readout, config.seed, r, config.noiseless);
        try {
            opts.seed = stream_seed(config.seed, "run", r);
            const auto rep = estimate_from_traces(traces, clean.system.levels, config.readout,
                                                  config.system.resonator, opts);
            for (int c = 0; c < 3; ++c) st.coefficients[c].t_mk.push_back(rep.temperatures[c].t_mk);
        } catch (const Error &e) {
            ++st.n_failed;
            st.failures.push_back("run " + std::to_string(r) + ": " + e.what());
        }
    }
    for (auto &c : st.coefficients) {
        if (c.t_mk.empty()) continue;
        c.mean = pairwise_sum(c.t_mk.data(), c.t_mk.size()) / double(c.t_mk.size());
        c.std = sample_std(c.t_mk, c.mean);
        c.cdf = empirical_cdf(c.t_mk);
    }
    return st;
}

void write_bias_csv(std::ostream &os, const MonteCarloReport &report) {
    os << "lambda,mean,ci_low,ci_high,sd,n_ok,n_failed\n";
    os.precision(12);
    for (const auto &p : report.points) {
        os << p.lambda << ',' << p.mean_fit << ',' << p.ci_low << ',' << p.ci_high << ',' << p.sd_fit << ','
           << p.n_ok << ',' << p.n_failed << '\n';
    }
}

void write_discrepancy_csv(std::ostream &os, const MonteCarloReport &report) {
    os << "T_mK,dT_A,dT_B,dT_C\n";
    os.precision(12);
    for (const auto &p : report.discrepancy) {
        os << p.t_mk << ',' << p.dt_mk[0] << ',' << p.dt_mk[1] << ',' << p.dt_mk[2] << '\n';
    }
}

void write_cdf_csv(std::ostream &os, const RepeatedStats &stats) {
    os << "coefficient,T_mK,cdf\n";
    os.precision(12);
    const char *names[3] = {"A", "B", "C"};
    for (int c = 0; c < 3; ++c) {
        const auto &cdf = stats.coefficients[c].cdf;
        for (size_t i = 0; i < cdf.x.size(); ++i) os << names[c] << ',' << cdf.x[i] << ',' << cdf.f[i] << '\n';
    }
}

}  // namespace qthermo
