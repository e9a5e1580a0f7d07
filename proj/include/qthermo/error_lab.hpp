#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "qthermo/hilbert.hpp"
#include "qthermo/pipeline.hpp"
#include "qthermo/thermometry.hpp"

namespace qthermo {

enum class Abscissa { Sinusoidal, Uniform };
enum class SlopeEstimator { Deming, OrdinaryLeastSquares };

struct MonteCarloSpec {
    int n_experiments = 1000;
    double true_slope = 0.8834;
    double x_span = 0.042;
    double noise_sigma = 0.002;
    /// Window samples times two quadratures.
    int n_points = 700;
    std::uint64_t seed = 0;
    /// Sinusoidal: half the points are x_span sin(2pi f_IF t), half x_span
    /// cos(2pi f_IF t), t on the readout window grid. Uniform: evenly spaced
    /// on [-x_span, x_span].
    Abscissa abscissa = Abscissa::Sinusoidal;
    double if_mhz = 50.0;
    double t_start_ns = 100.0;
    double dt_ns = 1.0;
    double delta = 1.0;
    SlopeEstimator estimator = SlopeEstimator::Deming;

    void validate() const;
};

struct BiasPoint {
    double lambda = 0.0;
    double mean_fit = 0.0;
    /// 95% interval of the mean fitted slope.
    double ci_low = 0.0;
    double ci_high = 0.0;
    /// Spread of individual fits.
    double sd_fit = 0.0;
    int n_ok = 0;
    int n_failed = 0;

    double bias() const { return mean_fit - lambda; }
};

struct DiscrepancyPoint {
    double t_mk = 0.0;
    std::array<double, 3> dt_mk{0.0, 0.0, 0.0};  // A, B, C
};

struct MonteCarloReport {
    MonteCarloSpec spec;
    std::vector<BiasPoint> points;
    std::vector<DiscrepancyPoint> discrepancy;
    int skipped_out_of_range = 0;
};

/// Abscissa values for one synthetic fit, before noise.
std::vector<double> monte_carlo_abscissa(const MonteCarloSpec &spec);

/// Noisy collinear data fitted repeatedly per grid slope. Experiment e at
/// grid index g draws from stream "montecarlo", index g * n_experiments + e.
MonteCarloReport slope_bias_study(const MonteCarloSpec &spec, const std::vector<double> &lambda_grid);

/// Linear interpolation of the bias curve, constant beyond its ends.
double interpolate_bias(const MonteCarloReport &report, double lambda);

/// Temperature error caused by the slope bias: invert(coef(T) + bias(coef(T))) - T
/// per coefficient. Fills report.discrepancy.
void temperature_discrepancy(MonteCarloReport &report, const LevelEnergies &levels, const std::vector<double> &t_grid_mk);

struct EmpiricalCdf {
    std::vector<double> x;  // sorted
    std::vector<double> f;  // i / n at x[i-1]
    double operator()(double v) const;
};
EmpiricalCdf empirical_cdf(std::vector<double> values);

struct CoefficientStats {
    std::vector<double> t_mk;
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation
    EmpiricalCdf cdf;
};

struct RepeatedStats {
    int n_runs = 0;
    int n_failed = 0;
    std::array<CoefficientStats, 3> coefficients;  // A, B, C
    std::vector<std::string> failures;
};

/// Noise realizations on top of one noiseless simulation; run r draws noise
/// with run index r. Bootstrap is skipped per run.
RepeatedStats repeated_measurement_stats(const SimulationResult &clean, const PipelineConfig &config, int n_runs);

double pairwise_sum(const double *v, size_t n);

void write_bias_csv(std::ostream &os, const MonteCarloReport &report);
void write_discrepancy_csv(std::ostream &os, const MonteCarloReport &report);
void write_cdf_csv(std::ostream &os, const RepeatedStats &stats);

}  // namespace qthermo
