#pragma once

#include <cstdint>
#include <span>
#include <utility>

namespace qthermo {

struct DemingOptions {
    /// Ratio of y-noise variance to x-noise variance.
    double delta = 1.0;
    /// 0 disables the bootstrap; the interval then collapses to the slope.
    int n_bootstrap = 1000;
    std::uint64_t seed = 0;
};

struct DemingFit {
    double variance_ratio_delta = 1.0;
    double slope = 0.0;
    double intercept = 0.0;
    int n_points = 0;
    /// Percentile bootstrap interval for the slope.
    std::pair<double, double> slope_ci95{0.0, 0.0};
    /// Jackknife standard error of the slope.
    double slope_se = 0.0;
    double residual_rms = 0.0;
    /// sqrt(minor / major) eigenvalue ratio of the scatter matrix: 0 for a
    /// perfect line, 1 for an isotropic cloud.
    double ellipticity = 0.0;
    /// Covariance numerically zero: slope is 0 or unbounded.
    bool degenerate = false;
};

/// Closed-form errors-in-variables slope from centred second moments.
double deming_slope(double sxx, double syy, double sxy, double delta);

/// Throws FitError for fewer than 3 points, identical points or zero x variance.
DemingFit deming_fit(std::span<const double> xs, std::span<const double> ys, const DemingOptions &opts = {});

}  // namespace qthermo
