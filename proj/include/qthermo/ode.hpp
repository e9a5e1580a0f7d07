#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace qthermo {

struct OdeOptions {
    double rtol = 1e-8;
    double atol = 1e-10;
    double h_initial = 0.0;  // 0: automatic
    double h_max = 0.0;      // 0: unbounded
    long max_steps = 5'000'000;
    /// > 0 switches off error control and takes steps of exactly this size
    /// (the last step of each interval is shortened). Used for step-halving checks.
    double fixed_step = 0.0;
};

struct OdeStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
};

using OdeRhs = std::function<void(double t, const Eigen::VectorXcd &y, Eigen::VectorXcd &dydt)>;

/// Dormand-Prince 5(4) with FSAL and the standard fourth-order continuous
/// extension. Returns y(t) at every requested time; t_out must be ascending
/// and start at or after t0. Throws IntegrationError if the step size
/// underflows or the step budget is exhausted.
std::vector<Eigen::VectorXcd> integrate_dopri5(const OdeRhs &rhs, double t0, const Eigen::VectorXcd &y0,
                                               std::span<const double> t_out, const OdeOptions &opts = {},
                                               OdeStats *stats = nullptr);

}  // namespace qthermo
