#include "qthermo/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qthermo/errors.hpp"

namespace qthermo {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output (Hairer, contd5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

double error_norm(const Eigen::VectorXcd &err, const Eigen::VectorXcd &y0, const Eigen::VectorXcd &y1,
                  double atol, double rtol) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double r = std::abs(err(i)) / scale;
        acc += r * r;
    }
    return std::sqrt(acc / double(std::max<Eigen::Index>(err.size(), 1)));
}

}  // namespace

std::vector<Eigen::VectorXcd> integrate_dopri5(const OdeRhs &rhs, double t0, const Eigen::VectorXcd &y0,
                                               std::span<const double> t_out, const OdeOptions &opts,
                                               OdeStats *stats) {
    std::vector<Eigen::VectorXcd> out;
    out.reserve(t_out.size());
    if (t_out.empty()) return out;
    if (t_out.front() < t0) throw IntegrationError("output times precede the initial time");
    for (size_t i = 1; i < t_out.size(); ++i) {
        if (t_out[i] < t_out[i - 1]) throw IntegrationError("output times must be ascending");
    }

    OdeStats local;
    const Eigen::Index n = y0.size();
    Eigen::VectorXcd y = y0, y_new(n), tmp(n);
    Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
    Eigen::VectorXcd r1(n), r2(n), r3(n), r4(n), r5(n);

    double t = t0;
    const double t_end = t_out.back();
    size_t next = 0;
    while (next < t_out.size() && t_out[next] <= t0) {
        out.push_back(y);
        ++next;
    }

    rhs(t, y, k1);
    ++local.rhs_evals;

    const bool fixed = opts.fixed_step > 0.0;
    double h = opts.h_initial;
    if (fixed) {
        h = opts.fixed_step;
    } else if (h <= 0.0) {
        const double d0 = y.norm(), d1n = k1.norm();
        h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
        h = std::min(h, std::max(t_end - t0, 1e-12));
    }
    if (opts.h_max > 0.0) h = std::min(h, opts.h_max);

    const double h_min_floor = 1e-14 * std::max(1.0, std::abs(t_end));
    while (next < t_out.size()) {
        if (local.accepted + local.rejected >= opts.max_steps) {
            std::ostringstream msg;
            msg << "step budget exhausted at t=" << t << " ns (accepted " << local.accepted << ", rejected "
                << local.rejected << ", last h=" << h << ")";
            throw IntegrationError(msg.str());
        }
        const bool last = t + h >= t_end;
        if (last) h = t_end - t;

        tmp = y + h * a21 * k1;
        rhs(t + c2 * h, tmp, k2);
        tmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, tmp, k3);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, tmp, k4);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, tmp, k5);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, tmp, k6);
        y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        rhs(t + h, y_new, k7);
        local.rhs_evals += 6;

        double err = 0.0;
        if (!fixed) {
            tmp = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            err = error_norm(tmp, y, y_new, opts.atol, opts.rtol);
            if (!std::isfinite(err)) {
                throw IntegrationError("non-finite state during integration at t=" + std::to_string(t));
            }
        }

        if (fixed || err <= 1.0) {
            const double t_new = last ? t_end : t + h;
            // Continuous extension over [t, t_new].
            if (next < t_out.size() && t_out[next] <= t_new) {
                r1 = y;
                r2 = y_new - y;
                r3 = h * k1 - r2;
                r4 = r2 - h * k7 - r3;
                r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                while (next < t_out.size() && t_out[next] <= t_new) {
                    const double theta = (t_out[next] - t) / h;
                    const double theta1 = 1.0 - theta;
                    if (t_out[next] == t_new) {
                        out.push_back(y_new);
                    } else {
                        out.push_back(r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5))));
                    }
                    ++next;
                }
            }
            y.swap(y_new);
            k1.swap(k7);
            t = t_new;
            ++local.accepted;
            if (!fixed) {
                const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
                h *= std::clamp(fac, 0.2, 5.0);
                if (opts.h_max > 0.0) h = std::min(h, opts.h_max);
            } else {
                h = opts.fixed_step;
            }
        } else {
            ++local.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            if (h < h_min_floor) {
                throw IntegrationError("step size underflow at t=" + std::to_string(t) + " ns");
            }
        }
    }
    if (stats) *stats = local;
    return out;
}

}  // namespace qthermo
