#include "qthermo/deming.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "qthermo/errors.hpp"
#include "qthermo/rng.hpp"

namespace qthermo {

namespace {

struct Moments {
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
};

bool negligible_covariance(const Moments &m, double delta) {
    return std::abs(m.sxy) <= 1e-12 * (delta * m.sxx + m.syy) / std::sqrt(delta);
}

double percentile(std::vector<double> &v, double p) {
    std::sort(v.begin(), v.end());
    const double pos = p * double(v.size() - 1);
    const size_t lo = static_cast<size_t>(std::floor(pos));
    const size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - double(lo)) * (v[hi] - v[lo]);
}

}  // namespace

double deming_slope(double sxx, double syy, double sxy, double delta) {
    const double d = syy - delta * sxx;
    const double r = std::sqrt(d * d + 4.0 * delta * sxy * sxy);
    if (d >= 0.0) {
        if (sxy == 0.0) return d > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
        return (d + r) / (2.0 * sxy);
    }
    return 2.0 * delta * sxy / (r - d);
}

DemingFit deming_fit(std::span<const double> xs, std::span<const double> ys, const DemingOptions &opts) {
    if (xs.size() != ys.size()) throw FitError("x and y series differ in length");
    if (xs.size() < 3) throw FitError("Deming fit needs at least 3 points");
    if (!(opts.delta > 0.0) || !std::isfinite(opts.delta)) throw FitError("variance ratio delta must be positive");
    if (opts.n_bootstrap < 0) throw FitError("bootstrap count must be non-negative");

    const size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= double(n);
    my /= double(n);
    std::vector<double> cx(n), cy(n);
    Moments m;
    for (size_t i = 0; i < n; ++i) {
        cx[i] = xs[i] - mx;
        cy[i] = ys[i] - my;
        m.sxx += cx[i] * cx[i];
        m.syy += cy[i] * cy[i];
        m.sxy += cx[i] * cy[i];
    }
    if (m.sxx == 0.0 && m.syy == 0.0) throw FitError("all points are identical");
    if (m.sxx == 0.0) throw FitError("x series has zero variance");

    DemingFit fit;
    fit.variance_ratio_delta = opts.delta;
    fit.n_points = static_cast<int>(n);
    fit.degenerate = negligible_covariance(m, opts.delta);
    fit.slope = fit.degenerate ? (m.syy <= opts.delta * m.sxx ? 0.0 : std::numeric_limits<double>::infinity())
                               : deming_slope(m.sxx, m.syy, m.sxy, opts.delta);
    fit.intercept = std::isfinite(fit.slope) ? my - fit.slope * mx : std::numeric_limits<double>::quiet_NaN();

    double rss = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double r = cy[i] - fit.slope * cx[i];
        rss += r * r;
    }
    fit.residual_rms = std::isfinite(fit.slope) ? std::sqrt(rss / double(n)) : std::numeric_limits<double>::infinity();

    {
        const double sx = opts.delta * m.sxx, sy = m.syy, sxy = std::sqrt(opts.delta) * m.sxy;
        const double tr = sx + sy, det = sx * sy - sxy * sxy;
        const double disc = std::sqrt(std::max(0.0, tr * tr / 4.0 - det));
        const double major = tr / 2.0 + disc, minor = std::max(0.0, tr / 2.0 - disc);
        fit.ellipticity = major > 0.0 ? std::sqrt(minor / major) : 0.0;
    }

    // Jackknife from leave-one-out moments of the centred data.
    if (!fit.degenerate) {
        std::vector<double> loo(n);
        double mean = 0.0;
        const double n1 = double(n - 1);
        for (size_t i = 0; i < n; ++i) {
            const double dx = cx[i] / n1, dy = cy[i] / n1;  // shift of the mean
            Moments mi;
            mi.sxx = m.sxx - cx[i] * cx[i] - n1 * dx * dx;
            mi.syy = m.syy - cy[i] * cy[i] - n1 * dy * dy;
            mi.sxy = m.sxy - cx[i] * cy[i] - n1 * dx * dy;
            loo[i] = deming_slope(mi.sxx, mi.syy, mi.sxy, opts.delta);
            mean += loo[i];
        }
        mean /= double(n);
        double ss = 0.0;
        for (double v : loo) ss += (v - mean) * (v - mean);
        fit.slope_se = std::sqrt(ss * n1 / double(n));
    }

    fit.slope_ci95 = {fit.slope, fit.slope};
    if (opts.n_bootstrap > 0 && !fit.degenerate) {
        std::vector<double> slopes;
        slopes.reserve(opts.n_bootstrap);
        for (int b = 0; b < opts.n_bootstrap; ++b) {
            auto rng = make_stream(opts.seed, "bootstrap", static_cast<std::uint64_t>(b));
            std::uniform_int_distribution<size_t> pick(0, n - 1);
            double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
            for (size_t k = 0; k < n; ++k) {
                const size_t i = pick(rng);
                sx += cx[i];
                sy += cy[i];
                sxx += cx[i] * cx[i];
                syy += cy[i] * cy[i];
                sxy += cx[i] * cy[i];
            }
            const double bx = sx / double(n), by = sy / double(n);
            Moments mb{sxx - double(n) * bx * bx, syy - double(n) * by * by, sxy - double(n) * bx * by};
            if (mb.sxx <= 0.0 || negligible_covariance(mb, opts.delta)) continue;
            slopes.push_back(deming_slope(mb.sxx, mb.syy, mb.sxy, opts.delta));
        }
        if (slopes.size() >= 2) {
            fit.slope_ci95 = {percentile(slopes, 0.025), percentile(slopes, 0.975)};
        }
        // Percentile intervals can miss the point estimate for very skewed
        // resampling distributions; widen so the interval always contains it.
        fit.slope_ci95.first = std::min(fit.slope_ci95.first, fit.slope);
        fit.slope_ci95.second = std::max(fit.slope_ci95.second, fit.slope);
    }
    return fit;
}

}  // namespace qthermo
