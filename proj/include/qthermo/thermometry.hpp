#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qthermo/deming.hpp"
#include "qthermo/hilbert.hpp"
#include "qthermo/readout.hpp"

namespace qthermo {

/// A = (p_g - p_e)/(p_g - p_f), B = (p_e - p_f)/(p_g - p_e), C = (p_e - p_f)/(p_g - p_f).
enum class Coefficient { A, B, C };
/// Response-difference direction the pair lives on.
enum class Direction { GE, GF, EF };
enum class Quadratures { I, IQ };

std::string to_string(Coefficient c);
std::string to_string(Direction d);
std::string to_string(Quadratures q);
Coefficient parse_coefficient(const std::string &s);
Quadratures parse_quadratures(const std::string &s);

struct SequenceResponses {
    IQTrace x0, x1, x2, y0, y1, y2;

    const IQTrace &get(const std::string &label) const;
    /// Throws GridMismatchError unless all six share one time grid.
    void validate() const;
    /// Picks the six labels out of a list; throws on missing or duplicate labels.
    static SequenceResponses from_traces(const std::vector<IQTrace> &traces);
};

struct DifferencePair {
    Coefficient coefficient;
    Direction direction;
    std::string numerator;    // fitted as y
    std::string denominator;  // fitted as x
    std::vector<double> xs;
    std::vector<double> ys;
};

/// The nine proportional difference pairs, three per coefficient.
std::vector<DifferencePair> difference_pairs(const SequenceResponses &r, Quadratures q = Quadratures::IQ);

struct SlopeEstimate {
    Coefficient coefficient = Coefficient::A;
    /// Unset for combined estimates.
    std::optional<Direction> direction;
    double value = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};
    double residual_rms = 0.0;
    double standard_error = 0.0;
    double intercept = 0.0;
    double ellipticity = 0.0;
    bool degenerate = false;
};

struct TemperatureEstimate {
    double t_mk = 0.0;
    Coefficient source = Coefficient::A;
    SlopeEstimate slope;
    std::pair<double, double> t_ci95_mk{0.0, 0.0};
    bool clamped = false;
};

double coefficient_from_populations(const Populations &p, Coefficient which);
/// Exponents are -h f / k_B T with positive transition frequencies.
double coefficient_vs_temperature(const LevelEnergies &levels, double t_mk, Coefficient which);

struct InversionOptions {
    double t_low_mk = 1.0;
    double t_high_mk = 2000.0;
    /// Map slopes outside the attainable range to the nearest bracket end
    /// instead of throwing OutOfRangeError.
    bool clamp = false;
};

/// Coefficient range reachable on the inversion bracket, (low, high).
std::pair<double, double> attainable_range(const LevelEnergies &levels, Coefficient which,
                                           const InversionOptions &opts = {});
TemperatureEstimate invert_temperature(const SlopeEstimate &slope, const LevelEnergies &levels,
                                       const InversionOptions &opts = {});

struct EstimateOptions {
    Quadratures quadratures = Quadratures::IQ;
    double delta = 1.0;
    int n_bootstrap = 1000;
    std::uint64_t seed = 0;
    bool clamp = false;
    /// Pair flagged inconsistent above this scatter ellipticity.
    double max_ellipticity = 0.5;
    /// Pair flagged inconsistent when further than this many standard errors
    /// (plus an absolute 1e-3) from its coefficient's combined slope.
    double outlier_sigmas = 5.0;
};

struct EstimateReport {
    std::vector<SlopeEstimate> pairs;         // nine, three per coefficient in A, B, C order
    std::array<SlopeEstimate, 3> combined;    // A, B, C
    std::array<TemperatureEstimate, 3> temperatures;
    /// |C - A B| / C on the combined slopes.
    double consistency = 0.0;
    bool consistent = true;
    std::vector<std::string> warnings;
    int n_points = 0;
};

/// Inverse-variance weighted mean of slope estimates (jackknife errors);
/// equal weights when every error is zero.
SlopeEstimate combine_slopes(const std::vector<SlopeEstimate> &parts, Coefficient which);

EstimateReport estimate_temperature(const SequenceResponses &responses, const LevelEnergies &levels,
                                    const EstimateOptions &opts = {});

}  // namespace qthermo
