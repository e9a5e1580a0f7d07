#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qthermo/lindblad.hpp"

namespace qthermo {

struct ReadoutConfig {
    double probe_duration_ns = 2000.0;
    double if_mhz = 50.0;
    double sample_dt_ns = 1.0;
    double window_start_ns = 100.0;
    double window_end_ns = 450.0;
    double noise_sigma = 0.002;  // per sample and quadrature, after averaging
    long n_averages = 60000;
    /// Probe drive in GHz. Unset means kappa/(8 pi), i.e. a quarter photon
    /// in the empty resonator at steady state.
    std::optional<double> probe_amplitude;
    /// Gap between the last gate and the probe.
    double probe_delay_ns = 4.0;
    /// Minimum pairwise normalized distance between pure-state responses.
    double distinguishability_threshold = 1e-3;

    int n_samples() const;
    double amplitude_for(const LiouvillianSpec &L) const;
    void validate() const;
};

struct IQTrace {
    std::vector<double> t_ns;
    std::vector<double> i_vals;
    std::vector<double> q_vals;
    std::string label;

    size_t size() const { return t_ns.size(); }
    void validate() const;
};

struct PureStateResponses {
    IQTrace phi_g, phi_e, phi_f;

    const IQTrace &operator[](int k) const { return k == 0 ? phi_g : (k == 1 ? phi_e : phi_f); }
    /// Throws DegenerateError when two responses are closer than the threshold.
    void check_distinguishable(double threshold) const;
};

/// Linear map from an initial state (storage frame, at probe start) to the
/// complex readout record. Built once per system and reused for every input.
class ReadoutKernel {
   public:
    ReadoutKernel(const LiouvillianSpec &L, const ReadoutConfig &config);

    /// Unnormalized <a>(t) e^{i 2pi f_IF t}.
    Eigen::VectorXcd response(const DensityMatrix &rho) const;
    /// Normalized trace.
    IQTrace trace(const DensityMatrix &rho, const std::string &label) const;
    /// Dressed pure transmon states with the resonator at its bath occupation.
    PureStateResponses pure_state_responses() const;

    /// Traces are multiplied by this so that max |pure-state response| = 1.
    double scale() const { return scale_; }
    const ReadoutConfig &config() const { return config_; }
    double probe_amplitude() const { return amplitude_; }

   private:
    const LiouvillianSpec *L_;
    ReadoutConfig config_;
    double amplitude_ = 0.0;
    Eigen::MatrixXcd rows_;  // n_samples x dim^2
    Eigen::VectorXcd phase_;
    double scale_ = 1.0;
};

/// Builds a kernel for a single state; prefer ReadoutKernel for repeated use.
IQTrace simulate_readout(const DensityMatrix &rho, const LiouvillianSpec &L, const ReadoutConfig &config,
                         const std::string &label = "");

/// Independent Gaussian noise per sample and quadrature. noise_sigma is the
/// post-averaging level, so n_averages is recorded but does not rescale it.
IQTrace add_noise(const IQTrace &trace, double noise_sigma, long n_averages, std::uint64_t seed);

struct WindowDiagnostics {
    std::vector<std::string> warnings;
};

/// Samples with window_start <= t < window_end.
IQTrace window(const IQTrace &trace, const ReadoutConfig &config, const ResonatorSpec *resonator = nullptr,
               WindowDiagnostics *diag = nullptr);

struct RegressionResult {
    Populations populations;
    double residual_rms = 0.0;
    double condition_number = 0.0;
};

/// Least squares fit of measured = sum_k p_k phi_k over every sample and both
/// quadratures. With simplex = true the solution is constrained to p >= 0, sum 1.
RegressionResult regress_populations(const IQTrace &measured, const PureStateResponses &basis,
                                     bool simplex = false);

/// Rounds to 12 significant digits, the precision written to trace files.
double quantize12(double x);
IQTrace quantize(const IQTrace &trace);

void write_traces_csv(std::ostream &os, const std::vector<IQTrace> &traces);
/// Parses t_ns,I,Q,label rows; one IQTrace per label in order of appearance.
std::vector<IQTrace> read_traces_csv(std::istream &is);

}  // namespace qthermo
