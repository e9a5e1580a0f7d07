#include "qthermo/readout.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "qthermo/constants.hpp"
#include "qthermo/errors.hpp"

namespace qthermo {

namespace {

constexpr double kGridTol = 1e-9;

Eigen::VectorXd stacked(const IQTrace &t) {
    const Eigen::Index n = static_cast<Eigen::Index>(t.size());
    Eigen::VectorXd v(2 * n);
    for (Eigen::Index k = 0; k < n; ++k) {
        v(k) = t.i_vals[k];
        v(n + k) = t.q_vals[k];
    }
    return v;
}

void require_same_grid(const IQTrace &a, const IQTrace &b) {
    if (a.size() != b.size()) throw GridMismatchError("traces have different lengths");
    for (size_t k = 0; k < a.size(); ++k) {
        if (std::abs(a.t_ns[k] - b.t_ns[k]) > kGridTol) throw GridMismatchError("traces have different time grids");
    }
}

}  // namespace

int ReadoutConfig::n_samples() const { return static_cast<int>(std::llround(probe_duration_ns / sample_dt_ns)); }

double ReadoutConfig::amplitude_for(const LiouvillianSpec &L) const {
    if (probe_amplitude) return *probe_amplitude;
    return 1e-3 * L.dissipation.kappa_for(L.system.resonator) / 4.0;
}

void ReadoutConfig::validate() const {
    if (!(sample_dt_ns > 0.0)) throw DomainError("sample_dt_ns must be positive");
    if (!(probe_duration_ns > 0.0)) throw DomainError("probe_duration_ns must be positive");
    if (std::abs(probe_duration_ns / sample_dt_ns - n_samples()) > 1e-9) {
        throw DomainError("probe duration must be a whole number of samples");
    }
    if (!(if_mhz > 0.0)) throw DomainError("if_mhz must be positive");
    if (!(window_start_ns >= 0.0 && window_start_ns < window_end_ns && window_end_ns <= probe_duration_ns)) {
        throw DomainError("readout window must satisfy 0 <= start < end <= probe duration");
    }
    if (!(noise_sigma >= 0.0)) throw DomainError("noise_sigma must be non-negative");
    if (n_averages < 1) throw DomainError("n_averages must be positive");
    if (probe_amplitude && !(*probe_amplitude >= 0.0)) throw DomainError("probe amplitude must be non-negative");
    if (!(probe_delay_ns >= 0.0)) throw DomainError("probe delay must be non-negative");
    if (!(distinguishability_threshold >= 0.0)) throw DomainError("distinguishability threshold must be >= 0");
}

void IQTrace::validate() const {
    if (i_vals.size() != t_ns.size() || q_vals.size() != t_ns.size()) {
        throw DimensionError("trace '" + label + "' has mismatched column lengths");
    }
    if (t_ns.size() < 2) return;
    const double dt = t_ns[1] - t_ns[0];
    for (size_t k = 1; k < t_ns.size(); ++k) {
        if (std::abs(t_ns[k] - t_ns[k - 1] - dt) > kGridTol) {
            throw GridMismatchError("trace '" + label + "' is not uniformly sampled");
        }
    }
}

void PureStateResponses::check_distinguishable(double threshold) const {
    const Eigen::VectorXd v[3] = {stacked(phi_g), stacked(phi_e), stacked(phi_f)};
    const char *names[3] = {"g", "e", "f"};
    for (int a = 0; a < 3; ++a) {
        for (int b = a + 1; b < 3; ++b) {
            const double norm = std::max(v[a].norm(), v[b].norm());
            const double dist = norm > 0.0 ? (v[a] - v[b]).norm() / norm : 0.0;
            if (!(dist > threshold)) {
                throw DegenerateError(std::string("pure-state responses ") + names[a] + " and " + names[b] +
                                      " are not distinguishable (distance " + std::to_string(dist) + ")");
            }
        }
    }
}

ReadoutKernel::ReadoutKernel(const LiouvillianSpec &L, const ReadoutConfig &config) : L_(&L), config_(config) {
    config_.validate();
    amplitude_ = config_.amplitude_for(L);
    const int d = L.dim();
    const int n = config_.n_samples();
    const double carrier = L.reference_frame_ghz();

    SparseSuper gen = L.generator(carrier);
    const double c = units::kTwoPi * amplitude_;
    if (c != 0.0) gen = gen + c * L.probe_plus + c * L.probe_minus;
    const Eigen::MatrixXcd step = (Eigen::MatrixXcd(gen) * config_.sample_dt_ns).exp();
    const Eigen::MatrixXcd step_t = step.transpose();

    rows_.resize(d * d, n);
    for (int j = 0; j < d; ++j) {
        for (int i = 0; i < d; ++i) rows_(j * d + i, 0) = L.ops.a(j, i);
    }
    for (int k = 1; k < n; ++k) rows_.col(k).noalias() = step_t * rows_.col(k - 1);

    phase_.resize(n);
    for (int k = 0; k < n; ++k) {
        phase_(k) = std::polar(1.0, units::kTwoPi * config_.if_mhz * 1e-3 * k * config_.sample_dt_ns);
    }

    double peak = 0.0;
    for (int level = 0; level < 3; ++level) {
        std::vector<double> w(3, 0.0);
        w[level] = 1.0;
        peak = std::max(peak, response(dressed_product_state(L, w, L.occupations.n_r)).cwiseAbs().maxCoeff());
    }
    scale_ = peak > 0.0 ? 1.0 / peak : 1.0;
}

Eigen::VectorXcd ReadoutKernel::response(const DensityMatrix &rho) const {
    if (rho.dim() != L_->dim()) throw DimensionError("state dimension does not match the readout kernel");
    const Eigen::Map<const Eigen::VectorXcd> v(rho.matrix().data(), rho.matrix().size());
    Eigen::VectorXcd out = rows_.transpose() * v;
    return out.cwiseProduct(phase_);
}

IQTrace ReadoutKernel::trace(const DensityMatrix &rho, const std::string &label) const {
    const Eigen::VectorXcd r = response(rho) * scale_;
    IQTrace t;
    t.label = label;
    const int n = static_cast<int>(r.size());
    t.t_ns.resize(n);
    t.i_vals.resize(n);
    t.q_vals.resize(n);
    for (int k = 0; k < n; ++k) {
        t.t_ns[k] = k * config_.sample_dt_ns;
        t.i_vals[k] = r(k).real();
        t.q_vals[k] = r(k).imag();
    }
    return t;
}

PureStateResponses ReadoutKernel::pure_state_responses() const {
    PureStateResponses out;
    IQTrace *slots[3] = {&out.phi_g, &out.phi_e, &out.phi_f};
    const char *labels[3] = {"phi_g", "phi_e", "phi_f"};
    for (int level = 0; level < 3; ++level) {
        std::vector<double> w(3, 0.0);
        w[level] = 1.0;
        *slots[level] = trace(dressed_product_state(*L_, w, L_->occupations.n_r), labels[level]);
    }
    return out;
}

IQTrace simulate_readout(const DensityMatrix &rho, const LiouvillianSpec &L, const ReadoutConfig &config,
                         const std::string &label) {
    return ReadoutKernel(L, config).trace(rho, label);
}

IQTrace add_noise(const IQTrace &trace, double noise_sigma, long n_averages, std::uint64_t seed) {
    if (!(noise_sigma >= 0.0)) throw DomainError("noise_sigma must be non-negative");
    if (n_averages < 1) throw DomainError("n_averages must be positive");
    IQTrace out = trace;
    if (noise_sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, noise_sigma);
    for (size_t k = 0; k < out.size(); ++k) {
        out.i_vals[k] += normal(rng);
        out.q_vals[k] += normal(rng);
    }
    return out;
}

IQTrace window(const IQTrace &trace, const ReadoutConfig &config, const ResonatorSpec *resonator,
               WindowDiagnostics *diag) {
    trace.validate();
    if (resonator && config.window_start_ns < resonator->ring_up_ns()) {
        std::ostringstream os;
        os << "window starts at " << config.window_start_ns << " ns, before the resonator ring-up time "
           << resonator->ring_up_ns() << " ns";
        if (diag) diag->warnings.push_back(os.str());
    }
    IQTrace out;
    out.label = trace.label;
    for (size_t k = 0; k < trace.size(); ++k) {
        const double t = trace.t_ns[k];
        if (t >= config.window_start_ns - kGridTol && t < config.window_end_ns - kGridTol) {
            out.t_ns.push_back(t);
            out.i_vals.push_back(trace.i_vals[k]);
            out.q_vals.push_back(trace.q_vals[k]);
        }
    }
    if (out.size() == 0) throw DomainError("readout window selects no samples");
    return out;
}

RegressionResult regress_populations(const IQTrace &measured, const PureStateResponses &basis, bool simplex) {
    for (int k = 0; k < 3; ++k) require_same_grid(measured, basis[k]);
    const Eigen::VectorXd y = stacked(measured);
    Eigen::MatrixXd x(y.size(), 3);
    for (int k = 0; k < 3; ++k) x.col(k) = stacked(basis[k]);

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto &s = svd.singularValues();
    const double cond = s(2) > 0.0 ? s(0) / s(2) : std::numeric_limits<double>::infinity();
    if (!(cond <= 1e6)) {
        throw DegenerateError("pure-state response basis is ill-conditioned (condition number " +
                              std::to_string(cond) + ")");
    }

    Eigen::Vector3d p = svd.solve(y);
    if (simplex) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::Vector3d best_p = Eigen::Vector3d::Zero();
        for (int mask = 1; mask < 8; ++mask) {
            std::vector<int> free;
            for (int k = 0; k < 3; ++k) {
                if (mask & (1 << k)) free.push_back(k);
            }
            const int m = static_cast<int>(free.size());
            Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(m + 1, m + 1);
            Eigen::VectorXd rhs(m + 1);
            for (int a = 0; a < m; ++a) {
                for (int b = 0; b < m; ++b) kkt(a, b) = x.col(free[a]).dot(x.col(free[b]));
                kkt(a, m) = kkt(m, a) = 1.0;
                rhs(a) = x.col(free[a]).dot(y);
            }
            rhs(m) = 1.0;
            const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
            Eigen::Vector3d cand = Eigen::Vector3d::Zero();
            bool feasible = true;
            for (int a = 0; a < m; ++a) {
                cand(free[a]) = sol(a);
                if (sol(a) < 0.0) feasible = false;
            }
            if (!feasible) continue;
            const double r = (x * cand - y).squaredNorm();
            if (r < best) {
                best = r;
                best_p = cand;
            }
        }
        p = best_p;
    }
    RegressionResult out;
    out.populations = {p(0), p(1), p(2)};
    out.residual_rms = std::sqrt((x * p - y).squaredNorm() / double(y.size()));
    out.condition_number = cond;
    return out;
}

double quantize12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

IQTrace quantize(const IQTrace &trace) {
    IQTrace out = trace;
    for (auto *col : {&out.t_ns, &out.i_vals, &out.q_vals}) {
        for (double &v : *col) v = quantize12(v);
    }
    return out;
}

void write_traces_csv(std::ostream &os, const std::vector<IQTrace> &traces) {
    os << "t_ns,I,Q,label\n";
    char buf[128];
    for (const auto &t : traces) {
        t.validate();
        for (size_t k = 0; k < t.size(); ++k) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,", t.t_ns[k], t.i_vals[k], t.q_vals[k]);
            os << buf << t.label << '\n';
        }
    }
}

std::vector<IQTrace> read_traces_csv(std::istream &is) {
    std::string line;
    if (!std::getline(is, line)) throw DomainError("trace file is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t_ns,I,Q,label") throw DomainError("unexpected trace header '" + line + "'");
    std::vector<IQTrace> out;
    long row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string f[4];
        for (int k = 0; k < 4; ++k) {
            if (!std::getline(ss, f[k], ',')) throw DomainError("trace row " + std::to_string(row) + " is malformed");
        }
        double v[3];
        for (int k = 0; k < 3; ++k) {
            char *end = nullptr;
            v[k] = std::strtod(f[k].c_str(), &end);
            if (end == f[k].c_str() || *end != '\0') {
                throw DomainError("trace row " + std::to_string(row) + " has a non-numeric field");
            }
        }
        auto it = std::find_if(out.begin(), out.end(), [&](const IQTrace &t) { return t.label == f[3]; });
        if (it == out.end()) {
            out.push_back(IQTrace{{}, {}, {}, f[3]});
            it = std::prev(out.end());
        }
        it->t_ns.push_back(v[0]);
        it->i_vals.push_back(v[1]);
        it->q_vals.push_back(v[2]);
    }
    for (const auto &t : out) t.validate();
    return out;
}

}  // namespace qthermo
