#include "qthermo/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qthermo/constants.hpp"
#include "qthermo/errors.hpp"

namespace qthermo {

namespace {

struct ChargeSolution {
    Eigen::VectorXd energies;
    Eigen::MatrixXd vectors;
};

ChargeSolution solve_charge_basis(const TransmonSpec &spec, int half_width) {
    const int size = 2 * half_width + 1;
    const double ej = spec.ej_ghz();
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(size, size);
    for (int i = 0; i < size; ++i) {
        const double n = i - half_width;
        h(i, i) = 4.0 * spec.ec_ghz * (n - spec.gate_charge) * (n - spec.gate_charge);
        if (i + 1 < size) {
            h(i, i + 1) = -0.5 * ej;
            h(i + 1, i) = -0.5 * ej;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw Error("transmon eigensolver did not converge");
    }
    return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace

double TransmonSpec::ej_ghz() const {
    return ej_max_ghz * std::abs(std::cos(std::numbers::pi * flux_quantum_fraction));
}

void TransmonSpec::validate() const {
    if (!(ec_ghz > 0.0)) throw DomainError("transmon ec_ghz must be positive");
    if (!(ej_max_ghz > 0.0)) throw DomainError("transmon ej_max_ghz must be positive");
    if (n_transmon_levels < 3) throw DomainError("transmon needs at least 3 retained levels");
    if (n_charge_states < 2 * n_transmon_levels) {
        throw DomainError("n_charge_states must be at least twice n_transmon_levels");
    }
    if (!std::isfinite(flux_quantum_fraction) || !std::isfinite(gate_charge)) {
        throw DomainError("transmon flux and gate charge must be finite");
    }
}

void ResonatorSpec::validate() const {
    if (!(fr_ghz > 0.0)) throw DomainError("resonator fr_ghz must be positive");
    if (n_fock < 2) throw DomainError("resonator n_fock must be at least 2");
    if (!(coupling_ghz >= 0.0)) throw DomainError("resonator coupling_ghz must be non-negative");
    if (!(q_loaded > 0.0)) throw DomainError("resonator q_loaded must be positive");
}

void SystemSpec::validate() const {
    transmon.validate();
    resonator.validate();
    if (transmon.n_transmon_levels * resonator.fock_dim() > max_dim) {
        throw ResourceError("composite dimension " +
                            std::to_string(transmon.n_transmon_levels * resonator.fock_dim()) +
                            " exceeds max_dim " + std::to_string(max_dim));
    }
}

LevelEnergies LevelEnergies::from_energies(double e_g, double e_e, double e_f) {
    LevelEnergies out;
    out.e_g = 0.0;
    out.e_e = e_e - e_g;
    out.e_f = e_f - e_g;
    out.f_ge_ghz = out.e_e;
    out.f_gf_ghz = out.e_f;
    out.f_ef_ghz = out.e_f - out.e_e;
    return out;
}

LevelEnergies LevelEnergies::from_transitions(double f_ge_ghz, double f_gf_ghz) {
    return from_energies(0.0, f_ge_ghz, f_gf_ghz);
}

void LevelEnergies::validate() const {
    if (!(e_g < e_e && e_e < e_f)) {
        throw DomainError("level energies must satisfy e_g < e_e < e_f");
    }
}

TransmonEigensystem diagonalize_transmon(const TransmonSpec &spec) {
    spec.validate();
    const int levels = spec.n_transmon_levels;
    const int half_width = spec.n_charge_states;

    ChargeSolution base = solve_charge_basis(spec, half_width);
    ChargeSolution doubled = solve_charge_basis(spec, 2 * half_width);
    for (int k = 1; k < levels; ++k) {
        const double f_base = base.energies(k) - base.energies(0);
        const double f_doubled = doubled.energies(k) - doubled.energies(0);
        if (std::abs(f_base - f_doubled) >= 1e-9) {
            throw TruncationError("charge truncation N=" + std::to_string(half_width) +
                                  " not converged for level " + std::to_string(k) + " (shift " +
                                  std::to_string(std::abs(f_base - f_doubled)) + " GHz)");
        }
    }

    TransmonEigensystem out;
    out.energies_ghz.resize(levels);
    for (int k = 0; k < levels; ++k) out.energies_ghz[k] = base.energies(k) - base.energies(0);
    out.charge_vectors = base.vectors.leftCols(levels);

    Eigen::VectorXd n_diag(2 * half_width + 1);
    for (int i = 0; i < n_diag.size(); ++i) n_diag(i) = i - half_width;
    auto charge_in_eigenbasis = [&]() {
        return Eigen::MatrixXd(out.charge_vectors.transpose() * n_diag.asDiagonal() * out.charge_vectors);
    };
    Eigen::MatrixXd n_op = charge_in_eigenbasis();
    for (int k = 0; k + 1 < levels; ++k) {
        if (n_op(k, k + 1) < 0.0) {
            out.charge_vectors.col(k + 1) *= -1.0;
            n_op = charge_in_eigenbasis();
        }
    }
    out.charge_operator = n_op;
    out.levels = LevelEnergies::from_energies(out.energies_ghz[0], out.energies_ghz[1], out.energies_ghz[2]);
    return out;
}

Eigen::MatrixXcd CompositeOperators::transition(int k, int l) const {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(space.dim(), space.dim());
    for (int n = 0; n < space.fock_dim; ++n) out(space.index(k, n), space.index(l, n)) = 1.0;
    return out;
}

Eigen::MatrixXcd CompositeOperators::identity() const {
    return Eigen::MatrixXcd::Identity(space.dim(), space.dim());
}

CompositeOperators build_composite_operators(const TransmonEigensystem &eig, const ResonatorSpec &rspec,
                                             int max_dim) {
    rspec.validate();
    CompositeOperators ops;
    ops.space = CompositeSpace{eig.n_levels(), rspec.fock_dim()};
    const int dim = ops.space.dim();
    if (dim > max_dim) {
        throw ResourceError("composite dimension " + std::to_string(dim) + " exceeds max_dim " +
                            std::to_string(max_dim));
    }
    ops.charge = Eigen::MatrixXcd::Zero(dim, dim);
    ops.a = Eigen::MatrixXcd::Zero(dim, dim);
    ops.photon_number = Eigen::MatrixXcd::Zero(dim, dim);
    for (int k = 0; k < ops.space.n_levels; ++k) {
        for (int n = 0; n < ops.space.fock_dim; ++n) {
            const int row = ops.space.index(k, n);
            for (int l = 0; l < ops.space.n_levels; ++l) {
                ops.charge(row, ops.space.index(l, n)) = eig.charge_operator(k, l);
            }
            if (n + 1 < ops.space.fock_dim) ops.a(row, ops.space.index(k, n + 1)) = std::sqrt(double(n + 1));
            ops.photon_number(row, row) = double(n);
        }
    }
    ops.adag = ops.a.adjoint();
    return ops;
}

CompositeOperators build_composite_operators(const TransmonSpec &tspec, const ResonatorSpec &rspec,
                                             int max_dim) {
    if (tspec.n_transmon_levels * rspec.fock_dim() > max_dim) {
        throw ResourceError("composite dimension exceeds max_dim " + std::to_string(max_dim));
    }
    return build_composite_operators(diagonalize_transmon(tspec), rspec, max_dim);
}

Populations Populations::normalized() const {
    const double s = sum();
    if (!(s > 0.0)) throw DomainError("cannot normalize populations with non-positive sum");
    return {p_g / s, p_e / s, p_f / s};
}

void Populations::validate() const {
    for (double p : {p_g, p_e, p_f}) {
        if (!(p >= 0.0 && p <= 1.0)) throw DomainError("population outside [0, 1]");
    }
    if (sum() > 1.0 + 1e-12) throw DomainError("populations sum above 1");
}

std::vector<double> boltzmann_weights(const std::vector<double> &energies_ghz, double t_mk) {
    if (!(t_mk > 0.0)) throw DomainError("temperature must be positive, got " + std::to_string(t_mk) + " mK");
    const double e_min = *std::min_element(energies_ghz.begin(), energies_ghz.end());
    std::vector<double> w(energies_ghz.size());
    double z = 0.0;
    for (size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(-units::reduced_energy(energies_ghz[i] - e_min, t_mk));
        z += w[i];
    }
    for (double &x : w) x /= z;
    return w;
}

Populations thermal_populations(const LevelEnergies &levels, double t_mk) {
    const auto w = boltzmann_weights({levels.e_g, levels.e_e, levels.e_f}, t_mk);
    return {w[0], w[1], w[2]};
}

DensityMatrix::DensityMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionError("density matrix must be square");
}

double DensityMatrix::trace_deviation() const { return std::abs(m_.trace() - cplx(1.0, 0.0)); }

double DensityMatrix::hermiticity_error() const {
    if (m_.size() == 0) return 0.0;
    return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
    Eigen::MatrixXcd herm = 0.5 * (m_ + m_.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::check(double herm_tol, double trace_tol, double eig_tol) const {
    if (hermiticity_error() > herm_tol) throw DomainError("density matrix is not Hermitian");
    if (trace_deviation() > trace_tol) throw DomainError("density matrix trace differs from 1");
    if (min_eigenvalue() < -eig_tol) throw DomainError("density matrix has a negative eigenvalue");
}

DensityMatrix thermal_density_matrix(const LevelEnergies &levels, double t_mk) {
    const Populations p = thermal_populations(levels, t_mk);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
    m(0, 0) = p.p_g;
    m(1, 1) = p.p_e;
    m(2, 2) = p.p_f;
    return DensityMatrix(std::move(m));
}

DensityMatrix thermal_density_matrix(const TransmonEigensystem &eig, double t_mk) {
    const auto w = boltzmann_weights(eig.energies_ghz, t_mk);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(eig.n_levels(), eig.n_levels());
    for (int k = 0; k < eig.n_levels(); ++k) m(k, k) = w[k];
    return DensityMatrix(std::move(m));
}

}  // namespace qthermo
