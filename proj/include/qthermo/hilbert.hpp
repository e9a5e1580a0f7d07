#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace qthermo {

using cplx = std::complex<double>;

/// Single-junction-equivalent transmon in the charge basis n in [-N, N].
struct TransmonSpec {
    double ec_ghz = 0.35;
    double ej_max_ghz = 20.412;
    double flux_quantum_fraction = 0.15;
    double gate_charge = 0.0;
    int n_transmon_levels = 4;
    int n_charge_states = 20;

    /// E_J(flux) = E_J^max |cos(pi flux / flux_0)|, symmetric junctions.
    double ej_ghz() const;
    void validate() const;
};

/// Readout resonator. n_fock is the largest photon number kept, so the
/// Fock space has n_fock + 1 states.
struct ResonatorSpec {
    double fr_ghz = 4.906;
    int n_fock = 6;
    double coupling_ghz = 0.02;
    double q_loaded = 1800.0;

    int fock_dim() const { return n_fock + 1; }
    /// kappa/2pi implied by the loaded quality factor, in MHz.
    double kappa_mhz() const { return 1e3 * fr_ghz / q_loaded; }
    /// Q_loaded / (4 f_r), in ns.
    double ring_up_ns() const { return q_loaded / (4.0 * fr_ghz); }
    void validate() const;
};

struct SystemSpec {
    TransmonSpec transmon;
    ResonatorSpec resonator;
    int max_dim = 128;

    void validate() const;
};

/// Lowest three transmon energies relative to the ground state, in GHz.
/// Transition frequencies are stored positive.
struct LevelEnergies {
    double e_g = 0.0;
    double e_e = 0.0;
    double e_f = 0.0;
    double f_ge_ghz = 0.0;
    double f_gf_ghz = 0.0;
    double f_ef_ghz = 0.0;

    static LevelEnergies from_transitions(double f_ge_ghz, double f_gf_ghz);
    static LevelEnergies from_energies(double e_g, double e_e, double e_f);
    double anharmonicity_ghz() const { return f_ge_ghz - f_ef_ghz; }
    /// Throws DomainError unless e_g < e_e < e_f.
    void validate() const;
};

struct TransmonEigensystem {
    /// Retained eigenenergies relative to the ground state, ascending.
    std::vector<double> energies_ghz;
    /// Columns are eigenvectors in the charge basis.
    Eigen::MatrixXd charge_vectors;
    /// Charge operator in the retained eigenbasis. Signs are fixed so that
    /// n_{k,k+1} >= 0.
    Eigen::MatrixXd charge_operator;
    LevelEnergies levels;

    int n_levels() const { return static_cast<int>(energies_ghz.size()); }
};

/// Exact diagonalization of 4E_c(n - n_g)^2 - E_J cos(phi). The retained
/// transition frequencies are checked against a run with twice the charge
/// truncation; a change above 1e-9 GHz raises TruncationError.
TransmonEigensystem diagonalize_transmon(const TransmonSpec &spec);

/// Transmon-major product space: index(k, n) = k * fock_dim + n.
struct CompositeSpace {
    int n_levels = 0;
    int fock_dim = 0;

    int dim() const { return n_levels * fock_dim; }
    int index(int level, int photons) const { return level * fock_dim + photons; }
    int level_of(int idx) const { return idx / fock_dim; }
    int photons_of(int idx) const { return idx % fock_dim; }
    /// Excitation number k + n of a basis state.
    int excitations_of(int idx) const { return level_of(idx) + photons_of(idx); }
};

struct CompositeOperators {
    CompositeSpace space;
    Eigen::MatrixXcd charge;         // n ⊗ 1 in the transmon eigenbasis
    Eigen::MatrixXcd a;              // 1 ⊗ a
    Eigen::MatrixXcd adag;           // 1 ⊗ a†
    Eigen::MatrixXcd photon_number;  // 1 ⊗ a†a

    /// |k><l| ⊗ 1.
    Eigen::MatrixXcd transition(int k, int l) const;
    Eigen::MatrixXcd identity() const;
};

CompositeOperators build_composite_operators(const TransmonEigensystem &eig, const ResonatorSpec &rspec,
                                             int max_dim = 128);
CompositeOperators build_composite_operators(const TransmonSpec &tspec, const ResonatorSpec &rspec,
                                             int max_dim = 128);

struct Populations {
    double p_g = 0.0;
    double p_e = 0.0;
    double p_f = 0.0;

    double sum() const { return p_g + p_e + p_f; }
    /// Rescaled so that p_g + p_e + p_f = 1.
    Populations normalized() const;
    void validate() const;
    double operator[](int i) const { return i == 0 ? p_g : (i == 1 ? p_e : p_f); }
};

/// Boltzmann weights of g, e, f normalized over the three levels.
Populations thermal_populations(const LevelEnergies &levels, double t_mk);
/// Boltzmann weights over an arbitrary ladder of energies (GHz), normalized.
std::vector<double> boltzmann_weights(const std::vector<double> &energies_ghz, double t_mk);

class DensityMatrix {
   public:
    DensityMatrix() = default;
    explicit DensityMatrix(Eigen::MatrixXcd m);

    const Eigen::MatrixXcd &matrix() const { return m_; }
    Eigen::Index dim() const { return m_.rows(); }

    double trace_deviation() const;
    double hermiticity_error() const;
    double min_eigenvalue() const;
    /// Throws DomainError when any invariant is violated beyond the tolerances.
    void check(double herm_tol = 1e-12, double trace_tol = 1e-10, double eig_tol = 1e-10) const;

   private:
    Eigen::MatrixXcd m_;
};

/// Diagonal thermal state of the three-level system.
DensityMatrix thermal_density_matrix(const LevelEnergies &levels, double t_mk);
/// Diagonal thermal state over every retained transmon level.
DensityMatrix thermal_density_matrix(const TransmonEigensystem &eig, double t_mk);

}  // namespace qthermo
