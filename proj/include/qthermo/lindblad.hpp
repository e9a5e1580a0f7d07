#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qthermo/envelope.hpp"
#include "qthermo/hilbert.hpp"
#include "qthermo/ode.hpp"

namespace qthermo {

using SparseSuper = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// Rates are inverse lifetimes in MHz (1/us); kappa is kappa/2pi in MHz.
struct DissipationSpec {
    double gamma_eg_mhz = 0.02;
    double gamma_fe_mhz = 0.04;
    /// Relaxation of the levels above f. Unset means 1% of gamma_fe: just
    /// enough to make the steady state unique.
    std::optional<double> gamma_df_mhz;
    /// Unset means f_r / Q_loaded.
    std::optional<double> kappa_mhz;
    double bath_t_mk = 150.0;
    /// Optional pure dephasing of the transmon (rate of the g-e coherence), MHz.
    double dephasing_mhz = 0.0;

    double gamma_df() const;
    double kappa_for(const ResonatorSpec &r) const;
    void validate(const ResonatorSpec &r) const;
    /// Every rate zero.
    static DissipationSpec none(double bath_t_mk = 150.0);
};

struct ThermalOccupations {
    double n_eg = 0.0;
    double n_fe = 0.0;
    double n_r = 0.0;
    double n_df = 0.0;
};

/// 1 / (exp(h f / k_B T) - 1).
double bose_occupation(double f_ghz, double t_mk);
ThermalOccupations thermal_occupations(const LevelEnergies &levels, double fr_ghz, double t_mk);

struct JumpOperator {
    std::string name;
    double rate_per_ns = 0.0;
    /// Already scaled by sqrt(rate).
    Eigen::MatrixXcd op;
};

/// Eigenstates of the static Hamiltonian, labelled by the bare state they
/// overlap most. Column index(k, n) holds the dressed |k, n>.
struct DressedBasis {
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd energies_ghz;  // relative to the dressed ground state
};

struct LiouvillianSpec {
    SystemSpec system;
    DissipationSpec dissipation;
    TransmonEigensystem transmon;
    CompositeOperators ops;
    ThermalOccupations occupations;
    std::vector<JumpOperator> jumps;
    /// Excitation-conserving transmon-resonator exchange, in GHz.
    Eigen::MatrixXcd coupling;
    /// Raising part of the charge operator, normalized to 1 on g->e.
    Eigen::MatrixXcd drive_raise;
    DressedBasis dressed;
    /// Excitation number k + n of each basis state.
    Eigen::VectorXi excitations;

    /// Sparse superoperator pieces (column-major vectorization).
    SparseSuper dissipator;
    SparseSuper drive_plus, drive_minus;  // -i[X, .], -i[X^dag, .]
    SparseSuper probe_plus, probe_minus;  // X = a^dag

    int dim() const { return ops.space.dim(); }
    /// Storage frame for states handed in and out: rotating at f_r per excitation.
    double reference_frame_ghz() const { return system.resonator.fr_ghz; }

    /// Static Hamiltonian in the frame rotating at frame_ghz per excitation, rad/ns.
    Eigen::MatrixXcd hamiltonian(double frame_ghz) const;
    /// Undriven generator in a given frame.
    SparseSuper generator(double frame_ghz) const;
    Eigen::MatrixXcd generator_dense(double frame_ghz) const;

    /// Dressed transition frequency between transmon levels k and l with the
    /// resonator empty, GHz.
    double dressed_transition_ghz(int k, int l) const;
    /// Projector onto the dressed transmon level k (all photon numbers).
    Eigen::MatrixXcd level_projector(int k) const;
};

LiouvillianSpec build_liouvillian(const SystemSpec &system, const DissipationSpec &dissipation);

/// Dressed transmon populations, one per retained level (not renormalized).
std::vector<double> level_populations(const LiouvillianSpec &L, const Eigen::MatrixXcd &rho);
/// First three dressed populations as a Populations record.
Populations transmon_populations(const LiouvillianSpec &L, const Eigen::MatrixXcd &rho);
/// <a> in the storage frame.
cplx field_expectation(const LiouvillianSpec &L, const Eigen::MatrixXcd &rho);

/// Dressed state sum_k p_k |k><k| tensored with a thermal resonator at the
/// given photon occupation (diagonal in the dressed basis).
DensityMatrix dressed_product_state(const LiouvillianSpec &L, const std::vector<double> &level_weights,
                                    double n_photons = 0.0);

/// Multiplies element (i, j) of a vectorized state by
/// exp(i 2pi (to - from) (N_i - N_j) t): moves a state between rotating frames.
void change_frame(const LiouvillianSpec &L, Eigen::VectorXcd &vec_rho, double from_ghz, double to_ghz,
                  double t_ns);

struct Trajectory {
    std::vector<double> t_ns;
    std::vector<DensityMatrix> states;  // storage frame
    OdeStats stats;
};

/// Integrates the master equation from rho0 at t_grid.front(). Each segment
/// between pulse edges runs in the frame of the active carrier.
Trajectory evolve(const DensityMatrix &rho0, const LiouvillianSpec &L, const std::vector<PulseEnvelope> &drives,
                  const std::vector<double> &t_grid, const OdeOptions &opts = {});

/// Closed-system Schrodinger evolution of a pure state (storage frame) from t0 to t1.
Eigen::VectorXcd evolve_pure(const Eigen::VectorXcd &psi0, const LiouvillianSpec &L,
                             const std::vector<PulseEnvelope> &drives, double t0, double t1,
                             const OdeOptions &opts = {});

/// Null vector of the undriven generator, trace-normalized.
DensityMatrix steady_state(const LiouvillianSpec &L);

/// CSV columns t_ns,p_g,p_e,p_f,p_d,re_a,im_a.
void write_trajectory_csv(std::ostream &os, const LiouvillianSpec &L, const Trajectory &traj);

}  // namespace qthermo
