#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "qthermo/constants.hpp"
#include "qthermo/errors.hpp"
#include "qthermo/hilbert.hpp"

using namespace qthermo;

namespace {

// Independent oracle: 4E_c(-i d/dphi)^2 - E_J cos(phi) on a periodic phase
// grid, fourth-order central differences (n_g = 0).
std::vector<double> phase_grid_levels(double ec, double ej, int levels, int m = 720) {
    const double h = 2.0 * M_PI / m;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m, m);
    const double c = 4.0 * ec / (12.0 * h * h);
    for (int i = 0; i < m; ++i) {
        const double phi = -M_PI + i * h;
        H(i, i) = 30.0 * c - ej * std::cos(phi);
        H(i, (i + 1) % m) += -16.0 * c;
        H(i, (i + m - 1) % m) += -16.0 * c;
        H(i, (i + 2) % m) += c;
        H(i, (i + m - 2) % m) += c;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
    std::vector<double> out;
    for (int k = 0; k < levels; ++k) out.push_back(es.eigenvalues()(k) - es.eigenvalues()(0));
    return out;
}

TransmonSpec sample_one() {
    TransmonSpec s;
    s.ec_ghz = 0.36;
    s.ej_max_ghz = 10.013;
    s.flux_quantum_fraction = 0.0;
    return s;
}

double direct_ratio(double f_ghz, double t_mk) {
    return std::exp(-6.62607015e-34 * f_ghz * 1e9 / (1.380649e-23 * t_mk * 1e-3));
}

}  // namespace

TEST(Transmon, ChargeLimitGivesParabolicLadder) {
    TransmonSpec s;
    s.flux_quantum_fraction = 0.5;  // E_J -> 0
    s.n_transmon_levels = 5;
    const auto eig = diagonalize_transmon(s);
    const double expected[5] = {0.0, 4.0, 4.0, 16.0, 16.0};
    for (int k = 0; k < 5; ++k) EXPECT_NEAR(eig.energies_ghz[k], expected[k] * s.ec_ghz, 1e-9) << "level " << k;
}

TEST(Transmon, SampleOneTransitionNearAsymptoticFormula) {
    // The sample parameters give f_ge close to 5.0 GHz, below the 5.7 GHz
    // maximum quoted for the measured device: the parameter set is not fully
    // self-consistent, so only the asymptotic formula is checked here.
    const auto s = sample_one();
    const auto eig = diagonalize_transmon(s);
    const double asymptotic = std::sqrt(8.0 * s.ej_max_ghz * s.ec_ghz) - s.ec_ghz;
    EXPECT_NEAR(eig.levels.f_ge_ghz, asymptotic, 0.02 * asymptotic);
    const auto oracle = phase_grid_levels(s.ec_ghz, s.ej_max_ghz, 3);
    EXPECT_NEAR(eig.levels.f_ge_ghz, oracle[1], 1e-6);
    EXPECT_NEAR(eig.levels.f_gf_ghz, oracle[2], 1e-6);
    EXPECT_NEAR(eig.levels.f_ge_ghz, 4.980685841, 1e-8);
}

TEST(Transmon, SampleOneAnharmonicityNearThreeHundredMegahertz) {
    // Exact diagonalization at E_c = 0.36 GHz gives about 0.45 GHz; the
    // quoted 0.3 GHz is not reachable with this charging energy.
    const auto eig = diagonalize_transmon(sample_one());
    EXPECT_NEAR(eig.levels.anharmonicity_ghz(), 0.3, 0.2 * 0.3);
}

TEST(Transmon, DefaultLevelsMatchPhaseGridOracle) {
    TransmonSpec s;
    const auto eig = diagonalize_transmon(s);
    const auto oracle = phase_grid_levels(s.ec_ghz, s.ej_ghz(), 4);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(eig.energies_ghz[k], oracle[k], 1e-6) << "level " << k;
    EXPECT_LT(eig.levels.e_g, eig.levels.e_e);
    EXPECT_LT(eig.levels.e_e, eig.levels.e_f);
}

TEST(Transmon, DoublingChargeTruncationIsConverged) {
    TransmonSpec a;
    TransmonSpec b = a;
    b.n_charge_states = 2 * a.n_charge_states;
    const auto ea = diagonalize_transmon(a), eb = diagonalize_transmon(b);
    for (int k = 1; k < a.n_transmon_levels; ++k) EXPECT_LT(std::abs(ea.energies_ghz[k] - eb.energies_ghz[k]), 1e-9);
}

TEST(Transmon, TooFewChargeStatesRaisesTruncationError) {
    TransmonSpec s;
    s.ej_max_ghz = 2000.0;
    s.flux_quantum_fraction = 0.0;
    s.n_charge_states = 8;
    EXPECT_THROW(diagonalize_transmon(s), TruncationError);
}

TEST(Transmon, InvalidSpecsRaiseDomainError) {
    TransmonSpec s;
    s.ec_ghz = 0.0;
    EXPECT_THROW(s.validate(), DomainError);
    s = TransmonSpec{};
    s.n_transmon_levels = 2;
    EXPECT_THROW(s.validate(), DomainError);
    s = TransmonSpec{};
    s.n_charge_states = 7;
    EXPECT_THROW(s.validate(), DomainError);
}

TEST(Transmon, FluxMappingIsSymmetricCosine) {
    TransmonSpec s;
    s.flux_quantum_fraction = 0.25;
    EXPECT_NEAR(s.ej_ghz(), s.ej_max_ghz * std::cos(M_PI / 4), 1e-12);
    s.flux_quantum_fraction = 0.75;
    EXPECT_NEAR(s.ej_ghz(), s.ej_max_ghz * std::cos(M_PI / 4), 1e-12);
    EXPECT_GE(s.ej_ghz(), 0.0);
}

TEST(Transmon, ChargeOperatorSignConvention) {
    const auto eig = diagonalize_transmon(TransmonSpec{});
    for (int k = 0; k + 1 < eig.n_levels(); ++k) EXPECT_GT(eig.charge_operator(k, k + 1), 0.0);
    EXPECT_LT((eig.charge_operator - eig.charge_operator.transpose()).norm(), 1e-12);
}

class Composite : public ::testing::Test {
   protected:
    CompositeOperators ops = build_composite_operators(TransmonSpec{}, ResonatorSpec{});
};

TEST_F(Composite, DimensionAndIndexing) {
    EXPECT_EQ(ops.space.dim(), 28);
    EXPECT_EQ(ops.space.index(2, 3), 2 * 7 + 3);
    EXPECT_EQ(ops.space.level_of(17), 2);
    EXPECT_EQ(ops.space.photons_of(17), 3);
}

TEST_F(Composite, AnnihilationKillsVacuum) {
    for (int k = 0; k < ops.space.n_levels; ++k) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(ops.space.dim());
        v(ops.space.index(k, 0)) = 1.0;
        EXPECT_EQ((ops.a * v).norm(), 0.0);
    }
}

TEST_F(Composite, NumberOperatorOnOnePhoton) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(ops.space.dim());
    v(ops.space.index(1, 1)) = 1.0;
    EXPECT_NEAR(std::abs(v.dot(ops.adag * ops.a * v) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(v.dot(ops.photon_number * v) - 1.0), 0.0, 1e-15);
}

TEST_F(Composite, ProjectorAlgebra) {
    const Eigen::MatrixXcd gg = ops.transition(0, 1) * ops.transition(1, 0);
    EXPECT_LT((gg - ops.transition(0, 0)).norm(), 1e-15);
}

TEST_F(Composite, CanonicalCommutatorBelowTopFockState) {
    const Eigen::MatrixXcd comm = ops.a * ops.adag - ops.adag * ops.a;
    for (int i = 0; i < ops.space.dim(); ++i) {
        if (ops.space.photons_of(i) == ops.space.fock_dim - 1) continue;
        for (int j = 0; j < ops.space.dim(); ++j) {
            const double expected = i == j ? 1.0 : 0.0;
            EXPECT_NEAR(std::abs(comm(i, j) - expected), 0.0, 1e-14);
        }
    }
}

TEST_F(Composite, ChargeCommutesWithResonator) {
    EXPECT_LT((ops.charge * ops.a - ops.a * ops.charge).norm(), 1e-14);
}

TEST(CompositeGuard, DimensionOverflowRaisesResourceError) {
    ResonatorSpec r;
    r.n_fock = 40;
    EXPECT_THROW(build_composite_operators(TransmonSpec{}, r, 128), ResourceError);
}

TEST(ThermalPopulations, DegenerateLevelsAreUniform) {
    const auto p = thermal_populations(LevelEnergies::from_energies(0, 0, 0), 100.0);
    EXPECT_NEAR(p.p_g, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(p.p_e, 1.0 / 3.0, 1e-15);
    EXPECT_NEAR(p.p_f, 1.0 / 3.0, 1e-15);
}

TEST(ThermalPopulations, ZeroTemperatureLimit) {
    const auto p = thermal_populations(LevelEnergies::from_transitions(5.7, 11.1), 0.001);
    EXPECT_NEAR(p.p_g, 1.0, 1e-12);
    EXPECT_NEAR(p.p_e, 0.0, 1e-12);
    EXPECT_NEAR(p.p_f, 0.0, 1e-12);
}

TEST(ThermalPopulations, BoltzmannRatioByDirectEvaluation) {
    const auto levels = LevelEnergies::from_transitions(5.7, 5.7 + 5.4);
    const auto p = thermal_populations(levels, 200.0);
    EXPECT_NEAR(p.p_e / p.p_g, direct_ratio(5.7, 200.0), 1e-13);
    EXPECT_NEAR(p.p_f / p.p_g, direct_ratio(11.1, 200.0), 1e-13);
    EXPECT_NEAR(p.p_e / p.p_g, 0.254671, 1e-6);
    EXPECT_GT(p.p_e, 0.01);
    EXPECT_LT(p.p_e, 0.20);
}

TEST(ThermalPopulations, NonPositiveTemperatureRaises) {
    const auto levels = LevelEnergies::from_transitions(5.7, 11.1);
    EXPECT_THROW(thermal_populations(levels, 0.0), DomainError);
    EXPECT_THROW(thermal_populations(levels, -5.0), DomainError);
}

TEST(ThermalPopulations, NormalizedAndMonotoneOverRange) {
    const auto levels = LevelEnergies::from_transitions(6.74, 13.14);
    double prev_ratio = 0.0, prev_pg = 2.0;
    for (double t = 1.0; t <= 2000.0; t *= 1.07) {
        const auto p = thermal_populations(levels, t);
        EXPECT_NEAR(p.sum(), 1.0, 1e-12);
        const double ratio = p.p_e / p.p_g;
        EXPECT_GT(ratio, prev_ratio);
        // p_g rounds to 1 below ~20 mK.
        EXPECT_LE(p.p_g, prev_pg);
        if (t > 20.0) EXPECT_LT(p.p_g, prev_pg) << t;
        prev_ratio = ratio;
        prev_pg = p.p_g;
    }
}

TEST(ThermalDensityMatrix, GroundProjectorAtZeroTemperature) {
    const auto rho = thermal_density_matrix(LevelEnergies::from_transitions(6.74, 13.14), 0.001);
    Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(rho.dim(), rho.dim());
    expected(0, 0) = 1.0;
    EXPECT_LT((rho.matrix() - expected).norm(), 1e-12);
}

TEST(ThermalDensityMatrix, InvariantsAndDiagonal) {
    const auto levels = LevelEnergies::from_transitions(6.74, 13.14);
    for (double t : {20.0, 150.0, 900.0}) {
        const auto rho = thermal_density_matrix(levels, t);
        EXPECT_NO_THROW(rho.check());
        const auto p = thermal_populations(levels, t);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(rho.matrix()(k, k).real(), p[k], 1e-14);
        EXPECT_EQ((rho.matrix() - Eigen::MatrixXcd(rho.matrix().diagonal().asDiagonal())).norm(), 0.0);
    }
}

TEST(ThermalDensityMatrix, AllRetainedLevelsFollowBoltzmann) {
    const auto eig = diagonalize_transmon(TransmonSpec{});
    const auto rho = thermal_density_matrix(eig, 150.0);
    ASSERT_EQ(rho.dim(), eig.n_levels());
    EXPECT_NO_THROW(rho.check());
    for (int k = 1; k < eig.n_levels(); ++k) {
        const double ratio = rho.matrix()(k, k).real() / rho.matrix()(0, 0).real();
        EXPECT_NEAR(ratio, direct_ratio(eig.energies_ghz[k], 150.0), 1e-13);
    }
}

TEST(DensityMatrixChecks, RejectsInvalidStates) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
    m(0, 0) = 1.2;
    m(1, 1) = -0.2;
    EXPECT_THROW(DensityMatrix(m).check(), DomainError);
    m(0, 0) = 0.5;
    m(1, 1) = 0.4;
    EXPECT_THROW(DensityMatrix(m).check(), DomainError);
    m(1, 1) = 0.5;
    m(0, 1) = 0.1;
    EXPECT_THROW(DensityMatrix(m).check(), DomainError);
}

TEST(Constants, ReducedEnergyUsesCodata) {
    EXPECT_NEAR(units::kMilliKelvinPerGHz, 6.62607015e-34 * 1e9 / 1.380649e-23 * 1e3, 1e-12);
    EXPECT_NEAR(units::reduced_energy(1.0, units::kMilliKelvinPerGHz), 1.0, 1e-15);
}
