#pragma once

#include <numbers>

// Unit conventions used throughout the library:
//   frequencies in GHz (E/h for energies), times in ns, temperatures in mK,
//   dissipation rates in MHz (1/us) as they are quoted for T1 and kappa/2pi.
// Every conversion between these and SI lives here.

namespace qthermo::units {

inline constexpr double kPlanck = 6.62607015e-34;     // J s
inline constexpr double kBoltzmann = 1.380649e-23;    // J / K
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// h / k_B expressed in mK per GHz.
inline constexpr double kMilliKelvinPerGHz = kPlanck * 1e9 / kBoltzmann * 1e3;

/// Dimensionless h f / (k_B T) for f in GHz and T in mK.
constexpr double reduced_energy(double f_ghz, double t_mk) { return f_ghz * kMilliKelvinPerGHz / t_mk; }

/// Cycle frequency in GHz to angular frequency in rad/ns.
constexpr double angular(double f_ghz) { return kTwoPi * f_ghz; }

/// A rate quoted in MHz (events per us) to events per ns.
constexpr double rate_per_ns(double rate_mhz) { return rate_mhz * 1e-3; }

/// kappa/2pi in MHz to the energy decay rate kappa in 1/ns.
constexpr double linewidth_per_ns(double kappa_over_2pi_mhz) { return kTwoPi * kappa_over_2pi_mhz * 1e-3; }

}  // namespace qthermo::units
