#pragma once

namespace qthermo {

enum class PulseKind { GaussianDrive, RectangularProbe };

/// Classical control field. A GaussianDrive couples to the transmon charge
/// (ladder-raising part, rotating-wave approximation), a RectangularProbe
/// couples to the resonator field. Amplitudes are in GHz: the drive term is
/// 2pi * amplitude * shape(t) * (e^{-i theta} X + h.c.), with
/// theta = 2pi (carrier - frame) t + phase_rad.
struct PulseEnvelope {
    PulseKind kind = PulseKind::GaussianDrive;
    double carrier_ghz = 0.0;
    double amplitude = 0.0;
    double duration_ns = 0.0;
    double sigma_ns = 0.0;  // GaussianDrive only; duration = 4 sigma
    double start_ns = 0.0;
    double phase_rad = 0.0;

    /// Gaussian truncated at +-2 sigma with the pedestal removed, so the
    /// envelope is continuous and vanishes at both edges.
    static PulseEnvelope gaussian(double carrier_ghz, double amplitude, double duration_ns, double start_ns = 0.0);
    static PulseEnvelope probe(double carrier_ghz, double amplitude, double duration_ns, double start_ns = 0.0);

    double end_ns() const { return start_ns + duration_ns; }
    /// Dimensionless envelope, peak value 1.
    double shape(double t_ns) const;
    /// Integral of shape over the pulse, in ns.
    double area_ns() const;
    void validate() const;
};

}  // namespace qthermo
