#pragma once

// Two-photon indistinguishability after propagation through fibers of unequal
// length.  Units: ps, km, rad/ps.  Spectral amplitudes are functions of the
// detuning from the nominal carrier and are L2-normalized.

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

namespace qnet_asym::dispersion {

/// phi(w) = (2 pi sigma^2)^{-1/4} exp(-w^2 / (4 sigma^2)); |phi|^2 has std sigma.
struct GaussianPacket {
    double sigma_rad_per_ps;
};

/// phi(w) = sqrt(tau/pi) / (1 - i tau w): a one-sided exponential pulse.
struct LorentzianPacket {
    double tau_ps;
};

/// Piecewise-linear interpolation of samples, zero outside the grid.
struct SampledPacket {
    std::vector<double> omega_rad_per_ps;  ///< strictly increasing
    std::vector<std::complex<double>> amplitude;
};

using WavePacketSpec = std::variant<GaussianPacket, LorentzianPacket, SampledPacket>;

/// L2 norm squared of the interpolated sampled spectrum (exact for the interpolant).
double sampled_norm2(const SampledPacket& p);

/// Copy of p scaled to unit L2 norm.  Throws InvalidParameter for a zero spectrum.
SampledPacket normalize(SampledPacket p);

/// Throws InvalidParameter unless the packet is usable (positive widths,
/// increasing grid, norm within 1e-9 of 1).
void validate(const WavePacketSpec& p);

/// Spectral amplitude of the packet at detuning w.
std::complex<double> amplitude(const WavePacketSpec& p, double w);

struct DispersionContext {
    double delta_l_km = 0.0;          ///< L_left - L_right
    double beta2_ps2_per_km = 0.0;
    double beta3_ps3_per_km = 0.0;
    double delta_t_ps = 0.0;          ///< arrival-time mismatch
    double delta_omega_rad_per_ps = 0.0;  ///< carrier mismatch; left shifted by -dw/2, right by +dw/2
};

/// A truncated expansion together with whether it is inside its useful range.
struct ApproxVisibility {
    double value;
    bool valid;
    double expansion;  ///< the small quantity the expansion is in
};

struct NumericVisibility {
    double value;
    double error;        ///< bound-style estimate on |V - value|
    double mu_error;     ///< estimate on the overlap amplitude
    std::size_t panels;
};

struct NumericOptions {
    double abs_tol = 1e-12;              ///< target for the quadrature part of the overlap
    double tail_tol = 1e-12;             ///< target for each truncated tail
    double neglect_stationary = 1e-8;    ///< stationary points outside the bulk below this size are dropped (and counted in the error)
    std::size_t max_panels = 4'000'000;
};

double gaussian_visibility_exact_no_tod(double sigma, const DispersionContext& ctx);

/// Valid while 1 - V < 0.1.
ApproxVisibility gaussian_visibility_leading(double sigma, const DispersionContext& ctx);

/// First order in dL*beta3.  expansion = |dL beta3 sigma^3|, valid below 0.1.
ApproxVisibility gaussian_visibility_first_order_tod(double sigma, const DispersionContext& ctx);

/// Fresnel closed form; only dL*beta2 enters (dt, dw and beta3 are ignored).
double lorentzian_visibility_exact(double tau, const DispersionContext& ctx);

/// V = 1 - (2/sqrt(pi)) sqrt|dL beta2| / tau, clamped to [0,1]; valid while the correction is <= 0.3.
ApproxVisibility lorentzian_visibility_linear(double tau, const DispersionContext& ctx);

/// Closed form when dt = dw = beta3 = 0, numeric_visibility otherwise.
double lorentzian_visibility(double tau, const DispersionContext& ctx);

/// V = |mu|^2 with mu = int phi_l(w) conj(phi_r(w)) exp(i theta(w)) dw and
/// theta = dL (beta2 w^2 / 2 + beta3 w^3 / 6) + dt w.  Throws QuadratureFailure
/// if the panel budget cannot resolve the oscillation.
NumericVisibility numeric_visibility(const WavePacketSpec& left, const WavePacketSpec& right,
                                     const DispersionContext& ctx, const NumericOptions& opts = {});

// Standard-fiber conversions at a given wavelength.
constexpr double speed_of_light_nm_per_ps = 299792.458;

/// beta2 = -D lambda^2 / (2 pi c).  D in ps/(nm km), lambda in nm.
double beta2_from_dispersion(double d_ps_per_nm_km, double lambda_nm = 1550.0);

/// beta3 = (lambda / (2 pi c))^2 (lambda^2 S + 2 lambda D).  S in ps/(nm^2 km).
double beta3_from_slope(double d_ps_per_nm_km, double s_ps_per_nm2_km, double lambda_nm = 1550.0);

}  // namespace qnet_asym::dispersion
