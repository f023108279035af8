#pragma once

namespace qnet_asym::dispersion {

/// Fresnel integrals C(x) = int_0^x cos(t^2) dt and S(x) = int_0^x sin(t^2) dt.
/// Note the unscaled t^2 kernel; both tend to sqrt(2 pi)/4 as x grows.
struct FresnelPair {
    double x;
    double c;
    double s;
};

/// Absolute error below 1e-10 on [0, 1e3] and beyond.  Throws InvalidParameter for x < 0.
FresnelPair fresnel(double x);

}  // namespace qnet_asym::dispersion
