#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

namespace qnet_asym::quadrature {

using Integrand = std::function<std::complex<double>(double)>;

struct Options {
    double abs_tol = 1e-12;
    std::size_t max_panels = 4'000'000;
};

struct Result {
    std::complex<double> value;
    double error;  ///< sum of per-panel Gauss/Kronrod discrepancies
    std::size_t panels;
};

/// Globally adaptive 21-point Gauss-Kronrod integration over consecutive
/// breakpoints.  The panel with the largest error estimate is bisected until
/// the summed estimate drops below abs_tol.  Throws QuadratureFailure when
/// the panel budget runs out first.
Result integrate(const Integrand& f, const std::vector<double>& breakpoints, const Options& opts = {});

}  // namespace qnet_asym::quadrature
