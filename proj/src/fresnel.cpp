#include "qnet_asym/fresnel.hpp"

#include "qnet_asym/errors.hpp"

#include <cmath>
#include <complex>
#include <numbers>

namespace qnet_asym::dispersion {

namespace {

// Below this the Maclaurin series loses at most a few ulps to cancellation
// (largest term ~ x^{2k}/k! stays O(10)); above it the continued fraction
// converges in well under a hundred steps.
constexpr double series_limit = 2.0;
constexpr int max_cf_terms = 1000;

FresnelPair series(double x)
{
    // C = sum (-1)^k x^{4k+1} / ((4k+1)(2k)!),  S = sum (-1)^k x^{4k+3} / ((4k+3)(2k+1)!)
    const double x2 = x * x;
    double term = x;  // (-1)^n x^{2n+1} / n!
    double c = 0.0;
    double s = 0.0;
    for (int n = 0; n < 200; ++n) {
        const double contrib = term / (2 * n + 1);
        if (n % 2 == 0)
            c += contrib;
        else
            s += contrib;
        if (std::abs(contrib) < 1e-18 * (std::abs(c) + std::abs(s) + 1e-300)) break;
        term *= x2 / (n + 1);
        if (n % 2 == 1) term = -term;
    }
    return {x, c, s};
}

FresnelPair continued_fraction(double x)
{
    // int_x^inf exp(i t^2) dt = x exp(i x^2) K with
    // K = 1/(1 - 2ix^2 - 1*2/(5 - 2ix^2 - 3*4/(9 - 2ix^2 - ...))),
    // the even contraction of the erfc continued fraction at z = exp(-i pi/4) x.
    using cd = std::complex<double>;
    const double tiny = 1e-300;
    const cd shift{0.0, -2.0 * x * x};

    // Modified Lentz for b0 + a1/(b1 + a2/(b2 + ...)) with b0 = 0.
    cd b = 1.0 + shift;
    cd cc = 1.0 / tiny;
    cd d = 1.0 / b;
    cd k = d;
    bool converged = false;
    for (int n = 1; n < max_cf_terms; ++n) {
        const double a = -static_cast<double>((2 * n - 1) * (2 * n));
        b += 4.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        cc = b + a / cc;
        if (std::abs(cc) < tiny) cc = tiny;
        d = 1.0 / d;
        const cd delta = cc * d;
        k *= delta;
        if (std::abs(delta - 1.0) < 1e-16) {
            converged = true;
            break;
        }
    }
    if (!converged) throw QuadratureFailure("Fresnel continued fraction did not converge");

    const double x2 = x * x;
    const cd tail = x * std::polar(1.0, x2) * k;
    const double half_limit = std::sqrt(2.0 * std::numbers::pi) / 4.0;
    return {x, half_limit - tail.real(), half_limit - tail.imag()};
}

}  // namespace

FresnelPair fresnel(double x)
{
    if (!(x >= 0.0)) throw InvalidParameter("fresnel: argument must be >= 0");
    if (std::isinf(x)) {
        const double h = std::sqrt(2.0 * std::numbers::pi) / 4.0;
        return {x, h, h};
    }
    return x <= series_limit ? series(x) : continued_fraction(x);
}

}  // namespace qnet_asym::dispersion
