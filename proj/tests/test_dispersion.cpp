#include "qnet_asym/dispersion.hpp"
#include "qnet_asym/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qnet_asym;
using namespace qnet_asym::dispersion;

namespace {

constexpr double beta2_smf = -21.7;
constexpr double beta3_smf = 0.127;

DispersionContext gvd(double dl, double b2 = beta2_smf)
{
    DispersionContext c;
    c.delta_l_km = dl;
    c.beta2_ps2_per_km = b2;
    return c;
}

SampledPacket sampled_gaussian(double sigma, int n)
{
    SampledPacket p;
    for (int i = 0; i < n; ++i) {
        const double w = -10.0 * sigma + 20.0 * sigma * i / (n - 1);
        p.omega_rad_per_ps.push_back(w);
        p.amplitude.emplace_back(std::exp(-w * w / (4 * sigma * sigma)), 0.0);
    }
    return normalize(p);
}

}  // namespace

TEST_CASE("gaussian closed form")
{
    CHECK(gaussian_visibility_exact_no_tod(0.01, {}) == 1.0);
    const double sigma = 0.01;
    const DispersionContext c = gvd(1.0 / (beta2_smf * sigma * sigma));
    CHECK(gaussian_visibility_exact_no_tod(sigma, c) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(gaussian_visibility_exact_no_tod(0.0, c), InvalidParameter);
}

TEST_CASE("gaussian closed form is even in dt and dw")
{
    DispersionContext c = gvd(30.0);
    c.delta_t_ps = 12.0;
    c.delta_omega_rad_per_ps = 3e-3;
    const double v = gaussian_visibility_exact_no_tod(0.02, c);
    c.delta_t_ps = -12.0;
    c.delta_omega_rad_per_ps = -3e-3;
    CHECK(gaussian_visibility_exact_no_tod(0.02, c) == v);
    c.delta_l_km = -30.0;
    CHECK(gaussian_visibility_exact_no_tod(0.02, c) == v);
}

TEST_CASE("gaussian leading order")
{
    CHECK(gaussian_visibility_leading(0.01, {}).value == 1.0);
    const double sigma = 0.01;
    const DispersionContext c = gvd(std::sqrt(0.02) / (std::abs(beta2_smf) * sigma * sigma));
    const auto v = gaussian_visibility_leading(sigma, c);
    CHECK(v.value == doctest::Approx(0.99).epsilon(1e-13));
    CHECK(v.valid);

    // gap to the exact form is quadratic in 1 - V
    DispersionContext m;
    m.delta_l_km = 10.0;
    m.beta2_ps2_per_km = beta2_smf;
    m.delta_t_ps = 10.0;
    m.delta_omega_rad_per_ps = 2e-3;
    double prev_gap = 0.0;
    double prev_loss = 0.0;
    for (int k = 0; k < 4; ++k) {
        const double loss = 1.0 - gaussian_visibility_exact_no_tod(sigma, m);
        const double gap = std::abs(gaussian_visibility_leading(sigma, m).value - (1.0 - loss));
        if (k > 0) {
            const double order = std::log(prev_gap / gap) / std::log(prev_loss / loss);
            CHECK(order == doctest::Approx(2.0).epsilon(0.05));
        }
        prev_gap = gap;
        prev_loss = loss;
        // every term is quadratic in its parameter
        m.delta_l_km /= std::numbers::sqrt2;
        m.delta_t_ps /= std::numbers::sqrt2;
        m.delta_omega_rad_per_ps /= std::numbers::sqrt2;
    }
    DispersionContext big = gvd(200.0);
    CHECK_FALSE(gaussian_visibility_leading(0.05, big).valid);
}

TEST_CASE("gaussian first-order TOD")
{
    DispersionContext c = gvd(40.0);
    c.beta3_ps3_per_km = beta3_smf;
    const double sigma = 0.02;
    // no timing offset: third order drops out at first order
    CHECK(gaussian_visibility_first_order_tod(sigma, c).value ==
          doctest::Approx(gaussian_visibility_exact_no_tod(sigma, c)).epsilon(1e-15));
    c.beta3_ps3_per_km = 0.0;
    c.delta_t_ps = 20.0;
    CHECK(gaussian_visibility_first_order_tod(sigma, c).value ==
          doctest::Approx(gaussian_visibility_exact_no_tod(sigma, c)).epsilon(1e-15));
}

TEST_CASE("gaussian first-order TOD against quadrature")
{
    // ns- and 100 ps-scale photons on standard fiber, 40 km mismatch
    for (double t_width : {1000.0, 300.0, 100.0}) {
        const double sigma = 1.0 / (std::numbers::sqrt2 * t_width);
        for (double dt_units : {0.3, 0.7, 1.2}) {
            DispersionContext c = gvd(40.0);
            c.beta3_ps3_per_km = beta3_smf;
            c.delta_t_ps = dt_units / sigma;
            const auto approx = gaussian_visibility_first_order_tod(sigma, c);
            const auto num = numeric_visibility(GaussianPacket{sigma}, GaussianPacket{sigma}, c);
            CAPTURE(t_width);
            CAPTURE(dt_units);
            CHECK(approx.valid);
            CHECK(std::abs(approx.value - num.value) / num.value < 1e-3);
        }
    }
}

TEST_CASE("first-order TOD tracks the size of the correction")
{
    // at a strongly dispersive point the TOD shift itself is large enough to
    // see that the first-order form captures it
    const double sigma = 0.2;
    DispersionContext c = gvd(2.0);
    c.beta3_ps3_per_km = 4.0;
    c.delta_t_ps = 3.0;
    const double v0 = gaussian_visibility_exact_no_tod(sigma, c);
    const auto v1 = gaussian_visibility_first_order_tod(sigma, c);
    const auto num = numeric_visibility(GaussianPacket{sigma}, GaussianPacket{sigma}, c);
    CHECK(std::abs(v1.value - num.value) < 0.1 * std::abs(v0 - num.value));
}

TEST_CASE("lorentzian closed form")
{
    CHECK(lorentzian_visibility_exact(1000.0, {}) == 1.0);
    const double v = lorentzian_visibility_exact(1000.0, gvd(40.0));
    CHECK(1.0 - v > 0.01);
    CHECK(1.0 - v < 0.05);
    CHECK(lorentzian_visibility_exact(1000.0, gvd(-40.0)) == v);
    // monotone in |dL beta2|
    double prev = 1.0;
    for (double dl = 0.0; dl <= 200.0; dl += 5.0) {
        const double cur = lorentzian_visibility_exact(200.0, gvd(dl));
        CHECK(cur <= prev);
        prev = cur;
    }
}

TEST_CASE("lorentzian linear order")
{
    CHECK(lorentzian_visibility_linear(1000.0, {}).value == 1.0);
    const DispersionContext c = gvd(40.0);  // |dL beta2| = 868 ps^2
    // 1 - (2/sqrt(pi)) sqrt(868)/1000
    CHECK(lorentzian_visibility_linear(1000.0, c).value == doctest::Approx(0.9667558738296504).epsilon(1e-14));
    const double l1 = 1.0 - lorentzian_visibility_linear(1000.0, c).value;
    const double l2 = 1.0 - lorentzian_visibility_linear(2000.0, c).value;
    CHECK(l2 == doctest::Approx(0.5 * l1).epsilon(1e-13));
    // first-order agreement with the Fresnel form
    const double exact = 1.0 - lorentzian_visibility_exact(1e5, c);
    const double lin = 1.0 - lorentzian_visibility_linear(1e5, c).value;
    CHECK(std::abs(exact - lin) / lin < 5e-4);
    CHECK_FALSE(lorentzian_visibility_linear(10.0, c).valid);
    CHECK(lorentzian_visibility_linear(1e-3, c).value == 0.0);
}

TEST_CASE("numeric: identical spectra without dispersion")
{
    for (const WavePacketSpec& p : {WavePacketSpec{GaussianPacket{0.01}}, WavePacketSpec{LorentzianPacket{500.0}},
                                    WavePacketSpec{sampled_gaussian(0.05, 201)}}) {
        const auto v = numeric_visibility(p, p, {});
        CHECK(std::abs(v.value - 1.0) < 1e-9);
        CHECK(v.error < 1e-9);
    }
}

TEST_CASE("numeric: gaussian closed form as oracle")
{
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 30; ++i) {
        const double sigma = std::pow(10.0, -3.0 + 2.0 * u(gen));
        DispersionContext c;
        c.delta_l_km = 80.0 * (u(gen) - 0.5);
        c.beta2_ps2_per_km = beta2_smf;
        c.delta_t_ps = (u(gen) - 0.5) / sigma;
        c.delta_omega_rad_per_ps = 2.0 * (u(gen) - 0.5) * sigma;
        const auto num = numeric_visibility(GaussianPacket{sigma}, GaussianPacket{sigma}, c);
        CAPTURE(sigma);
        CHECK(std::abs(num.value - gaussian_visibility_exact_no_tod(sigma, c)) < 1e-6);
        CHECK(num.error < 1e-6);
    }
}

TEST_CASE("numeric: lorentzian closed form as oracle")
{
    for (double tau : {50.0, 100.0, 300.0, 1000.0, 3000.0}) {
        for (double dl : {5.0, 40.0}) {
            const auto c = gvd(dl);
            const auto num = numeric_visibility(LorentzianPacket{tau}, LorentzianPacket{tau}, c);
            CAPTURE(tau);
            CHECK(std::abs(num.value - lorentzian_visibility_exact(tau, c)) < 1e-4);
        }
    }
}

TEST_CASE("numeric: third-order dispersion is negligible for photons of 100 ps and longer")
{
    for (double tau : {100.0, 1000.0}) {
        DispersionContext c = gvd(40.0);
        const double v0 = numeric_visibility(LorentzianPacket{tau}, LorentzianPacket{tau}, c).value;
        c.beta3_ps3_per_km = beta3_smf;
        const auto v3 = numeric_visibility(LorentzianPacket{tau}, LorentzianPacket{tau}, c);
        CHECK(std::abs(v3.value - v0) < 1e-3);
        CHECK(v3.error < 1e-6);
    }
}

TEST_CASE("numeric: sampled spectrum follows its analytic counterpart")
{
    const double sigma = 0.05;
    DispersionContext c = gvd(3.0);
    c.delta_t_ps = 5.0;
    const auto s = numeric_visibility(sampled_gaussian(sigma, 2001), sampled_gaussian(sigma, 2001), c);
    CHECK(std::abs(s.value - gaussian_visibility_exact_no_tod(sigma, c)) < 1e-5);
}

TEST_CASE("numeric: mismatched families")
{
    // overlap of a gaussian and a lorentzian without dispersion is below 1
    const auto v = numeric_visibility(GaussianPacket{1e-3}, LorentzianPacket{700.0}, {});
    CHECK(v.value < 1.0);
    CHECK(v.value > 0.0);
}

TEST_CASE("numeric: budget exhaustion is explicit")
{
    NumericOptions tight;
    tight.max_panels = 50;
    CHECK_THROWS_AS(numeric_visibility(LorentzianPacket{1000.0}, LorentzianPacket{1000.0}, gvd(40.0), tight),
                    QuadratureFailure);
}

TEST_CASE("numeric: invalid packets")
{
    SampledPacket p;
    p.omega_rad_per_ps = {0.0, 1.0};
    p.amplitude = {1.0, 2.0};
    CHECK_THROWS_AS(numeric_visibility(p, p, {}), InvalidParameter);
    CHECK_THROWS_AS(numeric_visibility(GaussianPacket{-1.0}, GaussianPacket{1.0}, {}), InvalidParameter);
}

TEST_CASE("dispatcher delegates to quadrature when the closed form does not apply")
{
    DispersionContext c = gvd(40.0);
    CHECK(lorentzian_visibility(1000.0, c) == lorentzian_visibility_exact(1000.0, c));
    c.delta_t_ps = 200.0;
    const double v = lorentzian_visibility(1000.0, c);
    CHECK(v < lorentzian_visibility_exact(1000.0, c));
}

TEST_CASE("gaussian photons beat lorentzian ones at equal temporal width")
{
    for (double t = 10.0; t <= 1e4; t *= 1.5) {
        const auto c = gvd(40.0);
        const double vg = gaussian_visibility_exact_no_tod(1.0 / (std::numbers::sqrt2 * t), c);
        CHECK(vg >= lorentzian_visibility_exact(t, c));
    }
}

TEST_CASE("dispersion parameters of standard fiber at 1550 nm")
{
    // beta2 = -D lambda^2 / (2 pi c) with c in nm/ps
    const double b2 = beta2_from_dispersion(17.0);
    CHECK(b2 == doctest::Approx(-17.0 * 1550.0 * 1550.0 / (2 * std::numbers::pi * 299792.458)).epsilon(1e-15));
    CHECK(b2 == doctest::Approx(-21.68).epsilon(1e-3));
    // S = 0.056 ps/(nm^2 km) gives about 0.127 ps^3/km
    CHECK(beta3_from_slope(17.0, 0.056) == doctest::Approx(0.127).epsilon(0.01));
}
