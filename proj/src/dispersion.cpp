#include "qnet_asym/dispersion.hpp"

#include "qnet_asym/errors.hpp"
#include "qnet_asym/fresnel.hpp"
#include "qnet_asym/quadrature.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

namespace qnet_asym::dispersion {

namespace {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

bool finite(double x) { return std::isfinite(x); }

void check_context(const DispersionContext& ctx)
{
    if (!(finite(ctx.delta_l_km) && finite(ctx.beta2_ps2_per_km) && finite(ctx.beta3_ps3_per_km) &&
          finite(ctx.delta_t_ps) && finite(ctx.delta_omega_rad_per_ps)))
        throw InvalidParameter("dispersion context fields must be finite");
}

void check_sigma(double sigma)
{
    if (!(finite(sigma) && sigma > 0.0)) throw InvalidParameter("sigma must be > 0");
}

void check_tau(double tau)
{
    if (!(finite(tau) && tau > 0.0)) throw InvalidParameter("tau must be > 0");
}

// theta(w) = a1 w + a2 w^2 + a3 w^3
struct Phase {
    double a1;
    double a2;
    double a3;

    explicit Phase(const DispersionContext& c)
        : a1(c.delta_t_ps), a2(0.5 * c.delta_l_km * c.beta2_ps2_per_km), a3(c.delta_l_km * c.beta3_ps3_per_km / 6.0)
    {
    }
    bool trivial() const { return a1 == 0.0 && a2 == 0.0 && a3 == 0.0; }
    double value(double w) const { return ((a3 * w + a2) * w + a1) * w; }
    double d1(double w) const { return (3.0 * a3 * w + 2.0 * a2) * w + a1; }
    double d2(double w) const { return 6.0 * a3 * w + 2.0 * a2; }
    double d3() const { return 6.0 * a3; }

    std::vector<double> stationary_points() const
    {
        const double qa = 3.0 * a3;
        const double qb = 2.0 * a2;
        const double qc = a1;
        std::vector<double> roots;
        if (qa == 0.0) {
            if (qb != 0.0) roots.push_back(-qc / qb);
            return roots;
        }
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0) return roots;
        const double t = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        if (t != 0.0) {
            roots.push_back(t / qa);
            roots.push_back(qc / t);
        } else {
            roots.push_back(0.0);
        }
        std::sort(roots.begin(), roots.end());
        return roots;
    }

    // Width of the region around a stationary point that dominates its contribution.
    double stationary_width(double w) const
    {
        const double c2 = std::abs(d2(w));
        if (c2 > 0.0) return std::sqrt(2.0 * pi / c2);
        return 2.0 * std::tgamma(4.0 / 3.0) * std::cbrt(6.0 / std::abs(d3()));
    }

    double max_abs_d1(double a, double b) const
    {
        double m = std::max(std::abs(d1(a)), std::abs(d1(b)));
        if (a3 != 0.0) {
            const double ext = -a2 / (3.0 * a3);
            if (ext > a && ext < b) m = std::max(m, std::abs(d1(ext)));
        }
        return m;
    }
};

// One-sided L2 mass of an unbounded packet beyond distance d from its centre.
double tail_mass(const WavePacketSpec& p, double d)
{
    if (d <= 0.0) return 0.5;
    return std::visit(overloaded{
                          [&](const GaussianPacket& g) { return 0.5 * std::erfc(d / (std::numbers::sqrt2 * g.sigma_rad_per_ps)); },
                          [&](const LorentzianPacket& l) { return std::atan(1.0 / (l.tau_ps * d)) / pi; },
                          [&](const SampledPacket&) { return 0.0; },
                      },
                      p);
}

// Distance from the centre beyond which the one-sided mass is below eps.
double mass_half_width(const WavePacketSpec& p, double eps)
{
    return std::visit(overloaded{
                          [&](const GaussianPacket& g) {
                              return std::max(12.0, std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * eps)) *
                                     g.sigma_rad_per_ps;
                          },
                          [&](const LorentzianPacket& l) { return 1.0 / (l.tau_ps * std::tan(pi * eps)); },
                          [&](const SampledPacket&) { return 0.0; },
                      },
                      p);
}

double spectral_scale(const WavePacketSpec& p)
{
    return std::visit(overloaded{
                          [](const GaussianPacket& g) { return g.sigma_rad_per_ps; },
                          [](const LorentzianPacket& l) { return 1.0 / l.tau_ps; },
                          [](const SampledPacket& s) { return s.omega_rad_per_ps.back() - s.omega_rad_per_ps.front(); },
                      },
                      p);
}

bool is_sampled(const WavePacketSpec& p) { return std::holds_alternative<SampledPacket>(p); }

struct Overlap {
    const WavePacketSpec& left;
    const WavePacketSpec& right;
    double half_shift;
    Phase phase;

    cd envelope(double w) const
    {
        return amplitude(left, w + half_shift) * std::conj(amplitude(right, w - half_shift));
    }
    cd integrand(double w) const { return envelope(w) * std::polar(1.0, phase.value(w)); }

    // Size of the first neglected term when the tail beyond w is replaced by
    // its leading integration-by-parts term.
    double ibp_remainder(double w, double scale) const
    {
        const double t1 = phase.d1(w);
        if (t1 == 0.0) return std::numeric_limits<double>::infinity();
        const double h = 1e-5 * std::max(std::abs(w), scale);
        const double tp = phase.d1(w + h);
        const double tm = phase.d1(w - h);
        if (tp == 0.0 || tm == 0.0) return std::numeric_limits<double>::infinity();
        const cd dg = (envelope(w + h) / tp - envelope(w - h) / tm) / (2.0 * h);
        return std::abs(dg) / std::abs(t1);
    }
};

struct Tail {
    double edge;
    cd correction{0.0, 0.0};
    double error = 0.0;
};

// Find where the integrand may be cut on one side.  dir = +1 for the upper
// tail, -1 for the lower one.  start is already outside the bulk and past any
// stationary point that has to be resolved.
Tail cut_tail(const Overlap& ov, const WavePacketSpec& l, const WavePacketSpec& r, double center, double start,
              double mass_edge, double scale, double tol, int dir)
{
    auto mass_error = [&](double edge) {
        const double dl = dir * (edge - (center - ov.half_shift));
        const double dr = dir * (edge - (center + ov.half_shift));
        return std::sqrt(tail_mass(l, dl) * tail_mass(r, dr));
    };
    auto past = [&](double w, double edge) { return dir * (w - edge) >= 0.0; };

    Tail t{mass_edge};
    t.error = mass_error(mass_edge);
    if (ov.phase.trivial() || past(start, mass_edge)) return t;

    double prev = start;
    double w = start;
    bool found = false;
    for (int it = 0; it < 200; ++it) {
        if (past(w, mass_edge)) break;
        if (ov.ibp_remainder(w, scale) <= tol) {
            found = true;
            break;
        }
        prev = w;
        w = center + 2.0 * (w - center);
    }
    if (!found) return t;

    if (prev != w) {
        double a = prev;  // fails
        double b = w;     // passes
        for (int it = 0; it < 40; ++it) {
            const double m = 0.5 * (a + b);
            if (ov.ibp_remainder(m, scale) <= tol)
                b = m;
            else
                a = m;
        }
        w = b;
    }
    const double rem = ov.ibp_remainder(w, scale);
    const cd boundary = ov.integrand(w) / (cd{0.0, 1.0} * ov.phase.d1(w));
    t.edge = w;
    // int_w^inf ~ -boundary, int_-inf^w ~ +boundary
    t.correction = dir > 0 ? -boundary : boundary;
    t.error = rem;
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// packets

double sampled_norm2(const SampledPacket& p)
{
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < p.omega_rad_per_ps.size(); ++i) {
        const double h = p.omega_rad_per_ps[i + 1] - p.omega_rad_per_ps[i];
        const cd a = p.amplitude[i];
        const cd b = p.amplitude[i + 1];
        total += h * (std::norm(a) + std::real(a * std::conj(b)) + std::norm(b)) / 3.0;
    }
    return total;
}

SampledPacket normalize(SampledPacket p)
{
    const double n2 = sampled_norm2(p);
    if (!(n2 > 0.0 && std::isfinite(n2))) throw InvalidParameter("sampled spectrum has zero or non-finite norm");
    const double k = 1.0 / std::sqrt(n2);
    for (cd& a : p.amplitude) a *= k;
    return p;
}

void validate(const WavePacketSpec& p)
{
    std::visit(overloaded{
                   [](const GaussianPacket& g) { check_sigma(g.sigma_rad_per_ps); },
                   [](const LorentzianPacket& l) { check_tau(l.tau_ps); },
                   [](const SampledPacket& s) {
                       if (s.omega_rad_per_ps.size() < 2 || s.omega_rad_per_ps.size() != s.amplitude.size())
                           throw InvalidParameter("sampled spectrum needs >= 2 points and matching amplitude count");
                       for (std::size_t i = 0; i < s.omega_rad_per_ps.size(); ++i) {
                           if (!finite(s.omega_rad_per_ps[i]) || !finite(s.amplitude[i].real()) ||
                               !finite(s.amplitude[i].imag()))
                               throw InvalidParameter("sampled spectrum contains non-finite values");
                           if (i > 0 && !(s.omega_rad_per_ps[i] > s.omega_rad_per_ps[i - 1]))
                               throw InvalidParameter("sampled spectrum grid must be strictly increasing");
                       }
                       if (std::abs(sampled_norm2(s) - 1.0) > 1e-9)
                           throw InvalidParameter("sampled spectrum must be L2-normalized to within 1e-9");
                   },
               },
               p);
}

std::complex<double> amplitude(const WavePacketSpec& p, double w)
{
    return std::visit(overloaded{
                          [&](const GaussianPacket& g) -> cd {
                              const double s = g.sigma_rad_per_ps;
                              return std::pow(2.0 * pi * s * s, -0.25) * std::exp(-w * w / (4.0 * s * s));
                          },
                          [&](const LorentzianPacket& l) -> cd {
                              return std::sqrt(l.tau_ps / pi) / cd{1.0, -l.tau_ps * w};
                          },
                          [&](const SampledPacket& s) -> cd {
                              const auto& x = s.omega_rad_per_ps;
                              if (!(w >= x.front() && w <= x.back())) return {0.0, 0.0};
                              auto it = std::upper_bound(x.begin(), x.end(), w);
                              if (it == x.end()) return s.amplitude.back();
                              const std::size_t i = static_cast<std::size_t>(it - x.begin()) - 1;
                              const double t = (w - x[i]) / (x[i + 1] - x[i]);
                              return s.amplitude[i] + t * (s.amplitude[i + 1] - s.amplitude[i]);
                          },
                      },
                      p);
}

// ---------------------------------------------------------------------------
// closed forms

double gaussian_visibility_exact_no_tod(double sigma, const DispersionContext& ctx)
{
    check_sigma(sigma);
    check_context(ctx);
    const double k = ctx.delta_l_km * ctx.beta2_ps2_per_km * sigma * sigma;
    const double k2 = 1.0 + k * k;
    const double dw = ctx.delta_omega_rad_per_ps / sigma;
    const double dt = ctx.delta_t_ps * sigma;
    return std::exp(-0.25 * dw * dw - dt * dt / k2) / std::sqrt(k2);
}

ApproxVisibility gaussian_visibility_leading(double sigma, const DispersionContext& ctx)
{
    check_sigma(sigma);
    check_context(ctx);
    const double k = ctx.delta_l_km * ctx.beta2_ps2_per_km * sigma * sigma;
    const double dw = ctx.delta_omega_rad_per_ps / sigma;
    const double dt = ctx.delta_t_ps * sigma;
    const double loss = 0.25 * dw * dw + dt * dt + 0.5 * k * k;
    return {1.0 - loss, loss < 0.1, loss};
}

ApproxVisibility gaussian_visibility_first_order_tod(double sigma, const DispersionContext& ctx)
{
    const double v0 = gaussian_visibility_exact_no_tod(sigma, ctx);
    const double s2 = sigma * sigma;
    const double k = ctx.delta_l_km * ctx.beta2_ps2_per_km * s2;
    const double kk = k * k;
    const double one_k = 1.0 + kk;
    const double b3 = ctx.delta_l_km * ctx.beta3_ps3_per_km;
    const double dt = ctx.delta_t_ps;
    const double bracket = (1.0 - kk) - dt * dt * s2 * (1.0 - 3.0 * kk) / (3.0 * one_k);
    const double v = v0 * (1.0 - b3 * dt * s2 * s2 / (one_k * one_k) * bracket);
    const double expansion = std::abs(b3) * s2 * sigma;
    return {v, expansion < 0.1, expansion};
}

double lorentzian_visibility_exact(double tau, const DispersionContext& ctx)
{
    check_tau(tau);
    check_context(ctx);
    const double x = std::sqrt(0.5 * std::abs(ctx.delta_l_km * ctx.beta2_ps2_per_km)) / tau;
    const FresnelPair f = fresnel(x);
    const double v = 1.0 - 2.0 * std::numbers::sqrt2 / std::sqrt(pi) * (f.c + f.s) +
                     4.0 / pi * (f.c * f.c + f.s * f.s);
    return std::clamp(v, 0.0, 1.0);
}

ApproxVisibility lorentzian_visibility_linear(double tau, const DispersionContext& ctx)
{
    check_tau(tau);
    check_context(ctx);
    const double corr = 2.0 / std::sqrt(pi) * std::sqrt(std::abs(ctx.delta_l_km * ctx.beta2_ps2_per_km)) / tau;
    return {std::clamp(1.0 - corr, 0.0, 1.0), corr <= 0.3, corr};
}

double lorentzian_visibility(double tau, const DispersionContext& ctx)
{
    if (ctx.delta_t_ps == 0.0 && ctx.delta_omega_rad_per_ps == 0.0 && ctx.beta3_ps3_per_km == 0.0)
        return lorentzian_visibility_exact(tau, ctx);
    const LorentzianPacket p{tau};
    return numeric_visibility(p, p, ctx).value;
}

// ---------------------------------------------------------------------------
// quadrature

NumericVisibility numeric_visibility(const WavePacketSpec& left, const WavePacketSpec& right,
                                     const DispersionContext& ctx, const NumericOptions& opts)
{
    validate(left);
    validate(right);
    check_context(ctx);

    const double hs = 0.5 * ctx.delta_omega_rad_per_ps;
    const Overlap ov{left, right, hs, Phase(ctx)};
    const double c_left = -hs;
    const double c_right = hs;
    const double center = 0.5 * (c_left + c_right);

    double scale = std::numeric_limits<double>::infinity();
    for (const WavePacketSpec* p : {&left, &right})
        if (!is_sampled(*p)) scale = std::min(scale, spectral_scale(*p));

    double lo = 0.0;
    double hi = 0.0;
    cd correction{0.0, 0.0};
    double tail_error = 0.0;

    if (is_sampled(left) || is_sampled(right)) {
        lo = -std::numeric_limits<double>::infinity();
        hi = std::numeric_limits<double>::infinity();
        if (is_sampled(left)) {
            const auto& x = std::get<SampledPacket>(left).omega_rad_per_ps;
            lo = std::max(lo, x.front() - hs);
            hi = std::min(hi, x.back() - hs);
        }
        if (is_sampled(right)) {
            const auto& x = std::get<SampledPacket>(right).omega_rad_per_ps;
            lo = std::max(lo, x.front() + hs);
            hi = std::min(hi, x.back() + hs);
        }
        if (!(lo < hi)) return {0.0, 0.0, 0.0, 0};
    } else {
        const double mass_eps = 0.1 * opts.tail_tol;
        const double wl = mass_half_width(left, mass_eps);
        const double wr = mass_half_width(right, mass_eps);
        const double mass_lo = std::min(c_left - wl, c_right - wr);
        const double mass_hi = std::max(c_left + wl, c_right + wr);

        double bulk_lo = std::min(c_left, c_right) - 4.0 * scale;
        double bulk_hi = std::max(c_left, c_right) + 4.0 * scale;
        std::vector<double> neglected;
        for (double s : ov.phase.stationary_points()) {
            const double size = std::abs(ov.envelope(s)) * ov.phase.stationary_width(s);
            const bool inside_mass = s > mass_lo && s < mass_hi;
            if (inside_mass && size > opts.neglect_stationary) {
                const double margin = 8.0 * ov.phase.stationary_width(s);
                bulk_lo = std::min(bulk_lo, s - margin);
                bulk_hi = std::max(bulk_hi, s + margin);
            } else {
                neglected.push_back(s);
                tail_error += inside_mass ? size : 0.0;
            }
        }
        const Tail up = cut_tail(ov, left, right, center, bulk_hi, mass_hi, scale, opts.tail_tol, +1);
        const Tail down = cut_tail(ov, left, right, center, bulk_lo, mass_lo, scale, opts.tail_tol, -1);
        lo = down.edge;
        hi = up.edge;
        correction = up.correction + down.correction;
        tail_error += up.error + down.error;
        // A neglected point that ended up inside the window is integrated after all.
        for (double s : neglected)
            if (s > lo && s < hi && s > mass_lo && s < mass_hi)
                tail_error -= std::abs(ov.envelope(s)) * ov.phase.stationary_width(s);
        tail_error = std::max(tail_error, 0.0);
    }

    // Breakpoints: packet centres, geometric shells around them, sample nodes,
    // stationary points; then split so the phase moves by at most pi/4 per panel.
    std::vector<double> pts{lo, hi};
    auto add = [&](double w) {
        if (w > lo && w < hi) pts.push_back(w);
    };
    for (double c : {c_left, c_right}) {
        add(c);
        if (std::isfinite(scale)) {
            for (double d = 0.25 * scale; c - d > lo || c + d < hi; d *= 2.0) {
                add(c - d);
                add(c + d);
            }
        }
    }
    if (is_sampled(left))
        for (double x : std::get<SampledPacket>(left).omega_rad_per_ps) add(x - hs);
    if (is_sampled(right))
        for (double x : std::get<SampledPacket>(right).omega_rad_per_ps) add(x + hs);
    for (double s : ov.phase.stationary_points()) add(s);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    std::vector<double> breaks;
    breaks.reserve(pts.size());
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double a = pts[i];
        const double b = pts[i + 1];
        const double swing = ov.phase.max_abs_d1(a, b) * (b - a);
        const double pieces = std::ceil(swing / (0.25 * pi));
        if (breaks.size() + pieces > static_cast<double>(opts.max_panels)) {
            std::ostringstream msg;
            msg << "numeric_visibility: resolving the phase on [" << lo << ", " << hi << "] rad/ps needs more than "
                << opts.max_panels << " panels (oscillation too fast for budget)";
            throw QuadratureFailure(msg.str());
        }
        const auto n = static_cast<std::size_t>(std::max(1.0, pieces));
        for (std::size_t k = 0; k < n; ++k) breaks.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(n));
    }
    breaks.push_back(pts.back());

    const quadrature::Result q = quadrature::integrate([&](double w) { return ov.integrand(w); }, breaks,
                                                       {opts.abs_tol, opts.max_panels});
    const cd mu = q.value + correction;
    const double mu_err = q.error + tail_error;
    const double m = std::abs(mu);
    return {m * m, 2.0 * m * mu_err + mu_err * mu_err, mu_err, q.panels};
}

// ---------------------------------------------------------------------------
// units

double beta2_from_dispersion(double d_ps_per_nm_km, double lambda_nm)
{
    return -d_ps_per_nm_km * lambda_nm * lambda_nm / (2.0 * pi * speed_of_light_nm_per_ps);
}

double beta3_from_slope(double d_ps_per_nm_km, double s_ps_per_nm2_km, double lambda_nm)
{
    const double r = lambda_nm / (2.0 * pi * speed_of_light_nm_per_ps);
    return r * r * (lambda_nm * lambda_nm * s_ps_per_nm2_km + 2.0 * lambda_nm * d_ps_per_nm_km);
}

}  // namespace qnet_asym::dispersion
