#include "qnet_asym/link_physics.hpp"

#include "qnet_asym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qnet_asym::link {

namespace {

void require(bool ok, const std::string& what)
{
    if (!ok) throw InvalidParameter(what);
}

bool is_probability(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

void validate_geometry(const MidpointLinkConfig& cfg)
{
    require(std::isfinite(cfg.l_left_km) && cfg.l_left_km >= 0.0, "l_left_km must be a finite length >= 0");
    require(std::isfinite(cfg.l_right_km) && cfg.l_right_km >= 0.0, "l_right_km must be a finite length >= 0");
}

LinkPerformance assemble(const MidpointLinkConfig& cfg, double p_succ, double fidelity)
{
    const double t = cycle_time_lower_bound(cfg);
    const double rate = t > 0.0 ? p_succ / t : std::numeric_limits<double>::infinity();
    return {p_succ, fidelity, t, rate};
}

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Loss quantities needed by the closed forms.  The ratios 1/P_side are formed
// from exp(+L/L_att) directly so that long fibers do not go through 1/underflow.
struct Losses {
    double p_left;
    double p_right;
    double p_tot;
    double p_sum;
    double inv_left;   // 1 / P_left  = P_right / P_tot
    double inv_right;  // 1 / P_right = P_left / P_tot
};

Losses losses(const MidpointLinkConfig& cfg)
{
    const auto [pl, pr] = side_probabilities(cfg);
    const auto [pt, ps] = p_tot_p_sum(pl, pr);
    const double inf = std::numeric_limits<double>::infinity();
    const double il = cfg.p0 > 0.0 ? std::exp(cfg.l_left_km / cfg.l_att_km) / cfg.p0 : inf;
    const double ir = cfg.p0 > 0.0 ? std::exp(cfg.l_right_km / cfg.l_att_km) / cfg.p0 : inf;
    return {pl, pr, pt, ps, il, ir};
}

}  // namespace

int resolution_exponent(DetectorResolution d)
{
    return d == DetectorResolution::NumberResolving ? 2 : 1;
}

MidpointLinkConfig MidpointLinkConfig::from_geometry(double l_tot_km, double delta_l_km)
{
    MidpointLinkConfig cfg;
    cfg.l_left_km = 0.5 * (l_tot_km + delta_l_km);
    cfg.l_right_km = 0.5 * (l_tot_km - delta_l_km);
    return cfg;
}

void MidpointLinkConfig::validate() const
{
    validate_geometry(*this);
    require(is_probability(p0), "p0 must lie in [0, 1]");
    require(std::isfinite(l_att_km) && l_att_km > 0.0, "l_att_km must be > 0");
    require(is_probability(p_dc), "p_dc must lie in [0, 1]");
    require(is_probability(visibility), "visibility must lie in [0, 1]");
    require(std::isfinite(f_em_left) && f_em_left >= 0.25 && f_em_left <= 1.0, "f_em_left must lie in [1/4, 1]");
    require(std::isfinite(f_em_right) && f_em_right >= 0.25 && f_em_right <= 1.0, "f_em_right must lie in [1/4, 1]");
    require(is_probability(q), "q must lie in [0, 1]");
    require(std::isfinite(c_km_per_s) && c_km_per_s > 0.0, "c_km_per_s must be > 0");
}

Asymmetry delta_and_total(const MidpointLinkConfig& cfg)
{
    validate_geometry(cfg);
    return {cfg.l_left_km - cfg.l_right_km, cfg.l_left_km + cfg.l_right_km};
}

double cycle_time_lower_bound(const MidpointLinkConfig& cfg)
{
    validate_geometry(cfg);
    require(std::isfinite(cfg.c_km_per_s) && cfg.c_km_per_s > 0.0, "c_km_per_s must be > 0");
    const auto [delta, total] = delta_and_total(cfg);
    return (total + std::abs(delta)) / cfg.c_km_per_s;
}

SideProbabilities side_probabilities(const MidpointLinkConfig& cfg)
{
    validate_geometry(cfg);
    require(is_probability(cfg.p0), "p0 must lie in [0, 1]");
    require(std::isfinite(cfg.l_att_km) && cfg.l_att_km > 0.0, "l_att_km must be > 0");
    return {cfg.p0 * std::exp(-cfg.l_left_km / cfg.l_att_km), cfg.p0 * std::exp(-cfg.l_right_km / cfg.l_att_km)};
}

LossProducts p_tot_p_sum(double p_left, double p_right)
{
    require(is_probability(p_left) && is_probability(p_right), "side probabilities must lie in [0, 1]");
    return {p_left * p_right, p_left + p_right};
}

double emitter_werner_product(double f_em_left, double f_em_right)
{
    return (4.0 * f_em_left - 1.0) * (4.0 * f_em_right - 1.0) / 9.0;
}

DoubleClickCoefficients double_click_coefficients(const MidpointLinkConfig& cfg)
{
    cfg.validate();
    const Losses l = losses(cfg);
    const int r = resolution_exponent(cfg.detector);
    const double p = cfg.p_dc;
    const double v = cfg.visibility;
    const double q_em = emitter_werner_product(cfg.f_em_left, cfg.f_em_right);
    const double keep_2r = std::pow(1.0 - p, 2 * r);
    const double keep_r1 = std::pow(1.0 - p, r + 1);
    const double keep_2 = (1.0 - p) * (1.0 - p);

    DoubleClickCoefficients k{};
    k.a = 0.5 * l.p_tot * keep_2r + p * l.p_tot * keep_r1 * (0.5 * (2 - r) * (1.0 + v) - 4.0) +
          4.0 * p * p * (1.0 + l.p_tot) * keep_2;
    k.b = 2.0 * p * keep_r1 - 4.0 * p * p * keep_2;
    k.c = 0.25 * q_em * l.p_tot * (1.0 + v) * keep_2r +
          (1.0 - q_em) * (0.125 * l.p_tot * keep_2r + 0.125 * (2 - r) * p * keep_2 * l.p_tot * (1.0 + v)) -
          p * l.p_tot * keep_r1 + p * p * (1.0 + l.p_tot) * keep_2;
    return k;
}

LinkPerformance double_click_exact(const MidpointLinkConfig& cfg)
{
    cfg.validate();
    const Losses l = losses(cfg);
    const int r = resolution_exponent(cfg.detector);
    const double p = cfg.p_dc;
    const double v = cfg.visibility;
    const double q_em = emitter_werner_product(cfg.f_em_left, cfg.f_em_right);
    const double keep_2r = std::pow(1.0 - p, 2 * r);
    const double keep_r1 = std::pow(1.0 - p, r + 1);

    // Herald categories: both photons in different rounds (split by V), both
    // photons bunched into one round plus a dark count, one photon lost plus a
    // dark count, both lost plus two dark counts.
    const double p_true = 0.5 * l.p_tot * v * keep_2r;
    const double p_half = 0.5 * l.p_tot * (1.0 - v) * keep_2r;
    const double p_bunched = 0.5 * (2 - r) * l.p_tot * (1.0 + v) * p * keep_r1;
    const double one_lost = l.p_left * (1.0 - l.p_right) + l.p_right * (1.0 - l.p_left);  // P_sum - 2 P_tot
    const double both_lost = (1.0 - l.p_left) * (1.0 - l.p_right);                         // 1 - P_sum + P_tot
    const double p_one_dark = 2.0 * one_lost * p * keep_r1;
    const double p_two_dark = 4.0 * both_lost * p * p * (1.0 - p) * (1.0 - p);

    const double p_succ = p_true + p_half + p_bunched + p_one_dark + p_two_dark;
    if (!(p_succ > 0.0)) throw NoSuccess("double-click herald has zero success probability");

    const double weighted = q_em * p_true + 0.5 * q_em * p_half +
                            0.25 * ((1.0 - q_em) * (p_true + p_half + p_bunched) + p_one_dark + p_two_dark);
    return assemble(cfg, p_succ, clamp01(weighted / p_succ));
}

LinkPerformance double_click_leading(const MidpointLinkConfig& cfg)
{
    cfg.validate();
    const Losses l = losses(cfg);
    const int r = resolution_exponent(cfg.detector);
    const double p = cfg.p_dc;
    const double v = cfg.visibility;
    const double q_em = emitter_werner_product(cfg.f_em_left, cfg.f_em_right);

    if (l.p_tot == 0.0) {
        if (p == 0.0) throw NoSuccess("double-click herald has zero success probability");
        throw InvalidParameter("leading-order double-click expressions need P_tot > 0");
    }

    const double d1 = 0.5 * l.p_tot - p * (4.0 + r - 0.5 * (2 - r) * (1.0 + v)) * l.p_tot;
    // The depolarized 1/4 floor does not pick up the (1 + 8 p_dc) factor; only
    // this split makes d2 the p_dc-expansion of the exact fidelity.
    const double d2 = 0.25 + 0.25 * q_em * (2.0 * v + 1.0) * (1.0 + 8.0 * p) -
                      0.5 * (2 - r) * q_em * p * (1.0 + v) * (1.0 + v);
    // d3 * P_sum with d3 = q_em (2V + 1) / P_tot
    const double d3_p_sum = q_em * (2.0 * v + 1.0) * (l.inv_left + l.inv_right);

    const double p_succ = d1 + 2.0 * p * l.p_sum;
    if (!(p_succ > 0.0)) throw NoSuccess("double-click herald has zero success probability");
    return assemble(cfg, clamp01(p_succ), clamp01(d2 - d3_p_sum * p));
}

LinkPerformance single_click_exact(const MidpointLinkConfig& cfg)
{
    cfg.validate();
    const Losses l = losses(cfg);
    const double q = cfg.q;
    if (q > std::min(l.p_left, l.p_right))
        throw InvalidParameter("q exceeds min(P_left, P_right): a bright-state parameter would exceed 1");

    const int r = resolution_exponent(cfg.detector);
    const double p = cfg.p_dc;
    const double v = cfg.visibility;
    const double keep_r = std::pow(1.0 - p, r);
    const double sum_ratio = l.inv_left + l.inv_right;  // P_sum / P_tot
    const double inv_tot = l.inv_left * l.inv_right;    // 1 / P_tot; finite since q <= min(P) forces P > 0 unless q == 0

    // Both emitters bright: a lone photon detected, or two photons merged by a
    // non-resolving detector.
    double p1 = 0.0;
    if (q > 0.0) {
        p1 = q * q * (1.0 - p) *
                 (2.0 * p * inv_tot + (-2.0 * std::pow(1.0 - p, r - 1) + 2.0 * p + 0.5 * (2 - r) * (1.0 + v))) +
             q * q * sum_ratio * (keep_r - 2.0 * p * (1.0 - p));
    }

    // Exactly one emitter bright; t1 (t2) has the left (right) one bright.
    // Either its photon is detected, or it is lost (1/P_side - 1 relative
    // weight) and a dark count heralds instead.
    double t1 = 0.0;
    double t2 = 0.0;
    if (q > 0.0) {
        t1 = q * (1.0 - q * l.inv_right) * (keep_r + 2.0 * (l.inv_left - 1.0) * (1.0 - p) * p);
        t2 = q * (1.0 - q * l.inv_left) * (keep_r + 2.0 * (l.inv_right - 1.0) * (1.0 - p) * p);
    }
    const double p2 = t1 + t2;

    // Both emitters dark: a dark count heralds.
    const double both_dark = q > 0.0 ? 1.0 + q * q * inv_tot - q * sum_ratio : 1.0;
    const double p3 = 2.0 * p * (1.0 - p) * both_dark;

    const double p_succ = p1 + p2 + p3;
    if (!(p_succ > 0.0)) throw NoSuccess("single-click herald has zero success probability");

    const double coherence = std::sqrt(v) * std::sqrt(std::max(0.0, t1 * t2));
    return assemble(cfg, p_succ, clamp01((0.5 * p2 + coherence) / p_succ));
}

double attenuation_length_km(double db_per_km)
{
    if (!(std::isfinite(db_per_km) && db_per_km > 0.0)) throw InvalidParameter("attenuation must be > 0 dB/km");
    return 10.0 / (std::log(10.0) * db_per_km);
}

LinkPerformance single_click_leading(const MidpointLinkConfig& cfg)
{
    cfg.validate();
    const Losses l = losses(cfg);
    const double q = cfg.q;
    if (q > std::min(l.p_left, l.p_right))
        throw InvalidParameter("q exceeds min(P_left, P_right): a bright-state parameter would exceed 1");

    const int r = resolution_exponent(cfg.detector);
    const double p = cfg.p_dc;
    const double v = cfg.visibility;
    if (q + p == 0.0) throw NoSuccess("single-click herald has zero success probability");

    const double sum_ratio = l.inv_left + l.inv_right;
    const double bright_share = q / (q + p);
    const double prefactor = 0.5 * (1.0 + std::sqrt(v)) * bright_share;
    const double s1 = prefactor * (1.0 + q - (1.0 + r) * p +
                                   bright_share * (r * p - 0.25 * (2 - r) * (1.0 + v) * q));
    // s2 * P_sum, with s2 carrying 1 / P_tot
    const double s2_p_sum = q > 0.0 ? prefactor * sum_ratio * (0.5 * q - p) : 0.0;

    return assemble(cfg, clamp01(2.0 * q + 2.0 * p), clamp01(s1 - s2_p_sum));
}

}  // namespace qnet_asym::link
