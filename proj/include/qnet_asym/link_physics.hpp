#pragma once

// Heralded entanglement generation over a midpoint station that need not sit
// halfway between the two nodes.  All lengths in km, times in s.

namespace qnet_asym::link {

enum class DetectorResolution {
    NonNumberResolving = 1,
    NumberResolving = 2,
};

/// Exponent r in the click statistics (1 or 2).
int resolution_exponent(DetectorResolution d);

struct MidpointLinkConfig {
    double l_left_km = 0.0;
    double l_right_km = 0.0;
    double p0 = 1.0;            ///< success probability of emission, coupling and detection at zero fiber length
    double l_att_km = 22.0;
    double p_dc = 0.0;          ///< dark-count probability per detector per attempt window
    double visibility = 1.0;    ///< photon indistinguishability V
    double f_em_left = 1.0;     ///< emitter-photon state fidelity, in [1/4, 1]
    double f_em_right = 1.0;
    DetectorResolution detector = DetectorResolution::NonNumberResolving;
    double q = 0.0;             ///< single-click combined bright-state parameter alpha_side * P_side
    double c_km_per_s = 200000.0;

    /// Places the midpoint so that L_left - L_right = delta_l and L_left + L_right = l_tot.
    static MidpointLinkConfig from_geometry(double l_tot_km, double delta_l_km);

    /// Throws InvalidParameter naming the first field outside its domain.
    void validate() const;
};

struct Asymmetry {
    double delta_l_km;  ///< L_left - L_right (signed)
    double l_tot_km;    ///< L_left + L_right
};

struct SideProbabilities {
    double left;
    double right;
};

struct LossProducts {
    double p_tot;  ///< P_left * P_right
    double p_sum;  ///< P_left + P_right
};

struct LinkPerformance {
    double p_succ;
    double fidelity;
    double t_cycle_lb_s;
    double rate_lb_per_s;  ///< p_succ / t_cycle_lb_s; +inf for a zero-length link
};

/// Coefficients of the exact double-click expressions
/// P_succ = a + b P_sum and F = (c + b P_sum / 4) / (a + b P_sum).
struct DoubleClickCoefficients {
    double a;
    double b;
    double c;
};

Asymmetry delta_and_total(const MidpointLinkConfig& cfg);

/// Speed-of-light bound (L_tot + |dL|) / c on the duration of one attempt.
double cycle_time_lower_bound(const MidpointLinkConfig& cfg);

SideProbabilities side_probabilities(const MidpointLinkConfig& cfg);

LossProducts p_tot_p_sum(double p_left, double p_right);

/// q_em = (4 F_left - 1)(4 F_right - 1) / 9, the product of the two emitter Werner parameters.
double emitter_werner_product(double f_em_left, double f_em_right);

DoubleClickCoefficients double_click_coefficients(const MidpointLinkConfig& cfg);

/// Fiber attenuation length from a loss figure: L_att = 10 / (ln 10 * dB_per_km).
double attenuation_length_km(double db_per_km);

LinkPerformance double_click_exact(const MidpointLinkConfig& cfg);
LinkPerformance double_click_leading(const MidpointLinkConfig& cfg);
LinkPerformance single_click_exact(const MidpointLinkConfig& cfg);
LinkPerformance single_click_leading(const MidpointLinkConfig& cfg);

}  // namespace qnet_asym::link
