#pragma once

// Configuration-driven parameter sweeps producing CSV.

#include "qnet_asym/link_physics.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qnet_asym::sweep {

enum class Mode { Midpoint, Dispersion, Chain };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view s);  ///< throws InvalidParameter

struct MidpointParams {
    double l_tot_km = 100.0;
    double delta_l_km = 0.0;
    double p0 = 1.0;
    double l_att_km = 22.0;
    double p_dc = 0.0;
    double visibility = 1.0;
    double f_em_left = 1.0;
    double f_em_right = 1.0;
    double q = 0.0;
    double c_km_per_s = 200000.0;
    link::DetectorResolution detector = link::DetectorResolution::NonNumberResolving;

    bool operator==(const MidpointParams&) const = default;
};

struct DispersionParams {
    double photon_duration_ps = 1000.0;  ///< Lorentzian tau; Gaussian sigma = 1 / (sqrt(2) tau)
    double delta_l_km = 0.0;
    double beta2_ps2_per_km = 0.0;
    double beta3_ps3_per_km = 0.0;
    double delta_t_ps = 0.0;
    double delta_omega_rad_per_ps = 0.0;
    bool numeric = true;

    bool operator==(const DispersionParams&) const = default;
};

struct ChainParams {
    double total_length_km = 1000.0;
    std::size_t n_repeaters = 19;
    double a_chain = 0.0;
    int first_sign = 1;
    double c_km_per_s = 200000.0;
    double l_att_km = 21.714724095162588;
    double t_coh_s = 1.0;
    std::size_t n_runs = 20000;
    std::uint64_t master_seed = 1;
    bool include_swap_notification_delay = false;
    bool asymmetric = true;       ///< emit rows for the chain as built
    bool extended_fiber = true;   ///< emit rows for its extended-fiber version

    bool operator==(const ChainParams&) const = default;
};

struct Sweep {
    std::string variable;
    // either an explicit list or a range
    std::vector<double> values;
    std::optional<double> start;
    std::optional<double> stop;
    std::optional<std::size_t> points;
    bool log_scale = false;

    std::vector<double> grid() const;
    bool operator==(const Sweep&) const = default;
};

struct SweepConfig {
    Mode mode = Mode::Midpoint;
    MidpointParams midpoint;
    DispersionParams dispersion;
    ChainParams chain;
    Sweep sweep;
    std::string output;   ///< may be empty; the command line can supply it
    unsigned workers = 1;

    bool operator==(const SweepConfig&) const = default;
};

/// Strict parse: unknown keys, wrong types, values outside the physical
/// domain (checked at every sweep point) raise InvalidParameter naming the key.
SweepConfig parse_config(std::string_view json_text);

/// Canonical JSON form; parse_config(emit_config(c)) == c.
std::string emit_config(const SweepConfig& cfg);

/// Header line plus one line per sweep point (per point and variant in chain
/// mode).  Output does not depend on the worker count.
std::string run_sweep(const SweepConfig& cfg);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double x);

}  // namespace qnet_asym::sweep
