#pragma once

// Repeater chains with unevenly spaced nodes and a SWAP-ASAP Monte Carlo.
// Lengths in km, times in s.

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qnet_asym::chain {

struct NodeAsymmetry {
    double a;  ///< |L_left - L_right| / (L_left + L_right)
    int sign;  ///< sign of L_left - L_right, 0 when balanced
};

class ChainTopology {
public:
    /// Positions must start at 0 and be strictly increasing.
    explicit ChainTopology(std::vector<double> node_positions_km);
    static ChainTopology from_link_lengths(const std::vector<double>& lengths_km);

    const std::vector<double>& node_positions_km() const { return positions_; }
    std::vector<double> link_lengths_km() const;
    double total_length_km() const { return positions_.back(); }
    std::size_t n_links() const { return positions_.size() - 1; }
    std::size_t n_repeaters() const { return positions_.size() - 2; }

    /// One entry per repeater, left to right.
    std::vector<NodeAsymmetry> node_asymmetry() const;
    /// Mean of A_n over repeaters; 0 for a chain without repeaters.
    double a_chain() const;

    bool operator==(const ChainTopology&) const = default;

private:
    std::vector<double> positions_;
};

/// Links alternate (1 + A) s and (1 - A) s; first_sign = +1 makes the first
/// link the long one.  s is chosen so the total length is preserved.
ChainTopology build_chain(double total_length_km, std::size_t n_repeaters, double a_chain, int first_sign);

/// Every link lengthened to the longest one.
ChainTopology extend_fibers(const ChainTopology& t);

/// Left-right reflection.
ChainTopology mirrored(const ChainTopology& t);

struct LinkModel {
    double length_km;
    double t_cycle_s;  ///< length / c
    double p_succ;     ///< exp(-length / L_att)

    static LinkModel from_length(double length_km, double c_km_per_s, double l_att_km);
};

struct SimParams {
    double c_km_per_s = 200000.0;
    double l_att_km = 21.714724095162588;  ///< 0.2 dB/km
    double t_coh_s = 1.0;
    std::size_t n_runs = 1000;
    std::uint64_t master_seed = 0;
    bool include_swap_notification_delay = false;

    void validate() const;
};

struct RunRecord {
    double duration_s;   ///< start until the final swap
    double werner_end;   ///< exp(-storage / T_coh)
    double storage_s;    ///< summed storage time of every qubit that fed the end-to-end pair
    std::uint64_t events;

    bool operator==(const RunRecord&) const = default;
};

/// One fresh-start run.  Deterministic in (topology, params, run_index).
RunRecord simulate_run(const ChainTopology& t, const SimParams& p, std::uint64_t run_index);

/// Runs 0 .. n_runs-1, returned in run order whatever the worker count.
std::vector<RunRecord> simulate_batch(const ChainTopology& t, const SimParams& p, unsigned workers = 1);

/// Mean time until a repeater with links (1 +- A_n) L_tot / 2 can swap, with
/// exponential rather than geometric waiting times.
double swap_time_estimate(double l_tot_km, double a_n, double c_km_per_s, double l_att_km);

}  // namespace qnet_asym::chain
