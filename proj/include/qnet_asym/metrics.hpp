#pragma once

// QBER, generation duration and asymptotic BB84 key rate from Monte Carlo runs.

#include "qnet_asym/chain_sim.hpp"

#include <cstddef>
#include <span>

namespace qnet_asym::metrics {

/// h(x) = -x log2 x - (1-x) log2(1-x), with h(0) = h(1) = 0.
double binary_entropy(double x);

/// Q = (1 - w) / 2 for a Werner state, in either basis.
double qber_from_werner(double w);

/// (1/T) max(1 - 2 h(Q), 0)
double secret_key_rate(double mean_duration_s, double qber);

struct AggregateMetrics {
    std::size_t n_runs;
    double mean_duration_s;
    double se_duration_s;
    double mean_werner;
    double qber;
    double se_qber;
    double skr_per_s;
    double se_skr_per_s;  ///< first-order delta method, including the T-w covariance
};

/// Sufficient statistics of (duration, werner) pairs; merging two
/// accumulators equals accumulating the concatenated records.
class Accumulator {
public:
    void add(double duration_s, double werner);
    void add(const chain::RunRecord& r) { add(r.duration_s, r.werner_end); }
    void merge(const Accumulator& other);

    std::size_t count() const { return n_; }
    /// Throws InvalidParameter with fewer than two records.
    AggregateMetrics finish() const;

private:
    std::size_t n_ = 0;
    double mean_t_ = 0.0;
    double mean_w_ = 0.0;
    double m2_t_ = 0.0;
    double m2_w_ = 0.0;
    double c_tw_ = 0.0;
};

AggregateMetrics aggregate(std::span<const chain::RunRecord> records);

}  // namespace qnet_asym::metrics
