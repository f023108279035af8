#include "qnet_asym/metrics.hpp"

#include "qnet_asym/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qnet_asym::metrics {

double binary_entropy(double x)
{
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidParameter("binary_entropy: argument must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

double qber_from_werner(double w)
{
    if (!(w >= 0.0 && w <= 1.0)) throw InvalidParameter("qber_from_werner: w must lie in [0, 1]");
    return 0.5 * (1.0 - w);
}

double secret_key_rate(double mean_duration_s, double qber)
{
    if (!(std::isfinite(mean_duration_s) && mean_duration_s > 0.0))
        throw InvalidParameter("secret_key_rate: mean duration must be > 0");
    if (!(qber >= 0.0 && qber <= 0.5)) throw InvalidParameter("secret_key_rate: QBER must lie in [0, 1/2]");
    return std::max(1.0 - 2.0 * binary_entropy(qber), 0.0) / mean_duration_s;
}

void Accumulator::add(double duration_s, double werner)
{
    ++n_;
    const double n = static_cast<double>(n_);
    const double dt = duration_s - mean_t_;
    const double dw = werner - mean_w_;
    mean_t_ += dt / n;
    mean_w_ += dw / n;
    m2_t_ += dt * (duration_s - mean_t_);
    m2_w_ += dw * (werner - mean_w_);
    c_tw_ += dt * (werner - mean_w_);
}

void Accumulator::merge(const Accumulator& o)
{
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    const double na = static_cast<double>(n_);
    const double nb = static_cast<double>(o.n_);
    const double n = na + nb;
    const double dt = o.mean_t_ - mean_t_;
    const double dw = o.mean_w_ - mean_w_;
    m2_t_ += o.m2_t_ + dt * dt * na * nb / n;
    m2_w_ += o.m2_w_ + dw * dw * na * nb / n;
    c_tw_ += o.c_tw_ + dt * dw * na * nb / n;
    mean_t_ += dt * nb / n;
    mean_w_ += dw * nb / n;
    n_ += o.n_;
}

AggregateMetrics Accumulator::finish() const
{
    if (n_ < 2) throw InvalidParameter("aggregate needs at least two run records");
    const double n = static_cast<double>(n_);
    // variances of the sample means
    const double var_t = m2_t_ / (n - 1.0) / n;
    const double var_w = m2_w_ / (n - 1.0) / n;
    const double cov_tw = c_tw_ / (n - 1.0) / n;

    AggregateMetrics m{};
    m.n_runs = n_;
    m.mean_duration_s = mean_t_;
    m.se_duration_s = std::sqrt(std::max(var_t, 0.0));
    m.mean_werner = std::clamp(mean_w_, 0.0, 1.0);
    m.qber = qber_from_werner(m.mean_werner);
    m.se_qber = 0.5 * std::sqrt(std::max(var_w, 0.0));
    m.skr_per_s = secret_key_rate(mean_t_, m.qber);

    const double gain = 1.0 - 2.0 * binary_entropy(m.qber);
    if (gain > 0.0) {
        const double d_t = -gain / (mean_t_ * mean_t_);
        // dSKR/dw = -(1/2) dSKR/dQ = (1/T) h'(Q), h'(Q) = log2((1-Q)/Q)
        const double d_w = m.qber > 0.0 ? std::log2((1.0 - m.qber) / m.qber) / mean_t_ : 0.0;
        const double var = d_t * d_t * var_t + d_w * d_w * var_w + 2.0 * d_t * d_w * cov_tw;
        m.se_skr_per_s = std::sqrt(std::max(var, 0.0));
    }
    return m;
}

AggregateMetrics aggregate(std::span<const chain::RunRecord> records)
{
    if (records.empty()) throw InvalidParameter("aggregate: no run records");
    Accumulator acc;
    for (const auto& r : records) acc.add(r);
    return acc.finish();
}

}  // namespace qnet_asym::metrics
