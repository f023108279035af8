#include "qnet_asym/chain_sim.hpp"

#include "qnet_asym/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qnet_asym::chain {

ChainTopology::ChainTopology(std::vector<double> node_positions_km) : positions_(std::move(node_positions_km))
{
    if (positions_.size() < 2) throw InvalidParameter("a chain needs at least two nodes");
    if (positions_.front() != 0.0) throw InvalidParameter("the first node must sit at position 0");
    for (std::size_t i = 1; i < positions_.size(); ++i) {
        if (!std::isfinite(positions_[i]) || !(positions_[i] > positions_[i - 1]))
            throw InvalidParameter("node positions must be finite and strictly increasing (node " + std::to_string(i) +
                                   ")");
    }
}

ChainTopology ChainTopology::from_link_lengths(const std::vector<double>& lengths_km)
{
    std::vector<double> pos{0.0};
    pos.reserve(lengths_km.size() + 1);
    for (double l : lengths_km) pos.push_back(pos.back() + l);
    return ChainTopology(std::move(pos));
}

std::vector<double> ChainTopology::link_lengths_km() const
{
    std::vector<double> out(n_links());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = positions_[i + 1] - positions_[i];
    return out;
}

std::vector<NodeAsymmetry> ChainTopology::node_asymmetry() const
{
    const auto l = link_lengths_km();
    std::vector<NodeAsymmetry> out;
    out.reserve(n_repeaters());
    for (std::size_t n = 1; n + 1 < positions_.size(); ++n) {
        const double left = l[n - 1];
        const double right = l[n];
        const int sign = left > right ? 1 : (left < right ? -1 : 0);
        out.push_back({std::abs(left - right) / (left + right), sign});
    }
    return out;
}

double ChainTopology::a_chain() const
{
    const auto na = node_asymmetry();
    if (na.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& n : na) sum += n.a;
    return sum / static_cast<double>(na.size());
}

ChainTopology build_chain(double total_length_km, std::size_t n_repeaters, double a_chain, int first_sign)
{
    if (!(std::isfinite(total_length_km) && total_length_km > 0.0))
        throw InvalidParameter("total_length_km must be > 0");
    if (n_repeaters < 1) throw InvalidParameter("n_repeaters must be >= 1");
    if (!(a_chain >= 0.0 && a_chain < 1.0)) throw InvalidParameter("a_chain must lie in [0, 1)");
    if (first_sign != 1 && first_sign != -1) throw InvalidParameter("first_sign must be +1 or -1");

    const std::size_t n_links = n_repeaters + 1;
    // link i is long when (i even) == (first_sign > 0)
    std::size_t n_long = 0;
    for (std::size_t i = 0; i < n_links; ++i)
        if ((i % 2 == 0) == (first_sign > 0)) ++n_long;
    const std::size_t n_short = n_links - n_long;
    const double s = total_length_km /
                     (static_cast<double>(n_long) * (1.0 + a_chain) + static_cast<double>(n_short) * (1.0 - a_chain));

    std::vector<double> pos(n_links + 1, 0.0);
    for (std::size_t i = 0; i < n_links; ++i) {
        const bool is_long = (i % 2 == 0) == (first_sign > 0);
        pos[i + 1] = pos[i] + s * (is_long ? 1.0 + a_chain : 1.0 - a_chain);
    }
    pos.back() = total_length_km;
    return ChainTopology(std::move(pos));
}

ChainTopology extend_fibers(const ChainTopology& t)
{
    const auto l = t.link_lengths_km();
    const double longest = *std::max_element(l.begin(), l.end());
    return ChainTopology::from_link_lengths(std::vector<double>(l.size(), longest));
}

ChainTopology mirrored(const ChainTopology& t)
{
    auto l = t.link_lengths_km();
    std::reverse(l.begin(), l.end());
    std::vector<double> pos{0.0};
    for (std::size_t i = 0; i + 1 < l.size(); ++i) pos.push_back(pos.back() + l[i]);
    pos.push_back(t.total_length_km());
    return ChainTopology(std::move(pos));
}

LinkModel LinkModel::from_length(double length_km, double c_km_per_s, double l_att_km)
{
    if (!(std::isfinite(length_km) && length_km > 0.0)) throw InvalidParameter("link length must be > 0");
    if (!(std::isfinite(c_km_per_s) && c_km_per_s > 0.0)) throw InvalidParameter("c_km_per_s must be > 0");
    if (!(std::isfinite(l_att_km) && l_att_km > 0.0)) throw InvalidParameter("l_att_km must be > 0");
    const double p = std::exp(-length_km / l_att_km);
    if (!(p > 0.0)) throw InvalidParameter("link success probability underflows; link too long for l_att_km");
    return {length_km, length_km / c_km_per_s, p};
}

double swap_time_estimate(double l_tot_km, double a_n, double c_km_per_s, double l_att_km)
{
    if (!(std::isfinite(l_tot_km) && l_tot_km > 0.0)) throw InvalidParameter("l_tot_km must be > 0");
    if (!(a_n >= 0.0 && a_n < 1.0)) throw InvalidParameter("a_n must lie in [0, 1)");
    if (!(std::isfinite(c_km_per_s) && c_km_per_s > 0.0)) throw InvalidParameter("c_km_per_s must be > 0");
    if (!(std::isfinite(l_att_km) && l_att_km > 0.0)) throw InvalidParameter("l_att_km must be > 0");
    // success rate P / T_cycle of a link of length (1 +- A) L_tot / 2
    auto rate = [&](double sign) {
        const double len = 0.5 * l_tot_km * (1.0 + sign * a_n);
        return c_km_per_s * std::exp(-len / l_att_km) / len;
    };
    const double r_plus = rate(+1.0);
    const double r_minus = rate(-1.0);
    return (1.0 + r_plus / r_minus + r_minus / r_plus) / (r_plus + r_minus);
}

}  // namespace qnet_asym::chain
