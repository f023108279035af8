#include "qnet_asym/sweep.hpp"

#include "sweep_fields.hpp"

#include "qnet_asym/chain_sim.hpp"
#include "qnet_asym/dispersion.hpp"
#include "qnet_asym/errors.hpp"
#include "qnet_asym/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <thread>

namespace qnet_asym::sweep {

namespace {

using Row = std::vector<std::optional<double>>;

std::string join(const Row& r)
{
    std::string s;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (i) s += ',';
        if (r[i]) s += format_double(*r[i]);
    }
    return s;
}

std::string join(const std::vector<std::string>& cols)
{
    std::string s;
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) s += ',';
        s += cols[i];
    }
    return s;
}

// Evaluates f(i) for i in [0, n) on up to `workers` threads; results keep index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, unsigned workers, const std::function<T(std::size_t)>& f)
{
    std::vector<T> out(n);
    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::size_t first_index = n;
    std::mutex mu;
    auto body = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) {
            try {
                out[i] = f(i);
            } catch (...) {
                std::lock_guard lock(mu);
                if (i < first_index) {
                    first_index = i;
                    first = std::current_exception();
                }
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < w; ++k) pool.emplace_back(body);
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
    return out;
}

template <class P>
P with_value(P p, const std::string& name, double x)
{
    double* target = detail::sweep_target(p, name);
    if (!target) throw InvalidParameter("'" + name + "' is not a sweepable parameter");
    *target = x;
    return p;
}

// Undefined quantities (no success possible, or outside the model's domain) become empty cells.
void append(Row& row, const std::function<link::LinkPerformance()>& f)
{
    try {
        const auto r = f();
        row.push_back(r.p_succ);
        row.push_back(r.fidelity);
    } catch (const NoSuccess&) {
        row.insert(row.end(), 2, std::nullopt);
    } catch (const InvalidParameter&) {
        row.insert(row.end(), 2, std::nullopt);
    }
}

std::string midpoint_sweep(const SweepConfig& cfg)
{
    const auto grid = cfg.sweep.grid();
    std::string csv = join({cfg.sweep.variable, "l_left_km", "l_right_km", "t_cycle_lb_s", "p_succ_1click_exact",
                            "f_1click_exact", "p_succ_1click_leading", "f_1click_leading", "p_succ_2click_exact",
                            "f_2click_exact", "p_succ_2click_leading", "f_2click_leading"}) +
                      "\n";
    const auto rows = parallel_map<Row>(grid.size(), cfg.workers, [&](std::size_t i) {
        const auto m = with_value(cfg.midpoint, cfg.sweep.variable, grid[i]);
        auto c = link::MidpointLinkConfig::from_geometry(m.l_tot_km, m.delta_l_km);
        c.p0 = m.p0;
        c.l_att_km = m.l_att_km;
        c.p_dc = m.p_dc;
        c.visibility = m.visibility;
        c.f_em_left = m.f_em_left;
        c.f_em_right = m.f_em_right;
        c.q = m.q;
        c.c_km_per_s = m.c_km_per_s;
        c.detector = m.detector;
        c.validate();
        Row row{grid[i], c.l_left_km, c.l_right_km, link::cycle_time_lower_bound(c)};
        append(row, [&] { return link::single_click_exact(c); });
        append(row, [&] { return link::single_click_leading(c); });
        append(row, [&] { return link::double_click_exact(c); });
        append(row, [&] { return link::double_click_leading(c); });
        return row;
    });
    for (const auto& r : rows) csv += join(r) + "\n";
    return csv;
}

std::string dispersion_sweep(const SweepConfig& cfg)
{
    const auto grid = cfg.sweep.grid();
    std::string csv = join({cfg.sweep.variable, "tau_ps", "sigma_rad_per_ps", "gaussian_exact", "gaussian_leading",
                            "gaussian_first_order_tod", "lorentzian_exact", "lorentzian_linear", "gaussian_numeric",
                            "gaussian_numeric_err", "lorentzian_numeric", "lorentzian_numeric_err"}) +
                      "\n";
    const auto rows = parallel_map<Row>(grid.size(), cfg.workers, [&](std::size_t i) {
        const auto d = with_value(cfg.dispersion, cfg.sweep.variable, grid[i]);
        const double tau = d.photon_duration_ps;
        const double sigma = 1.0 / (std::numbers::sqrt2 * tau);
        const dispersion::DispersionContext ctx{d.delta_l_km, d.beta2_ps2_per_km, d.beta3_ps3_per_km, d.delta_t_ps,
                                                d.delta_omega_rad_per_ps};
        // closed forms are evaluated at beta3 = 0; the numeric columns include it
        auto no_tod = ctx;
        no_tod.beta3_ps3_per_km = 0.0;
        const bool lorentz_closed = d.delta_t_ps == 0.0 && d.delta_omega_rad_per_ps == 0.0;
        Row row{grid[i], tau, sigma};
        row.push_back(dispersion::gaussian_visibility_exact_no_tod(sigma, no_tod));
        row.push_back(dispersion::gaussian_visibility_leading(sigma, no_tod).value);
        row.push_back(dispersion::gaussian_visibility_first_order_tod(sigma, ctx).value);
        row.push_back(lorentz_closed ? std::optional(dispersion::lorentzian_visibility_exact(tau, no_tod)) : std::nullopt);
        row.push_back(lorentz_closed ? std::optional(dispersion::lorentzian_visibility_linear(tau, no_tod).value)
                                     : std::nullopt);
        if (d.numeric) {
            const auto g = dispersion::numeric_visibility(dispersion::GaussianPacket{sigma},
                                                          dispersion::GaussianPacket{sigma}, ctx);
            const auto l = dispersion::numeric_visibility(dispersion::LorentzianPacket{tau},
                                                          dispersion::LorentzianPacket{tau}, ctx);
            row.insert(row.end(), {g.value, g.error, l.value, l.error});
        } else {
            row.insert(row.end(), 4, std::nullopt);
        }
        return row;
    });
    for (const auto& r : rows) csv += join(r) + "\n";
    return csv;
}

std::string chain_sweep(const SweepConfig& cfg)
{
    const auto grid = cfg.sweep.grid();
    const bool own_a_column = cfg.sweep.variable != "a_chain";
    std::vector<std::string> header;
    if (own_a_column) header.push_back(cfg.sweep.variable);
    for (const char* c : {"a_chain", "mean_duration_s", "se_duration_s", "qber", "se_qber", "skr_per_s",
                          "se_skr_per_s", "variant"})
        header.emplace_back(c);
    std::string csv = join(header) + "\n";

    for (double x : grid) {
        const auto c = with_value(cfg.chain, cfg.sweep.variable, x);
        chain::SimParams sp;
        sp.c_km_per_s = c.c_km_per_s;
        sp.l_att_km = c.l_att_km;
        sp.t_coh_s = c.t_coh_s;
        sp.n_runs = c.n_runs;
        sp.master_seed = c.master_seed;
        sp.include_swap_notification_delay = c.include_swap_notification_delay;
        sp.validate();
        const auto built = chain::build_chain(c.total_length_km, c.n_repeaters, c.a_chain, c.first_sign);

        auto emit = [&](const chain::ChainTopology& t, const char* variant) {
            const auto runs = chain::simulate_batch(t, sp, cfg.workers);
            const auto m = metrics::aggregate(runs);
            Row row;
            if (own_a_column) row.push_back(x);
            row.insert(row.end(), {c.a_chain, m.mean_duration_s, m.se_duration_s, m.qber, m.se_qber, m.skr_per_s,
                                   m.se_skr_per_s});
            csv += join(row) + "," + variant + "\n";
        };
        if (c.asymmetric) emit(built, "asymmetric");
        if (c.extended_fiber) emit(chain::extend_fibers(built), "extended_fiber");
    }
    return csv;
}

}  // namespace

std::string format_double(double x)
{
    if (x == 0.0) return "0";  // also folds -0
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

std::string run_sweep(const SweepConfig& cfg)
{
    switch (cfg.mode) {
    case Mode::Midpoint: return midpoint_sweep(cfg);
    case Mode::Dispersion: return dispersion_sweep(cfg);
    case Mode::Chain: return chain_sweep(cfg);
    }
    throw InvalidParameter("unknown mode");
}

}  // namespace qnet_asym::sweep
