#include "qnet_asym/chain_sim.hpp"

#include "qnet_asym/errors.hpp"
#include "qnet_asym/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <limits>
#include <mutex>
#include <optional>
#include <queue>
#include <thread>

namespace qnet_asym::chain {

void SimParams::validate() const
{
    if (!(std::isfinite(c_km_per_s) && c_km_per_s > 0.0)) throw InvalidParameter("c_km_per_s must be > 0");
    if (!(std::isfinite(l_att_km) && l_att_km > 0.0)) throw InvalidParameter("l_att_km must be > 0");
    if (!(std::isfinite(t_coh_s) && t_coh_s > 0.0)) throw InvalidParameter("t_coh_s must be > 0");
    if (n_runs < 1) throw InvalidParameter("n_runs must be >= 1");
}

namespace {

constexpr int none = -1;

// An entangled pair between two nodes.  Its two live qubits accrue storage
// at rate 2 from t_last on; everything consumed earlier is folded into s0.
struct Pair {
    std::size_t left;
    std::size_t right;
    double s0;
    double t_last;
    double notify_plus;   // max over swaps of t + x/c
    double notify_minus;  // max over swaps of t - x/c
    bool swapped;

    double storage(double t) const { return s0 + 2.0 * (t - t_last); }
};

struct Event {
    double time;
    std::size_t link;

    // min-heap on (time, link)
    bool operator<(const Event& o) const { return time != o.time ? time > o.time : link > o.link; }
};

class Run {
public:
    Run(const ChainTopology& t, const SimParams& p, std::uint64_t run_index)
        : params_(p), positions_(t.node_positions_km()), n_links_(t.n_links())
    {
        const auto lengths = t.link_lengths_km();
        links_.reserve(n_links_);
        streams_.reserve(n_links_);
        for (std::size_t i = 0; i < n_links_; ++i) {
            links_.push_back(LinkModel::from_length(lengths[i], p.c_km_per_s, p.l_att_km));
            streams_.emplace_back(p.master_seed, run_index, static_cast<std::uint32_t>(i));
        }
        // slot_[2n] is node n's left qubit, slot_[2n+1] its right qubit
        slot_.assign(2 * (n_links_ + 1), none);
        pending_.assign(n_links_, false);
    }

    RunRecord execute()
    {
        for (std::size_t i = 0; i < n_links_; ++i) start_attempts(i, 0.0);
        while (!queue_.empty()) {
            const Event e = queue_.top();
            queue_.pop();
            ++events_;
            pending_[e.link] = false;
            if (auto done = on_success(e.link, e.time)) return *done;
        }
        throw std::logic_error("chain simulation ran out of events before end-to-end entanglement");
    }

private:
    int& left_slot(std::size_t node) { return slot_[2 * node]; }
    int& right_slot(std::size_t node) { return slot_[2 * node + 1]; }

    void start_attempts(std::size_t link, double t)
    {
        if (pending_[link] || right_slot(link) != none || left_slot(link + 1) != none) return;
        const std::uint64_t k = streams_[link].geometric(links_[link].p_succ);
        queue_.push({t + static_cast<double>(k) * links_[link].t_cycle_s, link});
        pending_[link] = true;
    }

    std::optional<RunRecord> on_success(std::size_t link, double t)
    {
        const int id = static_cast<int>(pairs_.size());
        pairs_.push_back({link, link + 1, 0.0, t, -std::numeric_limits<double>::infinity(),
                          -std::numeric_limits<double>::infinity(), false});
        right_slot(link) = id;
        left_slot(link + 1) = id;
        int latest = id;
        for (std::size_t node : {link, link + 1})
            if (auto merged = try_swap(node, t)) latest = *merged;
        const Pair& p = pairs_[static_cast<std::size_t>(latest)];
        if (p.left == 0 && p.right == n_links_) return finish(p, t);
        return std::nullopt;
    }

    std::optional<int> try_swap(std::size_t node, double t)
    {
        if (node == 0 || node == n_links_) return std::nullopt;
        const int a = left_slot(node);
        const int b = right_slot(node);
        if (a == none || b == none) return std::nullopt;
        const Pair pa = pairs_[static_cast<std::size_t>(a)];
        const Pair pb = pairs_[static_cast<std::size_t>(b)];
        const double x_over_c = positions_[node] / params_.c_km_per_s;
        Pair m{pa.left,
               pb.right,
               pa.storage(t) + pb.storage(t),
               t,
               std::max({pa.notify_plus, pb.notify_plus, t + x_over_c}),
               std::max({pa.notify_minus, pb.notify_minus, t - x_over_c}),
               true};
        const int id = static_cast<int>(pairs_.size());
        pairs_.push_back(m);
        right_slot(m.left) = id;
        left_slot(m.right) = id;
        left_slot(node) = none;
        right_slot(node) = none;
        start_attempts(node - 1, t);
        start_attempts(node, t);
        return id;
    }

    RunRecord finish(const Pair& p, double t)
    {
        double storage = p.storage(t);
        if (params_.include_swap_notification_delay && p.swapped) {
            const double total_over_c = positions_.back() / params_.c_km_per_s;
            storage += std::max(0.0, p.notify_plus - t);
            storage += std::max(0.0, total_over_c + p.notify_minus - t);
        }
        return {t, std::exp(-storage / params_.t_coh_s), storage, events_};
    }

    const SimParams& params_;
    const std::vector<double>& positions_;
    std::size_t n_links_;
    std::vector<LinkModel> links_;
    std::vector<rng::Stream> streams_;
    std::vector<int> slot_;
    std::vector<bool> pending_;
    std::vector<Pair> pairs_;
    std::priority_queue<Event> queue_;
    std::uint64_t events_ = 0;
};

}  // namespace

RunRecord simulate_run(const ChainTopology& t, const SimParams& p, std::uint64_t run_index)
{
    p.validate();
    return Run(t, p, run_index).execute();
}

std::vector<RunRecord> simulate_batch(const ChainTopology& t, const SimParams& p, unsigned workers)
{
    p.validate();
    std::vector<RunRecord> out(p.n_runs);
    const unsigned n_threads = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(p.n_runs)));
    constexpr std::size_t chunk = 256;
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto work = [&] {
        try {
            for (;;) {
                const std::size_t begin = next.fetch_add(chunk);
                if (begin >= p.n_runs) return;
                const std::size_t end = std::min(begin + chunk, p.n_runs);
                for (std::size_t r = begin; r < end; ++r) out[r] = Run(t, p, r).execute();
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next.store(p.n_runs);
        }
    };

    if (n_threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

}  // namespace qnet_asym::chain
