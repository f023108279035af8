#include "qnet_asym/quadrature.hpp"

#include "qnet_asym/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace qnet_asym::quadrature {

namespace {

using gk21 = boost::math::quadrature::gauss_kronrod<double, 21>;

struct Panel {
    double a;
    double b;
    std::complex<double> value;
    double error;

    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate(const Integrand& f, double a, double b)
{
    double err = 0.0;
    // max_depth 0: a single Gauss-Kronrod pair, no recursion.
    const std::complex<double> v = gk21::integrate(f, a, b, 0, 0.0, &err);
    return {a, b, v, err};
}

}  // namespace

Result integrate(const Integrand& f, const std::vector<double>& breakpoints, const Options& opts)
{
    if (breakpoints.size() < 2) return {{0.0, 0.0}, 0.0, 0};
    if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
        throw InvalidParameter("quadrature breakpoints must be sorted");
    if (breakpoints.size() - 1 > opts.max_panels) {
        std::ostringstream msg;
        msg << "quadrature needs " << breakpoints.size() - 1 << " initial panels, budget is " << opts.max_panels;
        throw QuadratureFailure(msg.str());
    }

    std::priority_queue<Panel> heap;
    double total_error = 0.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        if (breakpoints[i + 1] <= breakpoints[i]) continue;
        Panel p = evaluate(f, breakpoints[i], breakpoints[i + 1]);
        total_error += p.error;
        heap.push(p);
    }

    while (total_error > opts.abs_tol && !heap.empty()) {
        if (heap.size() >= opts.max_panels) {
            std::ostringstream msg;
            msg << "quadrature budget of " << opts.max_panels << " panels exhausted with error estimate "
                << total_error << " > " << opts.abs_tol << " (oscillation too fast for the window)";
            throw QuadratureFailure(msg.str());
        }
        const Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) break;  // cannot split further in double precision
        heap.pop();
        Panel left = evaluate(f, worst.a, mid);
        Panel right = evaluate(f, mid, worst.b);
        total_error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }

    // Re-sum in a fixed order so the result does not depend on heap layout drift.
    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    Result out{{0.0, 0.0}, 0.0, panels.size()};
    for (const Panel& p : panels) {
        out.value += p.value;
        out.error += p.error;
    }
    if (out.error > opts.abs_tol && !std::isfinite(out.error))
        throw QuadratureFailure("quadrature produced a non-finite error estimate");
    return out;
}

}  // namespace qnet_asym::quadrature
