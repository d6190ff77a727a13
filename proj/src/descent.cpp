#include "heterocyl/descent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace heterocyl {

namespace {

void project(std::span<double> x, std::optional<std::span<const double>> lo,
             std::optional<std::span<const double>> hi) {
    if (lo) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::max(x[i], (*lo)[i]);
    }
    if (hi) {
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::min(x[i], (*hi)[i]);
    }
}

}  // namespace

double projected_gradient_norm(std::span<const double> x, std::span<const double> g,
                               std::optional<std::span<const double>> lo,
                               std::optional<std::span<const double>> hi) {
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool at_lo = lo && x[i] <= (*lo)[i];
        const bool at_hi = hi && x[i] >= (*hi)[i];
        if (at_lo && at_hi) continue;      // pinned
        if (at_lo && g[i] > 0.0) continue;  // descent would leave the box
        if (at_hi && g[i] < 0.0) continue;
        m = std::max(m, std::abs(g[i]));
    }
    return m;
}

DescentResult projected_bb_descent(const EnergyGradient& eval, std::vector<double> x0,
                                   std::optional<std::span<const double>> lo,
                                   std::optional<std::span<const double>> hi,
                                   const DescentOptions& options, bool record_history) {
    const std::size_t n = x0.size();
    DescentResult res;
    std::vector<double> x = std::move(x0);
    project(x, lo, hi);

    std::vector<double> g(n), xn(n), gn(n);
    EnergyValue ev = eval(x, g);
    if (record_history) res.energy_history.push_back(ev.energy);

    double gmax = projected_gradient_norm(x, g, lo, hi);
    double step = options.initial_step > 0.0 ? options.initial_step
                                              : (gmax > 0.0 ? 1.0 / gmax : 1.0);
    int it = 0;
    for (; it < options.max_iter; ++it) {
        if (gmax <= options.grad_tol) {
            res.converged = true;
            break;
        }

        bool accepted = false;
        double trial = step;
        EnergyValue evn;
        for (int bt = 0; bt <= options.max_backtracks; ++bt) {
            double gd = 0.0;
            bool moved = false;
            for (std::size_t i = 0; i < n; ++i) xn[i] = x[i] - trial * g[i];
            project(xn, lo, hi);
            for (std::size_t i = 0; i < n; ++i) {
                const double d = xn[i] - x[i];
                gd += g[i] * d;
                moved = moved || d != 0.0;
            }
            if (!moved) break;
            evn = eval(xn, gn);
            const double floor = std::max(ev.noise, evn.noise);
            if (std::isfinite(evn.energy) &&
                evn.energy <= ev.energy + options.armijo * gd + floor) {
                accepted = true;
                break;
            }
            trial *= 0.5;
            if (trial < options.min_step) break;
        }
        if (!accepted) {
            res.stalled = true;
            break;
        }

        double ss = 0.0;
        double sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double s = xn[i] - x[i];
            const double y = gn[i] - g[i];
            ss += s * s;
            sy += s * y;
        }
        if (sy > 0.0) {
            step = std::clamp(ss / sy, options.min_step, options.max_step);
        } else {
            step = std::min(options.max_step, 4.0 * trial);
        }

        x.swap(xn);
        g.swap(gn);
        ev = evn;
        if (record_history) res.energy_history.push_back(ev.energy);
        gmax = projected_gradient_norm(x, g, lo, hi);
    }
    if (!res.converged && gmax <= options.grad_tol) res.converged = true;

    res.x = std::move(x);
    res.energy = ev.energy;
    res.grad_norm = gmax;
    res.iterations = it;
    return res;
}

}  // namespace heterocyl
