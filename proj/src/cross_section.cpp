#include "heterocyl/cross_section.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "heterocyl/error.hpp"

namespace heterocyl {

namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();

void check_profile(const CrossSectionProfile& p) {
    if (p.nx < 2) throw std::invalid_argument("cross-section profile needs nx >= 2");
    if (static_cast<int>(p.values.size()) != p.nx + 1) {
        throw std::invalid_argument("cross-section profile has wrong number of values");
    }
    if (p.values.front() != 0.0 || p.values.back() != 0.0) {
        throw std::invalid_argument("cross-section profile endpoints must be zero");
    }
}

double lambda_of(const Nonlinearity& nl) {
    if (const auto* q = dynamic_cast<const QuinticNonlinearity*>(&nl)) return q->lambda();
    return std::numeric_limits<double>::quiet_NaN();
}

CrossSectionProfile sine_profile(int nx, double amplitude, double lambda) {
    auto p = CrossSectionProfile::zero(nx, lambda);
    for (int i = 1; i < nx; ++i) p.values[i] = amplitude * std::sin(std::numbers::pi * i / nx);
    return p;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

EnergyValue energy_grad_I(std::span<const double> v, const Nonlinearity& nl,
                          std::span<double> grad) {
    const int nx = static_cast<int>(v.size()) - 1;
    const double h = 1.0 / nx;
    std::vector<double> mid(nx), Fm(nx), fm(nx);
    for (int i = 0; i < nx; ++i) mid[i] = 0.5 * (v[i] + v[i + 1]);
    nl.F_batch(mid, Fm);
    nl.f_batch(mid, fm);

    double e = 0.0;
    double mag = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double d = (v[i + 1] - v[i]) / h;
        const double kin = 0.5 * d * d;
        e += h * (kin - Fm[i]);
        mag += h * (kin + std::abs(Fm[i]));
    }
    grad[0] = 0.0;
    grad[nx] = 0.0;
    for (int i = 1; i < nx; ++i) {
        grad[i] = (2.0 * v[i] - v[i - 1] - v[i + 1]) / h - 0.5 * h * (fm[i - 1] + fm[i]);
    }
    return {e, 8.0 * nx * kUlp * mag};
}

double energy_I(const CrossSectionProfile& profile, const Nonlinearity& nl) {
    check_profile(profile);
    std::vector<double> g(profile.values.size());
    return energy_grad_I(profile.values, nl, g).energy;
}

std::vector<double> grad_I(const CrossSectionProfile& profile, const Nonlinearity& nl) {
    check_profile(profile);
    std::vector<double> g(profile.values.size());
    energy_grad_I(profile.values, nl, g);
    return g;
}

std::vector<CrossSectionProfile> default_starts(int nx, double lambda) {
    std::vector<CrossSectionProfile> starts;
    for (double a : {0.5, 1.0, 1.5, 2.0, 3.0}) starts.push_back(sine_profile(nx, a, lambda));
    if (lambda > 0.0) {
        const double top = 1.0 / std::sqrt(lambda);
        for (double c : {0.5, 0.75, 0.9, 1.0}) starts.push_back(sine_profile(nx, c * top, lambda));
    }
    return starts;
}

MinimizeResult minimize_I(const Nonlinearity& nl, int nx,
                          const std::vector<CrossSectionProfile>& starts,
                          const MinimizeOptions& options) {
    if (nx < 2) throw std::invalid_argument("minimize_I needs nx >= 2");
    const double lambda = lambda_of(nl);

    std::vector<CrossSectionProfile> all;
    all.push_back(CrossSectionProfile::zero(nx, lambda));
    for (const auto& s : starts) {
        check_profile(s);
        if (s.nx != nx) throw std::invalid_argument("start profile resolution mismatch");
        all.push_back(s);
    }

    DescentOptions dopt;
    dopt.grad_tol = options.grad_tol_per_interval * nx;
    dopt.max_iter = options.max_iter;
    const EnergyGradient eval = [&nl](std::span<const double> x, std::span<double> g) {
        return energy_grad_I(x, nl, g);
    };

    MinimizeResult out;
    bool have_best = false;
    for (const auto& start : all) {
        DescentResult r = projected_bb_descent(eval, start.values, std::nullopt, std::nullopt, dopt);
        if (!r.converged) {
            throw NonConvergenceError("minimize_I: descent did not converge", std::move(r.x),
                                      r.grad_norm, r.iterations);
        }
        CrossSectionProfile p(nx, std::move(r.x), lambda);
        p.action = r.energy;
        if (!have_best || p.action < out.best.action) {
            out.best = p;
            have_best = true;
        }
        out.minima.push_back(std::move(p));
    }
    out.m = out.best.action;
    return out;
}

CrossSectionProfile newton_polish_I(const Nonlinearity& nl, CrossSectionProfile profile,
                                    int max_iter) {
    check_profile(profile);
    const int nx = profile.nx;
    const int n = nx - 1;
    if (n < 1) return profile;
    const double h = profile.h();
    std::vector<double>& v = profile.values;
    std::vector<double> g(v.size()), diag(n), lower(n), upper(n), rhs(n);
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        energy_grad_I(v, nl, g);
        std::fill(diag.begin(), diag.end(), 0.0);
        std::fill(lower.begin(), lower.end(), 0.0);
        std::fill(upper.begin(), upper.end(), 0.0);
        for (int i = 0; i < nx; ++i) {
            const double c = 0.25 * h * nl.fprime(0.5 * (v[i] + v[i + 1]));
            const double k = 1.0 / h;
            // interval couples unknowns i-1 and i (nodes i and i+1)
            if (i >= 1) diag[i - 1] += k - c;
            if (i + 1 <= n) diag[i] += k - c;
            if (i >= 1 && i + 1 <= n) {
                upper[i - 1] = -k - c;
                lower[i] = -k - c;
            }
        }
        for (int k = 0; k < n; ++k) rhs[k] = -g[k + 1];
        // Thomas elimination (no pivoting; the Hessian is positive definite at
        // a strict local minimiser).
        for (int k = 1; k < n; ++k) {
            const double w = lower[k] / diag[k - 1];
            diag[k] -= w * upper[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        rhs[n - 1] /= diag[n - 1];
        for (int k = n - 2; k >= 0; --k) rhs[k] = (rhs[k] - upper[k] * rhs[k + 1]) / diag[k];
        double step = 0.0;
        for (int k = 0; k < n; ++k) {
            if (!std::isfinite(rhs[k])) return profile;
            step = std::max(step, std::abs(rhs[k]));
        }
        // Stop once updates stop shrinking; the last ones are rounding.
        if (!(step < 0.5 * best) && it > 0) break;
        best = step;
        for (int k = 0; k < n; ++k) v[k + 1] += rhs[k];
        if (step <= 4.0 * kUlp * std::max(1.0, profile.max_abs())) break;
    }
    profile.action = energy_grad_I(v, nl, g).energy;
    return profile;
}

// ---------------------------------------------------------------------------

namespace {

struct Classification {
    double m = 0.0;
    std::optional<CrossSectionProfile> nonzero;  // lowest-energy nonzero local minimum
};

Classification classify(double lambda, int nx, const LambdaStarOptions& options,
                        const std::optional<CrossSectionProfile>& warm, bool warm_only) {
    QuinticNonlinearity nl({lambda});
    std::vector<CrossSectionProfile> starts;
    if (!(warm_only && warm)) starts = default_starts(nx, lambda);
    if (warm) {
        CrossSectionProfile w = *warm;
        w.lambda = lambda;
        starts.insert(starts.begin(), std::move(w));
    }
    MinimizeResult r = minimize_I(nl, nx, starts, options.minimize);
    Classification c;
    c.m = r.m;
    for (auto& p : r.minima) {
        if (p.max_abs() < options.minimize.collapse_threshold) continue;
        if (!c.nonzero || p.action < c.nonzero->action) c.nonzero = p;
    }
    return c;
}

// I'(lambda) at fixed profile: d/dlambda of -F = t^6/6, midpoint quadrature.
double action_lambda_slope(const CrossSectionProfile& p) {
    double s = 0.0;
    for (int i = 0; i < p.nx; ++i) {
        const double m = 0.5 * (p.values[i] + p.values[i + 1]);
        s += p.h() * std::pow(m, 6) / 6.0;
    }
    return s;
}

}  // namespace

LambdaStarResult lambda_star_bisection(int nx, double tol, const LambdaStarOptions& options) {
    if (!(tol > 0.0)) throw std::invalid_argument("lambda_star_bisection needs tol > 0");
    LambdaStarResult res;
    std::optional<CrossSectionProfile> warm;

    bool refining = false;
    auto in_set = [&](double lambda) {
        Classification c =
            classify(lambda, nx, options, warm, refining && options.warm_only_refinement);
        res.m_trace.emplace_back(lambda, c.m);
        const bool inside = c.nonzero && c.nonzero->action < 0.0;
        if (c.nonzero) warm = c.nonzero;
        return inside;
    };

    double lo = 0.0;
    double hi = 0.0;
    double lambda = 1.0;
    if (in_set(lambda)) {
        lo = lambda;
        for (;;) {
            lambda *= 2.0;
            if (lambda > 1e4) {
                throw BracketError("family degenerate at this resolution", lo, lambda);
            }
            if (!in_set(lambda)) break;
            lo = lambda;
        }
        hi = lambda;
    } else {
        hi = lambda;
        for (;;) {
            lambda *= 0.5;
            if (lambda < 1e-4) {
                throw BracketError("family degenerate at this resolution", lambda, hi);
            }
            if (in_set(lambda)) break;
            hi = lambda;
        }
        lo = lambda;
    }

    std::optional<CrossSectionProfile> lo_profile = warm;
    refining = true;
    while (hi - lo > tol) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (in_set(mid)) {
            lo = mid;
            lo_profile = warm;
        } else {
            hi = mid;
        }
    }

    res.bracket_lo = lo;
    res.bracket_hi = hi;
    res.lambda_star = lo + 0.5 * (hi - lo);

    // Energy of the branch can move by slope * width across the bracket.
    double zero_tol = options.eps_zero;
    if (lo_profile) zero_tol = std::max(zero_tol, 2.0 * (hi - lo) * action_lambda_slope(*lo_profile));
    std::vector<CrossSectionProfile> extra;
    if (warm) extra.push_back(*warm);

    QuinticNonlinearity nl({res.lambda_star});
    MinimalMinimizerResult mm = minimal_minimizer(nl, nx, options, zero_tol, extra);
    res.phi = std::move(mm.phi);
    res.candidates = std::move(mm.candidates);
    res.candidates_ordered = mm.ordered;
    res.zero_tol = zero_tol;
    return res;
}

MinimalMinimizerResult minimal_minimizer(const Nonlinearity& nl, int nx,
                                         const LambdaStarOptions& options, double zero_tol,
                                         const std::vector<CrossSectionProfile>& extra_starts) {
    if (zero_tol < 0.0) zero_tol = options.eps_zero;
    const double lambda = lambda_of(nl);

    std::vector<CrossSectionProfile> starts = extra_starts;
    const auto defaults = default_starts(nx, std::isnan(lambda) ? 0.0 : lambda);
    starts.insert(starts.end(), defaults.begin(), defaults.end());
    try {
        for (auto& p : bvp_candidates_by_shooting(nl, options.shooting_steps_per_interval * nx, nx)) {
            starts.push_back(std::move(p));
        }
    } catch (const SolverError&) {
        // shooting contributes nothing; descent starts remain
    }

    MinimizeResult r = minimize_I(nl, nx, starts, options.minimize);

    MinimalMinimizerResult out;
    out.zero_tol = zero_tol;
    for (auto& p : r.minima) {
        if (p.max_abs() < options.minimize.collapse_threshold) continue;
        if (!p.positive_interior()) continue;
        if (std::abs(p.action) > zero_tol) continue;
        const bool duplicate = std::any_of(out.candidates.begin(), out.candidates.end(),
                                           [&](const CrossSectionProfile& q) {
                                               return max_diff(q.values, p.values) < 1e-9;
                                           });
        if (!duplicate) out.candidates.push_back(std::move(p));
    }
    if (out.candidates.empty()) throw SolverError("H2 violated at this lambda");

    std::size_t best = 0;
    for (std::size_t k = 1; k < out.candidates.size(); ++k) {
        if (out.candidates[k].max_abs() < out.candidates[best].max_abs()) best = k;
    }
    out.phi = out.candidates[best];
    CrossSectionProfile polished = newton_polish_I(nl, out.phi);
    if (polished.positive_interior() && max_diff(polished.values, out.phi.values) < 1e-6) {
        out.phi = std::move(polished);
    }
    for (const auto& c : out.candidates) {
        for (int i = 0; i <= nx; ++i) {
            if (c.values[i] < out.phi.values[i] - 1e-6) out.ordered = false;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Shooting
// ---------------------------------------------------------------------------

ShootResult shoot(const Nonlinearity& nl, double slope, int steps) {
    if (steps < 16) throw std::invalid_argument("shoot needs steps >= 16");
    const double h = 1.0 / steps;
    ShootResult res;
    res.trajectory = CrossSectionProfile::zero(steps, lambda_of(nl));
    double y = 0.0;
    double p = slope;
    for (int k = 0; k < steps; ++k) {
        const double k1y = p;
        const double k1p = -nl.f(y);
        const double k2y = p + 0.5 * h * k1p;
        const double k2p = -nl.f(y + 0.5 * h * k1y);
        const double k3y = p + 0.5 * h * k2p;
        const double k3p = -nl.f(y + 0.5 * h * k2y);
        const double k4y = p + h * k3p;
        const double k4p = -nl.f(y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
        if (!(std::abs(y) <= 10.0)) throw BlowUpError("blow-up");
        res.trajectory.values[k + 1] = y;
    }
    res.endpoint = y;
    res.trajectory.values[steps] = 0.0;  // profile carries the Dirichlet value
    return res;
}

namespace {

CrossSectionProfile resample(const CrossSectionProfile& traj, int nx) {
    const int stride = traj.nx / nx;
    auto p = CrossSectionProfile::zero(nx, traj.lambda);
    for (int i = 1; i < nx; ++i) p.values[i] = traj.values[i * stride];
    return p;
}

std::optional<double> try_endpoint(const Nonlinearity& nl, double slope, int steps) {
    try {
        return shoot(nl, slope, steps).endpoint;
    } catch (const BlowUpError&) {
        return std::nullopt;
    }
}

}  // namespace

std::vector<CrossSectionProfile> bvp_candidates_by_shooting(const Nonlinearity& nl, int steps,
                                                            int nx) {
    if (nx < 2 || steps % nx != 0) {
        throw std::invalid_argument("shooting steps must be a multiple of nx");
    }

    // Geometric scan up to the first blow-up, then points accumulating at the
    // blow-up slope where the orbit approaches a separatrix.
    std::vector<std::pair<double, double>> scan;
    constexpr int kScan = 400;
    double blow = std::numeric_limits<double>::infinity();
    for (int k = 0; k <= kScan; ++k) {
        const double s = 1e-4 * std::pow(1e6, static_cast<double>(k) / kScan);
        const auto e = try_endpoint(nl, s, steps);
        if (!e) {
            blow = s;
            break;
        }
        scan.emplace_back(s, *e);
    }
    if (std::isfinite(blow) && !scan.empty()) {
        const double a = scan.back().first;
        for (int k = 1; k <= 48; ++k) {
            const double s = a + (blow - a) * (1.0 - std::ldexp(1.0, -k));
            const auto e = try_endpoint(nl, s, steps);
            if (!e) break;
            scan.emplace_back(s, *e);
        }
    }

    std::vector<CrossSectionProfile> out;
    for (std::size_t k = 0; k + 1 < scan.size(); ++k) {
        auto [sa, ea] = scan[k];
        auto [sb, eb] = scan[k + 1];
        if (!(ea * eb < 0.0)) continue;
        double s = sa;
        double e = ea;
        for (int it = 0; it < 200 && std::abs(e) > 1e-10; ++it) {
            const double mid = sa + 0.5 * (sb - sa);
            if (mid <= sa || mid >= sb) break;
            const auto em = try_endpoint(nl, mid, steps);
            if (!em) break;
            if ((*em < 0.0) == (ea < 0.0)) {
                sa = mid;
                ea = *em;
            } else {
                sb = mid;
                eb = *em;
            }
            s = std::abs(ea) < std::abs(eb) ? sa : sb;
            e = std::abs(ea) < std::abs(eb) ? ea : eb;
        }
        ShootResult sr = shoot(nl, s, steps);
        CrossSectionProfile p = resample(sr.trajectory, nx);
        if (!p.positive_interior()) continue;
        p.action = energy_I(p, nl);
        out.push_back(std::move(p));
    }
    return out;
}

CrossSectionProfile bvp_by_shooting(const Nonlinearity& nl, int steps, int nx) {
    auto cands = bvp_candidates_by_shooting(nl, steps, nx);
    if (cands.empty()) throw SolverError("no positive solution detected");
    return *std::min_element(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
        return a.action < b.action;
    });
}

// ---------------------------------------------------------------------------
// Time map
// ---------------------------------------------------------------------------

namespace {

// (F(M) - F(M sin psi)) / cos^2 psi for F = t^4/4 - lambda t^6/6, free of cancellation.
double reduced_gap(double lambda, double M, double psi) {
    const double s2 = std::sin(psi) * std::sin(psi);
    const double M2 = M * M;
    return M2 * M2 * ((1.0 + s2) / 4.0 - lambda * M2 * (1.0 + s2 + s2 * s2) / 6.0);
}

template <class Fn>
double integrate_quarter(Fn&& fn) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double val = gauss_kronrod<double, 31>::integrate(fn, 0.0, std::numbers::pi / 2, 12,
                                                            1e-13, &err);
    if (!(std::isfinite(val) && err <= 1e-10 * std::max(1.0, std::abs(val)))) {
        throw SolverError("time map quadrature did not converge");
    }
    return val;
}

}  // namespace

double timemap_half_width(double lambda, double M) {
    return integrate_quarter([&](double psi) {
        return M / std::sqrt(2.0 * reduced_gap(lambda, M, psi));
    });
}

double timemap_action(double lambda, double M) {
    const double E = eval_F({lambda}, M);
    const double flux = integrate_quarter([&](double psi) {
        const double c = std::cos(psi);
        return M * c * c * std::sqrt(2.0 * reduced_gap(lambda, M, psi));
    });
    return 2.0 * flux - E;
}

std::optional<TimeMapPoint> timemap_solve(double lambda) {
    if (!(lambda > 0.0)) return std::nullopt;
    const double top = 1.0 / std::sqrt(lambda);
    auto T = [&](double M) { return timemap_half_width(lambda, M); };

    // T is unimodal on (0, top): golden-section for its minimiser.
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 1e-3 * top;
    double b = top * (1.0 - 1e-4);
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double Tc = T(c);
    double Td = T(d);
    for (int it = 0; it < 200 && b - a > 1e-7 * top; ++it) {
        if (Tc < Td) {
            b = d;
            d = c;
            Td = Tc;
            c = b - g * (b - a);
            Tc = T(c);
        } else {
            a = c;
            c = d;
            Tc = Td;
            d = a + g * (b - a);
            Td = T(d);
        }
    }
    const double Mmin = 0.5 * (a + b);
    if (T(Mmin) > 0.5) return std::nullopt;

    double hi = 0.0;
    for (double delta = 1e-3; delta > 1e-15; delta *= 1e-3) {
        const double cand = top * (1.0 - delta);
        if (cand <= Mmin) continue;
        bool above = true;
        try {
            above = T(cand) > 0.5;
        } catch (const SolverError&) {
            // unresolved next to the separatrix, where T is large anyway
        }
        if (above) {
            hi = cand;
            break;
        }
    }
    if (hi == 0.0) return std::nullopt;
    double lo = Mmin;
    for (int it = 0; it < 200; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        if (T(mid) < 0.5) lo = mid; else hi = mid;
    }
    TimeMapPoint pt;
    pt.lambda = lambda;
    pt.M = lo + 0.5 * (hi - lo);
    pt.width_residual = T(pt.M) - 0.5;
    pt.action_residual = timemap_action(lambda, pt.M);
    return pt;
}

double timemap_action_residual(double lambda) {
    const auto pt = timemap_solve(lambda);
    return pt ? pt->action_residual : std::numeric_limits<double>::infinity();
}

TimeMapPoint lambda_star_timemap_point(double tol) {
    if (!(tol > 0.0)) throw std::invalid_argument("lambda_star_timemap needs tol > 0");
    // Action residual increases with lambda; no upper-branch orbit counts as positive.
    double hi = 1.0;
    double lo = hi;
    while (!(timemap_action_residual(lo) < 0.0)) {
        hi = lo;
        lo *= 0.5;
        if (lo < 1e-8) throw BracketError("time map: no lambda with negative action", lo, hi);
    }
    std::optional<TimeMapPoint> best = timemap_solve(lo);
    for (int it = 0; it < 300; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        const auto pt = timemap_solve(mid);
        if (pt && (!best || std::abs(pt->action_residual) < std::abs(best->action_residual))) {
            best = pt;
        }
        if (pt && pt->action_residual < 0.0) lo = mid; else hi = mid;
        if (best && std::abs(best->action_residual) <= 0.25 * tol &&
            std::abs(best->width_residual) <= tol) {
            break;
        }
    }
    if (!best || std::abs(best->action_residual) > tol || std::abs(best->width_residual) > tol) {
        throw BracketError("time map residuals above tolerance", lo, hi);
    }
    return *best;
}

double lambda_star_timemap(double tol) { return lambda_star_timemap_point(tol).lambda; }

}  // namespace heterocyl
