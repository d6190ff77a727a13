#include "heterocyl/euler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace heterocyl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kUlp = std::numeric_limits<double>::epsilon();
constexpr double kSnap = 1e-9;

// Cell index and fraction for coordinate s on a grid of n intervals; exact
// nodes (within kSnap) come back with t == 0.
void locate(double s, int n, int& k, double& t) {
    const double r = std::round(s);
    if (std::abs(s - r) < kSnap) {
        k = static_cast<int>(r);
        t = 0.0;
        if (k == n) {
            k = n - 1;
            t = 1.0;
        }
        return;
    }
    k = std::clamp(static_cast<int>(std::floor(s)), 0, n - 1);
    t = s - k;
}

double phi_at(const CrossSectionProfile& phi, double x) {
    int i;
    double t;
    locate(x * phi.nx, phi.nx, i, t);
    if (t == 0.0) return phi.values[i];
    if (t == 1.0) return phi.values[i + 1];
    return (1.0 - t) * phi.values[i] + t * phi.values[i + 1];
}

double eval_strip(const ExtendedSolution& sol, double x, double z) {
    const CylinderField& f = sol.base;
    if (z <= -f.half_length) return 0.0;
    if (z >= f.half_length) return phi_at(sol.phi, x);
    int i, j;
    double tx, tz;
    locate(x / f.hx, f.nx, i, tx);
    locate((z + f.half_length) / f.hz, f.nz, j, tz);
    const double a = f.at(i, j);
    if (tx == 0.0 && tz == 0.0) return a;
    return (1 - tx) * (1 - tz) * a + tx * (1 - tz) * f.at(i + 1, j) +
           (1 - tx) * tz * f.at(i, j + 1) + tx * tz * f.at(i + 1, j + 1);
}

double eval_half_plane(const ExtendedSolution& sol, double x1, double x2) {
    const double y = x1 - 2.0 * std::floor(x1 / 2.0);
    if (y <= 1.0) return eval_strip(sol, y, x2);
    return -eval_strip(sol, 2.0 - y, x2);
}

// Derivative along the first (dir == 0) or second index, central in the
// interior and second-order one-sided at the edges.
double diff(const std::vector<double>& v, const GridFunction& g, int a, int b, int dir) {
    const int n = dir == 0 ? g.n1 : g.n2;
    const double h = dir == 0 ? g.h1 : g.h2;
    const int k = dir == 0 ? a : b;
    auto val = [&](int kk) { return dir == 0 ? v[g.index(kk, b)] : v[g.index(a, kk)]; };
    if (k > 0 && k < n) return (val(k + 1) - val(k - 1)) / (2.0 * h);
    // Difference form of the one-sided stencil: exact zero on constants.
    if (k == 0) return (4.0 * (val(1) - val(0)) - (val(2) - val(0))) / (2.0 * h);
    return (4.0 * (val(n) - val(n - 1)) - (val(n) - val(n - 2))) / (2.0 * h);
}

double wrap(double d) {
    while (d > kPi) d -= 2.0 * kPi;
    while (d <= -kPi) d += 2.0 * kPi;
    return d;
}

void check_grid(const GridFunction& g) {
    if (g.n1 < 2 || g.n2 < 2) throw std::invalid_argument("grid function needs at least 3x3 nodes");
}

struct Gradient {
    std::vector<double> d1, d2;
};

Gradient gradient(const GridFunction& g) {
    Gradient gr{std::vector<double>(g.values.size()), std::vector<double>(g.values.size())};
    for (int a = 0; a <= g.n1; ++a) {
        for (int b = 0; b <= g.n2; ++b) {
            gr.d1[g.index(a, b)] = diff(g.values, g, a, b, 0);
            gr.d2[g.index(a, b)] = diff(g.values, g, a, b, 1);
        }
    }
    return gr;
}

}  // namespace

std::string to_string(DomainKind kind) {
    switch (kind) {
        case DomainKind::strip: return "strip";
        case DomainKind::half_plane: return "half_plane";
        default: return "plane";
    }
}

DomainKind parse_domain_kind(const std::string& name) {
    if (name == "strip") return DomainKind::strip;
    if (name == "half_plane" || name == "half-plane") return DomainKind::half_plane;
    if (name == "plane") return DomainKind::plane;
    throw std::invalid_argument("unknown domain kind: " + name);
}

double eval_extended(const ExtendedSolution& sol, double x1, double x2) {
    switch (sol.kind) {
        case DomainKind::strip:
            if (x1 < -kSnap || x1 > 1.0 + kSnap) {
                throw std::invalid_argument("eval_extended: strip needs 0 <= x1 <= 1");
            }
            return eval_strip(sol, std::clamp(x1, 0.0, 1.0), x2);
        case DomainKind::half_plane:
            if (x1 < -kSnap) throw std::invalid_argument("eval_extended: half-plane needs x1 >= 0");
            return eval_half_plane(sol, std::max(x1, 0.0), x2);
        default:
            if (x1 >= 0.0) return eval_half_plane(sol, x1, x2);
            return -eval_half_plane(sol, -x1, x2);
    }
}

GridFunction as_grid_function(const CylinderField& field) {
    GridFunction g;
    g.n1 = field.nx;
    g.n2 = field.nz;
    g.x_lo = 0.0;
    g.z_lo = -field.half_length;
    g.h1 = field.hx;
    g.h2 = field.hz;
    g.values = field.values;
    return g;
}

GridFunction sample_extended(const ExtendedSolution& sol, const Window& w, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("sample_extended: h must be positive");
    if (!(w.x_hi > w.x_lo) || !(w.z_hi > w.z_lo)) {
        throw std::invalid_argument("sample_extended: empty window");
    }
    GridFunction g;
    g.n1 = static_cast<int>(std::floor((w.x_hi - w.x_lo) / h + kSnap));
    g.n2 = static_cast<int>(std::floor((w.z_hi - w.z_lo) / h + kSnap));
    check_grid(g);
    g.x_lo = w.x_lo;
    g.z_lo = w.z_lo;
    g.h1 = h;
    g.h2 = h;
    g.values.resize(static_cast<std::size_t>(g.n1 + 1) * static_cast<std::size_t>(g.n2 + 1));
    for (int a = 0; a <= g.n1; ++a) {
        for (int b = 0; b <= g.n2; ++b) g.values[g.index(a, b)] = eval_extended(sol, g.x(a), g.z(b));
    }
    return g;
}

double pde_residual_extended(const ExtendedSolution& sol, const Nonlinearity& nl,
                             const Window& window, double h) {
    const GridFunction g = sample_extended(sol, window, h);
    double res = 0.0;
    for (int a = 1; a < g.n1; ++a) {
        for (int b = 1; b < g.n2; ++b) {
            const double u = g.at(a, b);
            const double lap = (g.at(a + 1, b) - 2.0 * u + g.at(a - 1, b)) / (h * h) +
                               (g.at(a, b + 1) - 2.0 * u + g.at(a, b - 1)) / (h * h);
            res = std::max(res, std::abs(-lap - nl.f(u)));
        }
    }
    return res;
}

EulerFlow euler_fields(const GridFunction& grid, const Nonlinearity& nl) {
    check_grid(grid);
    EulerFlow flow;
    flow.grid = grid;
    const Gradient gr = gradient(grid);
    const std::size_t n = grid.values.size();
    flow.u1.resize(n);
    flow.u2.resize(n);
    flow.p.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        flow.u1[k] = -gr.d2[k];
        flow.u2[k] = gr.d1[k];
        flow.p[k] = -0.5 * (gr.d1[k] * gr.d1[k] + gr.d2[k] * gr.d2[k]) - nl.F(grid.values[k]);
    }
    return flow;
}

EulerFlow euler_fields(const CylinderField& field, const Nonlinearity& nl) {
    return euler_fields(as_grid_function(field), nl);
}

std::vector<double> divergence(const EulerFlow& flow) {
    const GridFunction& g = flow.grid;
    std::vector<double> out(g.values.size());
    for (int a = 0; a <= g.n1; ++a) {
        for (int b = 0; b <= g.n2; ++b) {
            out[g.index(a, b)] = diff(flow.u1, g, a, b, 0) + diff(flow.u2, g, a, b, 1);
        }
    }
    return out;
}

EulerResidual euler_residual(const std::vector<EulerFlow>& flows, const Window* window) {
    EulerResidual out;
    for (const EulerFlow& fl : flows) {
        const GridFunction& g = fl.grid;
        double mom = 0.0;
        double dv = 0.0;
        for (int a = 2; a <= g.n1 - 2; ++a) {
            for (int b = 2; b <= g.n2 - 2; ++b) {
                if (window) {
                    const double x = g.x(a);
                    const double z = g.z(b);
                    if (x < window->x_lo - kSnap || x > window->x_hi + kSnap ||
                        z < window->z_lo - kSnap || z > window->z_hi + kSnap) {
                        continue;
                    }
                }
                const std::size_t k = g.index(a, b);
                const double u1x = diff(fl.u1, g, a, b, 0);
                const double u1z = diff(fl.u1, g, a, b, 1);
                const double u2x = diff(fl.u2, g, a, b, 0);
                const double u2z = diff(fl.u2, g, a, b, 1);
                const double px = diff(fl.p, g, a, b, 0);
                const double pz = diff(fl.p, g, a, b, 1);
                const double m1 = fl.u1[k] * u1x + fl.u2[k] * u1z + px;
                const double m2 = fl.u1[k] * u2x + fl.u2[k] * u2z + pz;
                mom = std::max({mom, std::abs(m1), std::abs(m2)});
                dv = std::max(dv, std::abs(u1x + u2z));
            }
        }
        out.momentum.push_back(mom);
        out.divergence.push_back(dv);
        out.div_res = std::max(out.div_res, dv);
    }
    if (!out.momentum.empty()) out.momentum_res = out.momentum.back();
    for (std::size_t k = 1; k < out.momentum.size(); ++k) {
        out.orders.push_back(std::log2(out.momentum[k - 1] / out.momentum[k]));
    }
    out.order_available = !out.orders.empty();
    out.order = out.order_available ? out.orders.back() : std::numeric_limits<double>::quiet_NaN();
    return out;
}

namespace {

ThetaField theta_core(const GridFunction& full, int a0, int a1, int b0, int b1) {
    check_grid(full);
    const Gradient gr = gradient(full);
    const std::size_t n = full.values.size();
    std::vector<double> rho(n), theta(n);
    for (std::size_t k = 0; k < n; ++k) {
        rho[k] = std::hypot(gr.d1[k], gr.d2[k]);
        theta[k] = std::atan2(gr.d2[k], gr.d1[k]);
    }
    for (int a = 0; a <= full.n1; ++a) {
        for (int b = 1; b <= full.n2; ++b) {
            const std::size_t k = full.index(a, b);
            theta[k] = theta[k - 1] + wrap(theta[k] - theta[k - 1]);
        }
    }

    ThetaField tf;
    GridFunction& g = tf.grid;
    g.n1 = a1 - a0;
    g.n2 = b1 - b0;
    g.x_lo = full.x(a0);
    g.z_lo = full.z(b0);
    g.h1 = full.h1;
    g.h2 = full.h2;
    for (int a = a0; a <= a1; ++a) {
        for (int b = b0; b <= b1; ++b) {
            const std::size_t k = full.index(a, b);
            g.values.push_back(full.values[k]);
            tf.rho.push_back(rho[k]);
            tf.theta.push_back(theta[k]);
        }
    }

    ThetaSummary& s = tf.summary;
    double umax = 0.0;
    for (double v : full.values) umax = std::max(umax, std::abs(v));
    s.rho_floor = 4.0 * kUlp * umax / std::min(full.h1, full.h2);
    s.min_rho = std::numeric_limits<double>::infinity();
    s.theta_min = std::numeric_limits<double>::infinity();
    s.theta_max = -std::numeric_limits<double>::infinity();
    for (int a = a0; a <= a1; ++a) {
        for (int b = b0; b <= b1; ++b) {
            const std::size_t k = full.index(a, b);
            if (rho[k] < s.min_rho) {
                s.min_rho = rho[k];
                s.min_rho_x = full.x(a);
                s.min_rho_z = full.z(b);
            }
            if (rho[k] <= s.rho_floor) ++s.unresolved_rho;
            if (rho[k] == 0.0) {
                if (s.critical_points == 0) {
                    s.critical_x = full.x(a);
                    s.critical_z = full.z(b);
                }
                ++s.critical_points;
            }
            const bool interior = a > 0 && a < full.n1 && b > 0 && b < full.n2;
            if (interior) {
                s.theta_min = std::min(s.theta_min, theta[k]);
                s.theta_max = std::max(s.theta_max, theta[k]);
                if (b < b1) s.max_column_jump =
                    std::max(s.max_column_jump, std::abs(theta[k + 1] - theta[k]));
            }
        }
    }
    const bool left_wall = std::abs(full.x(a0)) < kSnap;
    const bool right_wall = std::abs(full.x(a1) - 1.0) < kSnap;
    s.left_trace_err = left_wall ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    s.right_trace_err = right_wall ? 0.0 : std::numeric_limits<double>::quiet_NaN();
    for (int b = b0; b <= b1; ++b) {
        if (left_wall) s.left_trace_err = std::max(s.left_trace_err, std::abs(theta[full.index(a0, b)]));
        if (right_wall) {
            s.right_trace_err =
                std::max(s.right_trace_err, std::abs(theta[full.index(a1, b)] - kPi));
        }
    }

    // div(rho^2 grad theta) with rho^2 grad theta = g1 grad g2 - g2 grad g1, which
    // stays smooth where theta turns over a fraction of a cell.
    std::vector<double> q1(n), q2(n);
    for (int a = 1; a < full.n1; ++a) {
        for (int b = 1; b < full.n2; ++b) {
            const std::size_t k = full.index(a, b);
            const std::size_t kl = full.index(a - 1, b);
            const std::size_t kr = full.index(a + 1, b);
            const double d1g1 = (gr.d1[kr] - gr.d1[kl]) / (2.0 * full.h1);
            const double d1g2 = (gr.d2[kr] - gr.d2[kl]) / (2.0 * full.h1);
            const double d2g1 = (gr.d1[k + 1] - gr.d1[k - 1]) / (2.0 * full.h2);
            const double d2g2 = (gr.d2[k + 1] - gr.d2[k - 1]) / (2.0 * full.h2);
            q1[k] = gr.d1[k] * d1g2 - gr.d2[k] * d1g1;
            q2[k] = gr.d1[k] * d2g2 - gr.d2[k] * d2g1;
        }
    }
    for (int a = std::max(a0, 2); a <= std::min(a1, full.n1 - 2); ++a) {
        for (int b = std::max(b0, 2); b <= std::min(b1, full.n2 - 2); ++b) {
            const double d = (q1[full.index(a + 1, b)] - q1[full.index(a - 1, b)]) / (2.0 * full.h1) +
                             (q2[full.index(a, b + 1)] - q2[full.index(a, b - 1)]) / (2.0 * full.h2);
            s.bcn_residual = std::max(s.bcn_residual, std::abs(d));
        }
    }
    return tf;
}

void window_range(const CylinderField& field, const Window& w, int& a0, int& a1, int& b0,
                  int& b1) {
    if (w.x_lo < -kSnap || w.x_hi > 1.0 + kSnap || w.z_lo < -field.half_length - kSnap ||
        w.z_hi > field.half_length + kSnap || !(w.x_hi > w.x_lo) || !(w.z_hi > w.z_lo)) {
        throw std::invalid_argument("window outside the stored field");
    }
    a0 = static_cast<int>(std::ceil(w.x_lo / field.hx - kSnap));
    a1 = static_cast<int>(std::floor(w.x_hi / field.hx + kSnap));
    b0 = static_cast<int>(std::ceil((w.z_lo + field.half_length) / field.hz - kSnap));
    b1 = static_cast<int>(std::floor((w.z_hi + field.half_length) / field.hz + kSnap));
    if (a1 - a0 < 2 || b1 - b0 < 2) throw std::invalid_argument("window holds fewer than 3x3 nodes");
}

}  // namespace

ThetaField theta_analysis(const GridFunction& grid) {
    return theta_core(grid, 0, grid.n1, 0, grid.n2);
}

ThetaField theta_analysis(const CylinderField& field, const Window& window) {
    int a0, a1, b0, b1;
    window_range(field, window, a0, a1, b0, b1);
    return theta_core(as_grid_function(field), a0, a1, b0, b1);
}

GridFunction restrict_to_window(const CylinderField& field, const Window& window) {
    int a0, a1, b0, b1;
    window_range(field, window, a0, a1, b0, b1);
    GridFunction g;
    g.n1 = a1 - a0;
    g.n2 = b1 - b0;
    g.x_lo = field.x(a0);
    g.z_lo = field.z(b0);
    g.h1 = field.hx;
    g.h2 = field.hz;
    for (int a = a0; a <= a1; ++a) {
        for (int b = b0; b <= b1; ++b) g.values.push_back(field.at(a, b));
    }
    return g;
}

double shear_deviation(const EulerFlow& flow, double angle) {
    constexpr int kBins = 64;
    const GridFunction& g = flow.grid;
    const double c = std::cos(angle);
    const double sn = std::sin(angle);
    const std::size_t n = g.values.size();
    std::vector<double> s(n), par(n), perp(n);
    double smin = std::numeric_limits<double>::infinity();
    double smax = -smin;
    for (int a = 0; a <= g.n1; ++a) {
        for (int b = 0; b <= g.n2; ++b) {
            const std::size_t k = g.index(a, b);
            s[k] = -g.x(a) * sn + g.z(b) * c;
            par[k] = flow.u1[k] * c + flow.u2[k] * sn;
            perp[k] = -flow.u1[k] * sn + flow.u2[k] * c;
            smin = std::min(smin, s[k]);
            smax = std::max(smax, s[k]);
        }
    }
    const double width = (smax - smin) / kBins;
    std::vector<int> bin(n);
    for (std::size_t k = 0; k < n; ++k) {
        bin[k] = width > 0.0 ? std::min(kBins - 1, static_cast<int>((s[k] - smin) / width)) : 0;
    }
    // Least-squares quadratic in t = (s - centre) / width per bin; rank
    // deficient bins (one or two distinct s) get the minimum-norm fit.
    std::vector<Eigen::Matrix3d> normal(kBins, Eigen::Matrix3d::Zero());
    std::vector<Eigen::Vector3d> rhs(kBins, Eigen::Vector3d::Zero());
    auto centre = [&](int q) { return smin + (q + 0.5) * width; };
    auto basis = [&](std::size_t k) {
        const double t = width > 0.0 ? (s[k] - centre(bin[k])) / width : 0.0;
        return Eigen::Vector3d(1.0, t, t * t);
    };
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Vector3d phi = basis(k);
        normal[bin[k]] += phi * phi.transpose();
        rhs[bin[k]] += phi * par[k];
    }
    std::vector<Eigen::Vector3d> coef(kBins, Eigen::Vector3d::Zero());
    for (int q = 0; q < kBins; ++q) {
        if (normal[q](0, 0) > 0.0) coef[q] = normal[q].completeOrthogonalDecomposition().solve(rhs[q]);
    }
    double dev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double fit = coef[bin[k]].dot(basis(k));
        dev = std::max(dev, std::hypot(perp[k], par[k] - fit));
    }
    return dev;
}

ShearFit non_shear_certificate(const EulerFlow& flow) {
    ShearFit best{std::numeric_limits<double>::infinity(), 0.0};
    const double step = kPi / 180.0;
    for (int d = 0; d < 180; ++d) {
        const double dev = shear_deviation(flow, d * step);
        if (dev < best.deviation) best = {dev, d * step};
    }
    // Golden-section refinement within one sweep step on either side.
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = best.angle - step;
    double hi = best.angle + step;
    double x1 = hi - g * (hi - lo);
    double x2 = lo + g * (hi - lo);
    double f1 = shear_deviation(flow, x1);
    double f2 = shear_deviation(flow, x2);
    while (hi - lo > 1e-9) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = shear_deviation(flow, x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = shear_deviation(flow, x2);
        }
    }
    for (auto [x, f] : {std::pair{x1, f1}, std::pair{x2, f2}}) {
        if (f < best.deviation) best = {f, x};
    }
    best.angle = std::fmod(best.angle + kPi, kPi);
    return best;
}

StagnationCheck stagnation_check(const EulerFlow& flow) {
    const GridFunction& g = flow.grid;
    StagnationCheck sc;
    sc.min_speed = std::numeric_limits<double>::infinity();
    for (int a = 0; a <= g.n1; ++a) {
        for (int b = 0; b <= g.n2; ++b) {
            const std::size_t k = g.index(a, b);
            const double sp = std::hypot(flow.u1[k], flow.u2[k]);
            if (sp < sc.min_speed) {
                sc.min_speed = sp;
                sc.min_x = g.x(a);
                sc.min_z = g.z(b);
            }
        }
    }
    auto changes = [&](const std::vector<double>& v, int a, int b) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -lo;
        for (int da = 0; da <= 1; ++da) {
            for (int db = 0; db <= 1; ++db) {
                lo = std::min(lo, v[g.index(a + da, b + db)]);
                hi = std::max(hi, v[g.index(a + da, b + db)]);
            }
        }
        return lo < 0.0 && hi > 0.0;
    };
    for (int a = 0; a < g.n1; ++a) {
        for (int b = 0; b < g.n2; ++b) {
            if (changes(flow.u1, a, b) && changes(flow.u2, a, b)) {
                if (sc.sign_change_cells == 0) {
                    sc.cell_x = g.x(a);
                    sc.cell_z = g.z(b);
                }
                ++sc.sign_change_cells;
            }
        }
    }
    return sc;
}

ThetaGrowth theta_growth_probe(const ExtendedSolution& plane, const std::vector<double>& radii,
                               double band, double h) {
    if (plane.kind != DomainKind::plane) {
        throw std::invalid_argument("theta_growth_probe needs the plane extension");
    }
    ThetaGrowth out;
    for (double R : radii) {
        const GridFunction g = sample_extended(plane, {-R, R, -band, band}, h);
        const Gradient gr = gradient(g);
        const int a0 = static_cast<int>(std::lround(R / h));
        double mx = 0.0;
        for (int b = 0; b <= g.n2; ++b) {
            auto raw = [&](int a) {
                const std::size_t k = g.index(a, b);
                return std::atan2(gr.d2[k], gr.d1[k]);
            };
            double th = raw(a0);
            mx = std::max(mx, std::abs(th));
            double prev_raw = th;
            for (int a = a0 + 1; a <= g.n1; ++a) {
                const double r = raw(a);
                th += wrap(r - prev_raw);
                prev_raw = r;
                mx = std::max(mx, std::abs(th));
            }
            th = raw(a0);
            prev_raw = th;
            for (int a = a0 - 1; a >= 0; --a) {
                const double r = raw(a);
                th += wrap(r - prev_raw);
                prev_raw = r;
                mx = std::max(mx, std::abs(th));
            }
        }
        out.radii.push_back(R);
        out.ratios.push_back(mx / R);
    }
    return out;
}

}  // namespace heterocyl
