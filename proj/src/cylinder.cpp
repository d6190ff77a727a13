#include "heterocyl/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "heterocyl/diagnostics.hpp"
#include "heterocyl/error.hpp"
#include "heterocyl/summation.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace heterocyl {

namespace {

constexpr double kUlp = std::numeric_limits<double>::epsilon();

void check_phi(const CylinderField& field, const CrossSectionProfile& phi) {
    if (phi.nx != field.nx || static_cast<int>(phi.values.size()) != field.nx + 1) {
        throw std::invalid_argument("phi resolution does not match the field x-grid");
    }
}


struct PolishResult {
    int iterations = 0;
    double grad_norm = 0.0;  // max |g| over interior nodes, raw units
    double energy = 0.0;
};

// The near-zero translation mode of a long cylinder makes the Hessian
// nearly singular; a small multiple of the mass matrix keeps it definite.
constexpr double kShift = 1e-2;

// Damped Newton on the interior nodes with the (shifted) sparse Hessian of
// energy_grad_J. Steps are projected into the box and backtracked on the
// energy; it stops when the update falls to rounding level or the Hessian
// is not positive definite.
PolishResult newton_polish(std::vector<double>& v, int nx, int nz, double hx, double hz,
                           const Nonlinearity& nl, std::span<const double> lo,
                           std::span<const double> hi, int max_newton) {
    const std::size_t stride = static_cast<std::size_t>(nz) + 1;
    const int mx = nx - 1;
    const int mz = nz - 1;
    const auto unknown = [&](int i, int j) { return (j - 1) * mx + (i - 1); };
    std::vector<char> free_node;
    const auto interior = [&](int i, int j) {
        return i > 0 && i < nx && j > 0 && j < nz && free_node[i * stride + j];
    };
    const int n_unknowns = mx * mz;

    std::vector<double> g(v.size()), trial(v.size()), gt(v.size());
    EnergyValue ev = energy_grad_J(v, nx, nz, hx, hz, nl, g);
    const auto interior_norm = [&](const std::vector<double>& grad) {
        return projected_gradient_norm(v, grad, lo, hi);
    };
    // Nodes held at a bound by the gradient are frozen for the step.
    free_node.resize(v.size());
    const auto update_free = [&]() {
        for (std::size_t k = 0; k < v.size(); ++k) {
            free_node[k] = !((v[k] <= lo[k] && g[k] > 0.0) || (v[k] >= hi[k] && g[k] < 0.0) ||
                             lo[k] == hi[k]);
        }
    };

    PolishResult out;
    out.energy = ev.energy;
    out.grad_norm = interior_norm(g);

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    double best = out.grad_norm;
    int stagnant = 0;
    for (int it = 0; it < max_newton; ++it) {
        update_free();
        trip.clear();
        const auto add = [&](int i0, int j0, int i1, int j1, double val) {
            if (interior(i0, j0) && interior(i1, j1)) {
                trip.emplace_back(unknown(i0, j0), unknown(i1, j1), val);
            }
        };
        for (int j = 0; j <= nz; ++j) {
            const double wz = (j == 0 || j == nz) ? 0.5 * hz : hz;
            for (int i = 0; i < nx; ++i) {
                const double a = v[i * stride + j];
                const double b = v[(i + 1) * stride + j];
                const double k = wz / hx;
                const double c = 0.25 * wz * hx * nl.fprime(0.5 * (a + b));
                add(i, j, i, j, k - c);
                add(i + 1, j, i + 1, j, k - c);
                add(i, j, i + 1, j, -k - c);
                add(i + 1, j, i, j, -k - c);
            }
        }
        for (int i = 1; i < nx; ++i) {
            for (int j = 1; j < nz; ++j) {
                if (interior(i, j)) add(i, j, i, j, kShift * hx * hz);
                else trip.emplace_back(unknown(i, j), unknown(i, j), 1.0);
            }
        }
        for (int i = 0; i <= nx; ++i) {
            const double wx = (i == 0 || i == nx) ? 0.5 * hx : hx;
            const double k = wx / hz;
            for (int j = 0; j < nz; ++j) {
                add(i, j, i, j, k);
                add(i, j + 1, i, j + 1, k);
                add(i, j, i, j + 1, -k);
                add(i, j + 1, i, j, -k);
            }
        }
        Eigen::SparseMatrix<double> H(n_unknowns, n_unknowns);
        H.setFromTriplets(trip.begin(), trip.end());
        ldlt.compute(H);
        if (ldlt.info() != Eigen::Success || ldlt.vectorD().minCoeff() <= 0.0) break;

        Eigen::VectorXd rhs(n_unknowns);
        for (int i = 1; i < nx; ++i)
            for (int j = 1; j < nz; ++j) rhs[unknown(i, j)] = interior(i, j) ? -g[i * stride + j] : 0.0;
        const Eigen::VectorXd step = ldlt.solve(rhs);
        double slope = 0.0;
        double step_max = 0.0;
        for (int k = 0; k < n_unknowns; ++k) {
            slope -= rhs[k] * step[k];
            step_max = std::max(step_max, std::abs(step[k]));
        }

        double t = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
            trial = v;
            for (int i = 1; i < nx; ++i) {
                for (int j = 1; j < nz; ++j) {
                    const std::size_t idx = i * stride + j;
                    trial[idx] = std::clamp(v[idx] + t * step[unknown(i, j)], lo[idx], hi[idx]);
                }
            }
            const EnergyValue et = energy_grad_J(trial, nx, nz, hx, hz, nl, gt);
            if (et.energy <= ev.energy + 1e-4 * t * slope + std::max(ev.noise, et.noise)) {
                v.swap(trial);
                g.swap(gt);
                ev = et;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        out.iterations = it + 1;
        out.energy = ev.energy;
        out.grad_norm = interior_norm(g);
        if (t * step_max <= 64.0 * kUlp * std::max(1.0, *std::max_element(hi.begin(), hi.end()))) {
            break;
        }
        // Residual at its rounding floor: stop after three steps without halving.
        if (out.grad_norm < 0.5 * best) {
            best = out.grad_norm;
            stagnant = 0;
        } else if (++stagnant >= 3) {
            break;
        }
    }
    return out;
}

}  // namespace

EnergyValue energy_grad_J(std::span<const double> v, int nx, int nz, double hx, double hz,
                          const Nonlinearity& nl, std::span<double> grad) {
    const std::size_t stride = static_cast<std::size_t>(nz) + 1;
    std::fill(grad.begin(), grad.end(), 0.0);
    std::vector<double> mid(stride), Fm(stride), fm(stride);
    std::vector<double> wz(stride, hz);
    wz.front() = wz.back() = 0.5 * hz;

    CompensatedSum energy;
    double mag = 0.0;

    // Row actions: forward x-differences and midpoint F, trapezoid in z.
    for (int i = 0; i < nx; ++i) {
        const double* a = v.data() + i * stride;
        const double* b = a + stride;
        double* ga = grad.data() + i * stride;
        double* gb = ga + stride;
        for (std::size_t j = 0; j < stride; ++j) mid[j] = 0.5 * (a[j] + b[j]);
        nl.F_batch(mid, Fm);
        nl.f_batch(mid, fm);
        double col = 0.0;
        double col_mag = 0.0;
        for (std::size_t j = 0; j < stride; ++j) {
            const double d = (b[j] - a[j]) / hx;
            const double kin = 0.5 * d * d;
            col += wz[j] * hx * (kin - Fm[j]);
            col_mag += wz[j] * hx * (kin + std::abs(Fm[j]));
            const double flux = wz[j] * d;
            const double src = 0.5 * wz[j] * hx * fm[j];
            ga[j] += -flux - src;
            gb[j] += flux - src;
        }
        energy.add(col);
        mag += col_mag;
    }

    // z-differences, trapezoid in x.
    for (int i = 0; i <= nx; ++i) {
        const double wx = (i == 0 || i == nx) ? 0.5 * hx : hx;
        const double* c = v.data() + i * stride;
        double* gc = grad.data() + i * stride;
        double col = 0.0;
        for (int j = 0; j < nz; ++j) {
            const double d = (c[j + 1] - c[j]) / hz;
            col += wx * hz * 0.5 * d * d;
            gc[j] -= wx * d;
            gc[j + 1] += wx * d;
        }
        energy.add(col);
        mag += col;
    }
    return {energy.value(), 16.0 * kUlp * mag * std::sqrt(static_cast<double>(stride))};
}

double energy_J(const CylinderField& field, const Nonlinearity& nl) {
    std::vector<double> g(field.values.size());
    return energy_grad_J(field.values, field.nx, field.nz, field.hx, field.hz, nl, g).energy;
}

std::vector<double> grad_J(const CylinderField& field, const Nonlinearity& nl) {
    std::vector<double> g(field.values.size());
    energy_grad_J(field.values, field.nx, field.nz, field.hx, field.hz, nl, g);
    for (int i = 0; i <= field.nx; ++i) {
        for (int j = 0; j <= field.nz; ++j) {
            if (i == 0 || i == field.nx || j == 0 || j == field.nz) g[field.index(i, j)] = 0.0;
        }
    }
    return g;
}

CylinderField project_box(CylinderField field, const CrossSectionProfile& phi) {
    check_phi(field, phi);
    for (int i = 1; i < field.nx; ++i) {
        for (int j = 1; j < field.nz; ++j) {
            double& u = field.at(i, j);
            u = std::clamp(u, 0.0, phi.values[i]);
        }
    }
    return field;
}

void apply_truncated_bc(CylinderField& field, const CrossSectionProfile& phi) {
    check_phi(field, phi);
    for (int j = 0; j <= field.nz; ++j) {
        field.at(0, j) = 0.0;
        field.at(field.nx, j) = 0.0;
    }
    for (int i = 0; i <= field.nx; ++i) {
        field.at(i, 0) = 0.0;
        field.at(i, field.nz) = phi.values[i];
    }
}

CylinderField ramp_field(const CrossSectionProfile& phi, int nz, double half_length,
                         double width) {
    CylinderField field(phi.nx, nz, half_length);
    const double lo = std::tanh(-half_length / width);
    const double hi = std::tanh(half_length / width);
    for (int j = 0; j <= nz; ++j) {
        double xi = (std::tanh(field.z(j) / width) - lo) / (hi - lo);
        if (j == 0) xi = 0.0;
        if (j == nz) xi = 1.0;
        for (int i = 0; i <= phi.nx; ++i) field.at(i, j) = xi * phi.values[i];
    }
    apply_truncated_bc(field, phi);
    return field;
}

double find_zn(const CylinderField& field, const CrossSectionProfile& phi) {
    check_phi(field, phi);
    const auto peak = std::max_element(phi.values.begin(), phi.values.end());
    const int ic = static_cast<int>(peak - phi.values.begin());
    const double level = 0.5 * *peak;
    const auto col = field.column(ic);

    int first_ge = -1;
    for (int j = 0; j <= field.nz; ++j) {
        if (col[j] >= level) {
            first_ge = j;
            break;
        }
    }
    if (first_ge <= 0 && !(first_ge == 0 && col[0] == level)) {
        throw SolverError("degenerate profile");
    }
    if (col[first_ge] == level) {
        int last = first_ge;
        while (last + 1 <= field.nz && col[last + 1] == level) ++last;
        return 0.5 * (field.z(first_ge) + field.z(last));
    }
    const double a = col[first_ge - 1];
    const double b = col[first_ge];
    const double t = (level - a) / (b - a);
    return field.z(first_ge - 1) + t * field.hz;
}

CylinderField recenter(const CylinderField& field, double z_n, const CrossSectionProfile& phi) {
    check_phi(field, phi);
    const long k = std::lround(z_n / field.hz);
    CylinderField out = field;
    for (int j = 0; j <= field.nz; ++j) {
        const long src = j + k;
        for (int i = 0; i <= field.nx; ++i) {
            double v;
            if (src < 0) v = 0.0;
            else if (src > field.nz) v = phi.values[i];
            else v = field.at(i, static_cast<int>(src));
            out.at(i, j) = v;
        }
    }
    if (k != 0) apply_truncated_bc(out, phi);
    out.shift = z_n - static_cast<double>(k) * field.hz;
    return out;
}

CylinderField embed(const CylinderField& field, double half_length,
                    const CrossSectionProfile& phi) {
    check_phi(field, phi);
    const double offset = (half_length - field.half_length) / field.hz;
    const long k = std::lround(offset);
    if (std::abs(offset - static_cast<double>(k)) > 1e-9 || k < 0) {
        throw std::invalid_argument("embed: length change is not a whole number of slices");
    }
    const int nz = field.nz + 2 * static_cast<int>(k);
    CylinderField out(field.nx, nz, half_length);
    out.shift = field.shift;
    for (int j = 0; j <= nz; ++j) {
        const long src = j - k;
        for (int i = 0; i <= field.nx; ++i) {
            double v;
            if (src < 0) v = 0.0;
            else if (src > field.nz) v = phi.values[i];
            else v = field.at(i, static_cast<int>(src));
            out.at(i, j) = v;
        }
    }
    apply_truncated_bc(out, phi);
    return out;
}

CylinderField prolongate(const CylinderField& coarse, const CrossSectionProfile& phi_fine,
                         int nz_fine) {
    CylinderField out(phi_fine.nx, nz_fine, coarse.half_length);
    for (int i = 0; i <= out.nx; ++i) {
        const double sx = out.x(i) / coarse.hx;
        const int i0 = std::clamp(static_cast<int>(std::floor(sx)), 0, coarse.nx - 1);
        const double tx = sx - i0;
        for (int j = 0; j <= out.nz; ++j) {
            const double sz = (out.z(j) + coarse.half_length) / coarse.hz;
            const int j0 = std::clamp(static_cast<int>(std::floor(sz)), 0, coarse.nz - 1);
            const double tz = sz - j0;
            out.at(i, j) = (1 - tx) * (1 - tz) * coarse.at(i0, j0) +
                           tx * (1 - tz) * coarse.at(i0 + 1, j0) +
                           (1 - tx) * tz * coarse.at(i0, j0 + 1) +
                           tx * tz * coarse.at(i0 + 1, j0 + 1);
        }
    }
    apply_truncated_bc(out, phi_fine);
    return project_box(std::move(out), phi_fine);
}

TruncatedSolution solve_truncated(double n, const Nonlinearity& nl,
                                  const CrossSectionProfile& phi, const CylinderConfig& config,
                                  const std::optional<CylinderField>& warm,
                                  std::vector<double>* energy_history) {
    if (!(n >= 2.0)) throw std::invalid_argument("solve_truncated needs n >= 2");
    const int nz = static_cast<int>(std::lround(2.0 * n * config.nz_per_unit));

    CylinderField field = warm ? *warm : ramp_field(phi, nz, n, config.ramp_width);
    if (field.nx != phi.nx || field.nz != nz || std::abs(field.half_length - n) > 1e-12) {
        throw std::invalid_argument("solve_truncated: warm start does not match the grid");
    }
    apply_truncated_bc(field, phi);
    field = project_box(std::move(field), phi);

    // Box bounds; boundary lines pinned (lo == hi).
    std::vector<double> lo(field.values.size()), hi(field.values.size());
    for (int i = 0; i <= field.nx; ++i) {
        for (int j = 0; j <= field.nz; ++j) {
            const std::size_t k = field.index(i, j);
            const bool boundary = i == 0 || i == field.nx || j == 0 || j == field.nz;
            lo[k] = boundary ? field.values[k] : 0.0;
            hi[k] = boundary ? field.values[k] : phi.values[i];
        }
    }

    const double cell = field.hx * field.hz;
    DescentOptions dopt;
    dopt.grad_tol = config.grad_tol * cell;
    dopt.max_iter = config.max_iter;
    const int fnx = field.nx;
    const int fnz = field.nz;
    const double hx = field.hx;
    const double hz = field.hz;
    const EnergyGradient eval = [&](std::span<const double> x, std::span<double> g) {
        return energy_grad_J(x, fnx, fnz, hx, hz, nl, g);
    };
    DescentOptions bb = dopt;
    bb.grad_tol = std::max(config.grad_tol, config.polish_from) * cell;
    DescentResult r = projected_bb_descent(eval, field.values, std::span<const double>(lo),
                                           std::span<const double>(hi), bb,
                                           energy_history != nullptr);
    if (energy_history) *energy_history = r.energy_history;
    if (r.converged && config.newton_polish) {
        const PolishResult p = newton_polish(r.x, fnx, fnz, hx, hz, nl, lo, hi, 50);
        r.iterations += p.iterations;
        r.energy = p.energy;
        r.grad_norm = p.grad_norm;
        if (energy_history) energy_history->push_back(p.energy);
    }
    if (r.grad_norm > dopt.grad_tol && r.iterations < config.max_iter) {
        // Polish unavailable or short of the target: finish with descent
        // inside what is left of the iteration budget.
        dopt.max_iter = config.max_iter - r.iterations;
        DescentResult rest = projected_bb_descent(eval, std::move(r.x), std::span<const double>(lo),
                                                  std::span<const double>(hi), dopt,
                                                  energy_history != nullptr);
        if (energy_history) {
            energy_history->insert(energy_history->end(), rest.energy_history.begin(),
                                   rest.energy_history.end());
        }
        rest.iterations += r.iterations;
        r = std::move(rest);
    }
    if (!r.converged && r.grad_norm > dopt.grad_tol) {
        throw NonConvergenceError("solve_truncated: iteration cap or stall before tolerance",
                                  std::move(r.x), r.grad_norm / cell, r.iterations);
    }
    field.values = std::move(r.x);

    TruncatedSolution sol{std::move(field), {}};
    sol.report.n = n;
    sol.report.c_n = r.energy;
    sol.report.H_n = bottom_hamiltonian(sol.field, nl);
    sol.report.z_n = find_zn(sol.field, phi);
    sol.report.iterations = r.iterations;
    sol.report.grad_norm = r.grad_norm / cell;
    sol.report.converged = true;
    return sol;
}

HeteroclinicResult solve_heteroclinic(const Nonlinearity& nl, const CrossSectionProfile& phi,
                                      const HeteroclinicConfig& config) {
    if (config.n_schedule.empty()) throw std::invalid_argument("empty n schedule");
    for (std::size_t k = 1; k < config.n_schedule.size(); ++k) {
        if (!(config.n_schedule[k] > config.n_schedule[k - 1])) {
            throw std::invalid_argument("n schedule must be strictly increasing");
        }
    }

    HeteroclinicResult res;
    std::optional<CylinderField> current;
    for (double n : config.n_schedule) {
        std::optional<CylinderField> warm;
        if (current) warm = embed(*current, n, phi);
        TruncatedSolution sol;
        try {
            sol = solve_truncated(n, nl, phi, config.cylinder, warm);
        } catch (const NonConvergenceError& e) {
            if (!current) throw;
            break;  // keep the last converged field as the partial result
        }
        ContinuationStep step;
        step.solve = sol.report;
        CylinderField centred = recenter(sol.field, sol.report.z_n, phi);
        const auto [bottom, top] = limit_profile_errors(centred, phi, config.tail_margin);
        const HamiltonianTrace tr = hamiltonian_trace(centred, nl);
        step.bottom_err = bottom;
        step.top_err = top;
        step.H_max = tr.max_abs;
        step.H_drift = tr.drift;
        step.shift = centred.shift;
        if (config.keep_step_fields) step.field = sol.field;
        res.steps.push_back(step);
        current = std::move(centred);
    }
    res.field = *current;
    const ContinuationStep& last = res.steps.back();
    res.converged = res.steps.size() == config.n_schedule.size() &&
                    last.bottom_err <= config.eps_tail && last.top_err <= config.eps_tail &&
                    last.H_max <= config.eps_H;
    return res;
}

}  // namespace heterocyl
