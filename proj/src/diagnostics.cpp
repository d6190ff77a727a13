#include "heterocyl/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "heterocyl/error.hpp"

namespace heterocyl {

double slice_action(const CylinderField& field, int j, const Nonlinearity& nl) {
    double e = 0.0;
    for (int i = 0; i < field.nx; ++i) {
        const double a = field.at(i, j);
        const double b = field.at(i + 1, j);
        const double d = (b - a) / field.hx;
        e += field.hx * (0.5 * d * d - nl.F(0.5 * (a + b)));
    }
    return e;
}

namespace {

double trapezoid_weight_x(const CylinderField& field, int i) {
    return (i == 0 || i == field.nx) ? 0.5 * field.hx : field.hx;
}

double bottom_dz(const CylinderField& field, int i) {
    return (-3.0 * field.at(i, 0) + 4.0 * field.at(i, 1) - field.at(i, 2)) / (2.0 * field.hz);
}

}  // namespace

HamiltonianTrace hamiltonian_trace(const CylinderField& field, const Nonlinearity& nl) {
    if (field.nz < 4) throw std::invalid_argument("hamiltonian_trace needs nz >= 4");
    HamiltonianTrace tr;
    for (int j = 1; j < field.nz; ++j) {
        double kin = 0.0;
        for (int i = 0; i <= field.nx; ++i) {
            const double dz = (field.at(i, j + 1) - field.at(i, j - 1)) / (2.0 * field.hz);
            kin += trapezoid_weight_x(field, i) * 0.5 * dz * dz;
        }
        tr.heights.push_back(field.z(j));
        tr.values.push_back(slice_action(field, j, nl) - kin);
    }
    const auto [mn, mx] = std::minmax_element(tr.values.begin(), tr.values.end());
    tr.drift = *mx - *mn;
    tr.max_abs = std::max(std::abs(*mn), std::abs(*mx));
    return tr;
}

double bottom_kinetic_identity(const CylinderField& field) {
    double kin = 0.0;
    for (int i = 0; i <= field.nx; ++i) {
        const double dz = bottom_dz(field, i);
        kin += trapezoid_weight_x(field, i) * 0.5 * dz * dz;
    }
    return -kin;
}

double bottom_hamiltonian(const CylinderField& field, const Nonlinearity& nl) {
    return slice_action(field, 0, nl) + bottom_kinetic_identity(field);
}

MonotoneCheck check_monotone(const CylinderField& field, double resolution,
                             double tol_nondecreasing) {
    MonotoneCheck c;
    c.min_interior_dz = std::numeric_limits<double>::infinity();
    c.min_resolved_dz = std::numeric_limits<double>::infinity();
    for (int i = 1; i < field.nx; ++i) {
        const double top = field.at(i, field.nz);
        for (int j = 1; j < field.nz - 1; ++j) {
            const double u0 = field.at(i, j);
            const double u1 = field.at(i, j + 1);
            const double dz = (u1 - u0) / field.hz;
            if (dz < c.min_interior_dz) {
                c.min_interior_dz = dz;
                c.min_i = i;
                c.min_j = j;
            }
            const bool resolved = std::min(u0, u1) > resolution &&
                                  top - std::max(u0, u1) > resolution;
            if (resolved) {
                c.min_resolved_dz = std::min(c.min_resolved_dz, dz);
            } else {
                ++c.unresolved_nodes;
            }
        }
    }
    c.nondecreasing = c.min_interior_dz >= -tol_nondecreasing;
    c.pass = c.nondecreasing && c.min_resolved_dz > 0.0;
    return c;
}

BoundsCheck check_bounds(const CylinderField& field, const CrossSectionProfile& phi,
                         double strict_tol, double z_center, double core_half_width) {
    if (phi.nx != field.nx) throw std::invalid_argument("check_bounds: phi grid mismatch");
    BoundsCheck b;
    b.max_violation = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= field.nx; ++i) {
        for (int j = 0; j <= field.nz; ++j) {
            const double u = field.at(i, j);
            b.max_violation = std::max({b.max_violation, -u, u - phi.values[i]});
        }
    }
    b.strict_interior = true;
    b.strict_core = true;
    for (int j = 1; j < field.nz; ++j) {
        bool strict = true;
        for (int i = 1; i < field.nx; ++i) {
            const double u = field.at(i, j);
            if (!(u > strict_tol && u < phi.values[i] - strict_tol)) strict = false;
        }
        b.slice_strict.push_back(strict ? 1 : 0);
        if (!strict) {
            b.strict_interior = false;
            if (std::abs(field.z(j) - z_center) <= core_half_width) b.strict_core = false;
        }
    }
    return b;
}

std::pair<double, double> limit_profile_errors(const CylinderField& field,
                                               const CrossSectionProfile& phi, double margin) {
    if (!(margin < field.half_length)) {
        throw std::invalid_argument("limit_profile_errors: margin must be below L");
    }
    const int jb = std::clamp(static_cast<int>(std::lround(margin / field.hz)), 0, field.nz);
    const int jt = field.nz - jb;
    double bottom = 0.0;
    double top = 0.0;
    for (int i = 0; i <= field.nx; ++i) {
        bottom = std::max(bottom, std::abs(field.at(i, jb)));
        top = std::max(top, std::abs(field.at(i, jt) - phi.values[i]));
    }
    return {bottom, top};
}

StabilityReport stability_spectrum(const CrossSectionProfile& state, const Nonlinearity& nl,
                                   StateKind kind) {
    const int n = state.nx - 1;
    if (n < 2) throw std::invalid_argument("stability_spectrum needs nx >= 3");
    const double h = state.h();
    const double off = -1.0 / (h * h);
    std::vector<double> diag(n);
    double gersh = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        diag[k] = 2.0 / (h * h) - nl.fprime(state.values[k + 1]);
        const double radius = (k > 0 ? -off : 0.0) + (k + 1 < n ? -off : 0.0);
        gersh = std::min(gersh, diag[k] - radius);
    }

    StabilityReport rep;
    rep.state = kind;
    rep.shift = std::min(-10.0, gersh - 1.0);

    auto apply = [&](const std::vector<double>& v, std::vector<double>& out) {
        for (int k = 0; k < n; ++k) {
            out[k] = diag[k] * v[k];
            if (k > 0) out[k] += off * v[k - 1];
            if (k + 1 < n) out[k] += off * v[k + 1];
        }
    };

    // Thomas factorisation of A - shift*I (SPD because shift is below the spectrum).
    std::vector<double> c(n), d(n);
    {
        d[0] = diag[0] - rep.shift;
        for (int k = 1; k < n; ++k) {
            c[k] = off / d[k - 1];
            d[k] = diag[k] - rep.shift - c[k] * off;
        }
    }
    auto solve = [&](std::vector<double>& x) {
        for (int k = 1; k < n; ++k) x[k] -= c[k] * x[k - 1];
        x[n - 1] /= d[n - 1];
        for (int k = n - 2; k >= 0; --k) x[k] = (x[k] - off * x[k + 1]) / d[k];
    };

    std::vector<double> v(n), w(n), Av(n);
    for (int k = 0; k < n; ++k) v[k] = std::sin(std::numbers::pi * (k + 1) * h);  // positive start
    double lambda_prev = std::numeric_limits<double>::infinity();
    for (int it = 1; it <= 20000; ++it) {
        w = v;
        solve(w);
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        for (int k = 0; k < n; ++k) v[k] = w[k] / norm;
        apply(v, Av);
        double lambda = 0.0;
        for (int k = 0; k < n; ++k) lambda += v[k] * Av[k];
        double res = 0.0;
        for (int k = 0; k < n; ++k) res = std::max(res, std::abs(Av[k] - lambda * v[k]));
        rep.smallest_eig = lambda;
        rep.eigvector_norm_check = res;
        rep.iterations = it;
        if (std::abs(lambda - lambda_prev) <= 1e-13 * std::max(1.0, std::abs(lambda)) &&
            res <= 1e-6 * std::max(1.0, std::abs(lambda))) {
            return rep;
        }
        lambda_prev = lambda;
    }
    throw SolverError("stability_spectrum: inverse iteration did not converge");
}

std::string to_string(StateKind kind) {
    switch (kind) {
        case StateKind::zero: return "zero";
        case StateKind::phi: return "phi";
        default: return "other";
    }
}

}  // namespace heterocyl
