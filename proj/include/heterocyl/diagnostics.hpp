#pragma once

#include <string>
#include <utility>
#include <vector>

#include "heterocyl/grid.hpp"
#include "heterocyl/nonlinearity.hpp"

namespace heterocyl {

/// Slice Hamiltonian H(t_j) on interior slices.
struct HamiltonianTrace {
    std::vector<double> heights;
    std::vector<double> values;
    double drift = 0.0;  // max - min
    double max_abs = 0.0;
};

/// H(t_j) = sum_i hx (1/2 (Dx u)^2 - F(mid)) - sum_i w_i 1/2 (Dz u)^2 with
/// forward Dx and midpoint F (the row action used by the energy) and central
/// Dz with trapezoid weights w_i. Throws std::invalid_argument for nz < 4.
HamiltonianTrace hamiltonian_trace(const CylinderField& field, const Nonlinearity& nl);

/// H at the bottom boundary slice, with the second-order one-sided Dz.
double bottom_hamiltonian(const CylinderField& field, const Nonlinearity& nl);

/// -1/2 sum_i w_i (Dz u(x_i, -L))^2 with the same one-sided stencil; equals
/// bottom_hamiltonian whenever the bottom row is zero.
double bottom_kinetic_identity(const CylinderField& field);

/// Discrete action of slice j (energy_I applied to the row).
double slice_action(const CylinderField& field, int j, const Nonlinearity& nl);

struct MonotoneCheck {
    double min_interior_dz = 0.0;   // over every interior node
    int min_i = -1;
    int min_j = -1;
    double min_resolved_dz = 0.0;   // over the resolved band
    long unresolved_nodes = 0;      // interior nodes within the resolution of a bound
    bool nondecreasing = false;     // min_interior_dz >= -tol_nondecreasing
    bool pass = false;              // strict increase on the resolved band, and nondecreasing
};

/// Forward z-differences divided by hz over interior nodes. A node is
/// resolved when both u and u_top - u exceed `resolution` (absolute); below
/// that the difference is at the level of rounding of the stored values.
MonotoneCheck check_monotone(const CylinderField& field, double resolution = 1e-12,
                             double tol_nondecreasing = 1e-10);

struct BoundsCheck {
    double max_violation = 0.0;        // max over nodes of max(-u, u - phi)
    bool strict_interior = false;      // every interior node in (tol, phi - tol)
    std::vector<char> slice_strict;    // per interior slice j = 1..nz-1
    bool strict_core = false;          // strict on every slice of the core window
};

/// Bounds 0 <= u <= phi and the strict interior inequalities, reported.
/// The core window is |z - z_center| <= core_half_width.
BoundsCheck check_bounds(const CylinderField& field, const CrossSectionProfile& phi,
                         double strict_tol = 1e-14, double z_center = 0.0,
                         double core_half_width = 4.0);

/// (max |u(., -L+margin)|, max |u(., L-margin) - phi|), slice nearest to the height.
std::pair<double, double> limit_profile_errors(const CylinderField& field,
                                               const CrossSectionProfile& phi, double margin);

enum class StateKind { zero, phi, other };

struct StabilityReport {
    StateKind state = StateKind::other;
    double smallest_eig = 0.0;
    double eigvector_norm_check = 0.0;  // ||A v - lambda v||_inf with ||v||_2 = 1
    int iterations = 0;
    double shift = 0.0;
};

/// Smallest eigenvalue of -d^2/dx^2 - f'(state) with Dirichlet ends by
/// shifted inverse iteration (tridiagonal solve). The shift is -10, or a
/// Gershgorin bound when that lies lower, so the iteration targets the
/// bottom of the spectrum. Throws SolverError on non-convergence.
StabilityReport stability_spectrum(const CrossSectionProfile& state, const Nonlinearity& nl,
                                   StateKind kind = StateKind::other);

std::string to_string(StateKind kind);

}  // namespace heterocyl
