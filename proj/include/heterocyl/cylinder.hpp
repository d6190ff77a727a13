#pragma once

#include <optional>
#include <vector>

#include "heterocyl/descent.hpp"
#include "heterocyl/grid.hpp"
#include "heterocyl/nonlinearity.hpp"

namespace heterocyl {

/// Discrete energy on the cylinder grid: trapezoid weights in z applied to
/// row actions (forward x-differences, midpoint F) plus trapezoid weights in
/// x applied to forward z-differences. A z-independent field with profile
/// phi has energy exactly 2L * energy_I(phi).
double energy_J(const CylinderField& field, const Nonlinearity& nl);

/// Exact gradient of energy_J; zero on the four boundary lines. Interior
/// entries equal hx*hz*(-5-point Laplacian - averaged midpoint f).
std::vector<double> grad_J(const CylinderField& field, const Nonlinearity& nl);

/// Energy/gradient sweep on a raw x-major buffer (descent callback form).
/// The gradient is not masked; fixed nodes are handled by the box bounds.
EnergyValue energy_grad_J(std::span<const double> values, int nx, int nz, double hx, double hz,
                          const Nonlinearity& nl, std::span<double> grad);

/// Clip every interior node into [0, phi(x_i)]; boundary lines untouched.
/// Throws std::invalid_argument when phi.nx != field.nx.
CylinderField project_box(CylinderField field, const CrossSectionProfile& phi);

/// Fill boundary lines: 0 on x = 0, 1 and z = -L; phi on z = L.
void apply_truncated_bc(CylinderField& field, const CrossSectionProfile& phi);

/// Ramp initializer xi(z) phi(x) with xi = (1 + tanh(z/w))/2 rescaled to
/// be exactly 0 at z = -L and 1 at z = L.
CylinderField ramp_field(const CrossSectionProfile& phi, int nz, double half_length,
                         double width = 1.0);

/// Height of the crossing of 1/2 max(phi) along the column where phi peaks,
/// linearly interpolated; flat segments at the level resolve to their
/// midpoint. Throws SolverError("degenerate profile") without a crossing.
double find_zn(const CylinderField& field, const CrossSectionProfile& phi);

/// Shift by round(z_n/hz) slices so the crossing moves next to z = 0,
/// filling vacated slices with 0 (bottom) or phi (top). field.shift records
/// the remaining offset z_n - k*hz.
CylinderField recenter(const CylinderField& field, double z_n, const CrossSectionProfile& phi);

/// Copy `field` into a taller grid with the same hz, centred at z = 0,
/// extending by 0 below and phi above. Throws std::invalid_argument when the
/// slice offset is not an integer.
CylinderField embed(const CylinderField& field, double half_length,
                    const CrossSectionProfile& phi);

/// Bilinear prolongation onto a grid with (nx_fine, nz_fine) intervals of
/// the same physical size; boundary lines are reset from phi_fine.
CylinderField prolongate(const CylinderField& coarse, const CrossSectionProfile& phi_fine,
                         int nz_fine);

struct CylinderConfig {
    double nz_per_unit = 64.0;  // slices per unit length in z; nx gives hz == hx
    double grad_tol = 1e-9;     // residual units: max|grad| / (hx*hz)
    int max_iter = 2000000;
    double ramp_width = 1.0;
    // Damped Newton on the interior once descent reaches polish_from
    // (residual units); it drives the residual to rounding level.
    bool newton_polish = true;
    double polish_from = 1e-4;
};

struct TruncatedSolveReport {
    double n = 0.0;
    double c_n = 0.0;
    double H_n = 0.0;
    double z_n = 0.0;
    int iterations = 0;
    double grad_norm = 0.0;  // residual units
    bool converged = false;
};

struct TruncatedSolution {
    CylinderField field;
    TruncatedSolveReport report;
};

/// Minimise energy_J on (0,1)x(-n,n) over 0 <= u <= phi with data 0 below
/// and phi on top. Starts from `warm` when given (must match the grid),
/// otherwise from ramp_field. Throws NonConvergenceError carrying the best
/// iterate when the iteration cap is hit.
TruncatedSolution solve_truncated(double n, const Nonlinearity& nl,
                                  const CrossSectionProfile& phi, const CylinderConfig& config,
                                  const std::optional<CylinderField>& warm = std::nullopt,
                                  std::vector<double>* energy_history = nullptr);

struct HeteroclinicConfig {
    CylinderConfig cylinder{};
    std::vector<double> n_schedule{4.0, 6.0, 8.0, 12.0};
    double eps_tail = 1e-2;
    double eps_H = 1e-3;
    double tail_margin = 1.0;
    bool keep_step_fields = false;  // store every truncated minimiser in its step
};

struct ContinuationStep {
    TruncatedSolveReport solve;
    double bottom_err = 0.0;  // after recentering
    double top_err = 0.0;
    double H_max = 0.0;       // max |H| over the slice trace
    double H_drift = 0.0;
    double shift = 0.0;
    std::optional<CylinderField> field;  // u_n before recentering, if kept
};

struct HeteroclinicResult {
    CylinderField field;  // recentered final field
    std::vector<ContinuationStep> steps;
    bool converged = false;  // tail and Hamiltonian criteria on the final field
};

/// Continuation over n_schedule: each truncated minimiser is recentered and
/// embedded into the next, longer cylinder. The whole schedule is run; the
/// criteria (tails within eps_tail at tail_margin, max |H| within eps_H)
/// are evaluated on the final field. A NonConvergenceError at some n ends
/// the loop with the partial result.
HeteroclinicResult solve_heteroclinic(const Nonlinearity& nl, const CrossSectionProfile& phi,
                                      const HeteroclinicConfig& config);

}  // namespace heterocyl
