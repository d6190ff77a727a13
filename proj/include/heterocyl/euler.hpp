#pragma once

#include <string>
#include <vector>

#include "heterocyl/grid.hpp"
#include "heterocyl/nonlinearity.hpp"

namespace heterocyl {

enum class DomainKind { strip, half_plane, plane };

std::string to_string(DomainKind kind);
/// "strip", "half_plane" (or "half-plane"), "plane"; throws std::invalid_argument.
DomainKind parse_domain_kind(const std::string& name);

/// Strip solution u0 together with the limit profile used beyond its
/// stored z-range (0 below, phi above).
struct ExtendedSolution {
    CylinderField base;
    CrossSectionProfile phi;
    DomainKind kind = DomainKind::strip;
};

/// Value of the strip, half-plane or plane solution at (x1, x2).
/// half_plane: u1(x1, x2) = v(x1 - 2 floor(x1/2), x2) with v the odd
/// reflection of u0 across x1 = 1; plane: u2(x1, x2) = -u1(-x1, x2) for
/// x1 < 0. Throws std::invalid_argument outside the declared domain.
double eval_extended(const ExtendedSolution& sol, double x1, double x2);

struct Window {
    double x_lo = 0.0;
    double x_hi = 1.0;
    double z_lo = -8.0;
    double z_hi = 8.0;
};

/// Nodal samples on x = x_lo + a*h1, z = z_lo + b*h2 (a = 0..n1, b = 0..n2),
/// stored x-major like CylinderField.
struct GridFunction {
    int n1 = 0;
    int n2 = 0;
    double x_lo = 0.0;
    double z_lo = 0.0;
    double h1 = 0.0;
    double h2 = 0.0;
    std::vector<double> values;

    std::size_t index(int a, int b) const {
        return static_cast<std::size_t>(a) * static_cast<std::size_t>(n2 + 1) +
               static_cast<std::size_t>(b);
    }
    double at(int a, int b) const { return values[index(a, b)]; }
    double x(int a) const { return x_lo + a * h1; }
    double z(int b) const { return z_lo + b * h2; }
};

/// The stored field as a grid function (no resampling).
GridFunction as_grid_function(const CylinderField& field);

/// Samples eval_extended on the window at spacing h (the window is shrunk to
/// a whole number of steps). Throws std::invalid_argument for h <= 0 or an
/// empty window.
GridFunction sample_extended(const ExtendedSolution& sol, const Window& window, double h);

/// max |-Delta_h u - f(u)| over the interior samples, 5-point stencil.
double pde_residual_extended(const ExtendedSolution& sol, const Nonlinearity& nl,
                             const Window& window, double h);

struct EulerFlow {
    GridFunction grid;       // streamfunction samples
    std::vector<double> u1;  // -d_z u
    std::vector<double> u2;  // d_x u
    std::vector<double> p;   // -|grad u|^2/2 - F(u)
};

/// Velocity and pressure from central differences (one-sided second order at
/// the edges of the grid).
EulerFlow euler_fields(const GridFunction& grid, const Nonlinearity& nl);
EulerFlow euler_fields(const CylinderField& field, const Nonlinearity& nl);

/// D1 u1 + D2 u2 at every node with the stencils of euler_fields; vanishes up
/// to rounding because the two difference operators commute.
std::vector<double> divergence(const EulerFlow& flow);

struct EulerResidual {
    std::vector<double> momentum;  // per flow, max over the interior window
    std::vector<double> divergence;
    std::vector<double> orders;    // log2 of successive momentum ratios
    double momentum_res = 0.0;     // finest flow
    double div_res = 0.0;          // max over all flows
    double order = 0.0;            // last entry of orders; NaN if unavailable
    bool order_available = false;
};

/// max |u.grad u + grad p| and max |div u| with central stencils, on the
/// nodes two or more steps inside `window` (or inside the grid when the
/// window is not given). With two or more flows, ordered coarse to fine with
/// halving spacing, reports the empirical order of the momentum residual.
EulerResidual euler_residual(const std::vector<EulerFlow>& flows, const Window* window = nullptr);

struct ThetaSummary {
    double min_rho = 0.0;
    double min_rho_x = 0.0;
    double min_rho_z = 0.0;
    double rho_floor = 0.0;       // rounding level of the difference stencils
    long unresolved_rho = 0;      // nodes with rho <= rho_floor
    long critical_points = 0;     // nodes with rho == 0
    double critical_x = 0.0;      // first critical point, if any
    double critical_z = 0.0;
    double theta_min = 0.0;       // over interior nodes
    double theta_max = 0.0;
    double left_trace_err = 0.0;  // max |theta(x_lo, z)|     (x_lo == 0)
    double right_trace_err = 0.0; // max |theta(x_hi, z) - pi| (x_hi == 1)
    double max_column_jump = 0.0; // max |theta(b+1) - theta(b)| along columns
    double bcn_residual = 0.0;    // max |div(rho^2 grad theta)|
};

struct ThetaField {
    GridFunction grid;
    std::vector<double> rho;
    std::vector<double> theta;  // unwrapped upward along each column
    ThetaSummary summary;
};

/// rho = |grad u| and theta = arg(grad u) from central differences; theta is
/// taken in (-pi, pi] at the bottom node of every column and unwrapped upward.
ThetaField theta_analysis(const GridFunction& grid);
/// Restriction of the stored field to the window (rows and columns inside
/// it). Throws std::invalid_argument when the window leaves the stored range.
ThetaField theta_analysis(const CylinderField& field, const Window& window);

/// Restriction of the stored field to the window (grid nodes inside it).
GridFunction restrict_to_window(const CylinderField& field, const Window& window);

struct ShearFit {
    double deviation = 0.0;  // min over directions of the max deviation
    double angle = 0.0;      // direction e = (cos a, sin a) attaining it
};

/// Distance of the flow from the set of shear flows U(x.e_perp) e: for each
/// direction, x.e_perp is split into 64 bins, U is a least-squares quadratic
/// per bin, and the deviation is max sqrt((u.e_perp)^2 + (u.e - U)^2). Directions
/// are swept at 1 degree and the best one refined by golden section.
ShearFit non_shear_certificate(const EulerFlow& flow);
/// Deviation for one direction (exposed for tests).
double shear_deviation(const EulerFlow& flow, double angle);

struct StagnationCheck {
    double min_speed = 0.0;
    double min_x = 0.0;
    double min_z = 0.0;
    long sign_change_cells = 0;  // cells where both components change sign
    double cell_x = 0.0;         // first such cell (lower-left corner)
    double cell_z = 0.0;
};

StagnationCheck stagnation_check(const EulerFlow& flow);

struct ThetaGrowth {
    std::vector<double> radii;
    std::vector<double> ratios;  // max |theta| / R
};

/// Plane extension sampled on [-R, R] x [-band, band] at spacing h; theta is
/// unwrapped along each row outward from x1 = 0 (where theta = 0).
ThetaGrowth theta_growth_probe(const ExtendedSolution& plane, const std::vector<double>& radii,
                               double band, double h);

}  // namespace heterocyl
