#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "heterocyl/descent.hpp"
#include "heterocyl/grid.hpp"
#include "heterocyl/nonlinearity.hpp"

namespace heterocyl {

// ---------------------------------------------------------------------------
// Discrete action on the cross-section (0,1)
// ---------------------------------------------------------------------------

/// Discrete action  sum_i h * ( 1/2 ((phi_{i+1}-phi_i)/h)^2 - F((phi_i+phi_{i+1})/2) ).
/// Throws std::invalid_argument for nx < 2 or nonzero endpoints.
double energy_I(const CrossSectionProfile& profile, const Nonlinearity& nl);

/// Exact gradient of energy_I with respect to the nodal values; zero at the
/// two Dirichlet ends.
std::vector<double> grad_I(const CrossSectionProfile& profile, const Nonlinearity& nl);

/// Energy, gradient and rounding floor in one sweep (descent callback form).
EnergyValue energy_grad_I(std::span<const double> values, const Nonlinearity& nl,
                          std::span<double> grad);

// ---------------------------------------------------------------------------
// Multistart minimisation
// ---------------------------------------------------------------------------

struct MinimizeOptions {
    double grad_tol_per_interval = 1e-9;  // stop when max|grad| <= this * nx
    int max_iter = 400000;
    double collapse_threshold = 1e-3;     // max-norm below this counts as the zero state
};

struct MinimizeResult {
    CrossSectionProfile best;                   // lowest energy, ties by start order
    double m = 0.0;                             // energy of best
    std::vector<CrossSectionProfile> minima;    // one per start, in start order
};

/// a*sin(pi x) for a in {0.5, 1, 1.5, 2, 3}, then c/sqrt(lambda)*sin(pi x)
/// for c in {0.5, 0.75, 0.9, 1} when lambda > 0.
std::vector<CrossSectionProfile> default_starts(int nx, double lambda);

/// Unconstrained BB descent from every start (plus the zero profile, always
/// run first). Throws NonConvergenceError with the best iterate if a start
/// fails to converge.
MinimizeResult minimize_I(const Nonlinearity& nl, int nx,
                          const std::vector<CrossSectionProfile>& starts,
                          const MinimizeOptions& options = {});

/// Newton iteration on the exact tridiagonal Hessian of energy_I, started at
/// a converged descent minimiser; brings the residual to rounding level.
/// Stops early (returning the current iterate) if the updates stop shrinking.
CrossSectionProfile newton_polish_I(const Nonlinearity& nl, CrossSectionProfile profile,
                                    int max_iter = 20);

// ---------------------------------------------------------------------------
// Critical parameter of the quintic family
// ---------------------------------------------------------------------------

struct MinimalMinimizerResult {
    CrossSectionProfile phi;
    std::vector<CrossSectionProfile> candidates;  // positive zero-action profiles found
    bool ordered = true;                          // every candidate >= phi - 1e-6
    double zero_tol = 0.0;
};

struct LambdaStarOptions {
    MinimizeOptions minimize{};
    double eps_neg = 1e-6;     // reporting threshold for m < 0
    double eps_zero = 1e-6;    // zero-action tolerance for the returned phi
    int shooting_steps_per_interval = 8;
    // Once the bracket is found, continue the nonzero branch from the warm
    // start alone (plus the zero state) instead of the full multistart set.
    bool warm_only_refinement = true;
};

struct LambdaStarResult {
    double lambda_star = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    CrossSectionProfile phi;
    std::vector<std::pair<double, double>> m_trace;  // (lambda, m_lambda) in evaluation order
    std::vector<CrossSectionProfile> candidates;
    bool candidates_ordered = true;
    double zero_tol = 0.0;
};

/// Bisection for lambda* = sup{lambda : m_lambda < 0} at resolution nx.
/// The bracket is grown from lambda = 1 by doubling/halving inside
/// [1e-4, 1e4]; throws BracketError("family degenerate at this resolution")
/// if none is found.
LambdaStarResult lambda_star_bisection(int nx, double tol, const LambdaStarOptions& options = {});

/// Positive zero-action minimiser of smallest max-norm at the given
/// parameter. Candidates come from the multistart descent and from polished
/// shooting solutions. Throws SolverError("H2 violated at this lambda") if
/// none qualifies.
MinimalMinimizerResult minimal_minimizer(const Nonlinearity& nl, int nx,
                                         const LambdaStarOptions& options = {},
                                         double zero_tol = -1.0,
                                         const std::vector<CrossSectionProfile>& extra_starts = {});

// ---------------------------------------------------------------------------
// Shooting oracle
// ---------------------------------------------------------------------------

struct ShootResult {
    double endpoint = 0.0;
    CrossSectionProfile trajectory;  // nx == steps
};

/// RK4 for phi'' = -f(phi), phi(0) = 0, phi'(0) = slope on [0,1].
/// Throws std::invalid_argument for steps < 16 and BlowUpError if |phi| > 10.
ShootResult shoot(const Nonlinearity& nl, double slope, int steps);

/// All positive solutions of the Dirichlet problem found by a slope scan,
/// each bisected to |phi(1)| <= 1e-10 (or to slope resolution), resampled
/// to nx intervals. `steps` must be a multiple of nx.
std::vector<CrossSectionProfile> bvp_candidates_by_shooting(const Nonlinearity& nl, int steps,
                                                            int nx);

/// Lowest-action positive solution from bvp_candidates_by_shooting.
/// Throws SolverError("no positive solution detected") when the scan finds
/// no sign change.
CrossSectionProfile bvp_by_shooting(const Nonlinearity& nl, int steps, int nx);

// ---------------------------------------------------------------------------
// Time-map oracle (grid free, quintic family only)
// ---------------------------------------------------------------------------

/// Half-width  int_0^M dphi / sqrt(2(F(M)-F(phi)))  of the orbit with turning value M.
double timemap_half_width(double lambda, double M);

/// Action of the Dirichlet solution with turning value M on an interval of
/// width 2*half_width:  2 int_0^M sqrt(2(F(M)-F(phi))) dphi - F(M).
double timemap_action(double lambda, double M);

struct TimeMapPoint {
    double lambda = 0.0;
    double M = 0.0;  // turning value on the upper branch
    double width_residual = 0.0;
    double action_residual = 0.0;
};

/// Upper-branch solution of half_width(M) = 1/2, or nullopt when the time
/// map never dips to 1/2 at this lambda.
std::optional<TimeMapPoint> timemap_solve(double lambda);

/// Action residual at the upper-branch solution; +inf when there is none.
double timemap_action_residual(double lambda);

/// lambda* from the first integral by nested bisection. Throws
/// BracketError when the residuals cannot be brought below tol.
double lambda_star_timemap(double tol);
TimeMapPoint lambda_star_timemap_point(double tol);

}  // namespace heterocyl
