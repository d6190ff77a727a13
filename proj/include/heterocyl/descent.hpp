#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace heterocyl {

/// Energy evaluation for the descent driver. Writes the gradient into `grad`
/// and returns the energy together with a rounding floor: the sum of the
/// magnitudes of the summed terms times a few ulps. Decreases smaller than
/// the floor are not observable.
struct EnergyValue {
    double energy = 0.0;
    double noise = 0.0;
};

using EnergyGradient = std::function<EnergyValue(std::span<const double> x, std::span<double> grad)>;

struct DescentOptions {
    double grad_tol = 1e-9;     // stop on max |projected gradient| <= grad_tol
    int max_iter = 200000;
    double armijo = 1e-4;
    int max_backtracks = 60;
    double initial_step = 0.0;  // <= 0: pick 1/max|g| scaled
    double min_step = 1e-300;
    double max_step = 1e300;
};

struct DescentResult {
    std::vector<double> x;
    double energy = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool stalled = false;  // line search could not find an acceptable step
    std::vector<double> energy_history;  // filled when requested
};

/// Projected gradient descent with Barzilai-Borwein steps and Armijo
/// backtracking along the projection arc.
///
/// Bounds are optional and componentwise; fixed (Dirichlet) components are
/// expressed as lo == hi. Every accepted iterate satisfies the bounds
/// exactly and has energy no larger than its predecessor plus the
/// evaluation's rounding floor.
DescentResult projected_bb_descent(const EnergyGradient& eval, std::vector<double> x0,
                                   std::optional<std::span<const double>> lo,
                                   std::optional<std::span<const double>> hi,
                                   const DescentOptions& options, bool record_history = false);

/// max over components of |g_i|, with components pinned at an active bound
/// (and g pushing further out) excluded.
double projected_gradient_norm(std::span<const double> x, std::span<const double> g,
                               std::optional<std::span<const double>> lo,
                               std::optional<std::span<const double>> hi);

}  // namespace heterocyl
