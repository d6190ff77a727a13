#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "heterocyl/descent.hpp"

using namespace heterocyl;

namespace {

// E(x) = sum_i (i+1)/2 (x_i - c_i)^2 : minimiser c, unconstrained.
EnergyGradient diagonal_quadratic(std::vector<double> c) {
    return [c](std::span<const double> x, std::span<double> g) {
        double e = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double a = static_cast<double>(i + 1);
            e += 0.5 * a * (x[i] - c[i]) * (x[i] - c[i]);
            g[i] = a * (x[i] - c[i]);
        }
        return EnergyValue{e, 1e-15 * (1.0 + std::abs(e))};
    };
}

EnergyValue rosenbrock(std::span<const double> x, std::span<double> g) {
    const double a = 1.0 - x[0];
    const double b = x[1] - x[0] * x[0];
    g[0] = -2.0 * a - 400.0 * x[0] * b;
    g[1] = 200.0 * b;
    const double e = a * a + 100.0 * b * b;
    return {e, 1e-15 * (1.0 + e)};
}

}  // namespace

TEST_CASE("unconstrained quadratic converges to its minimiser") {
    const std::vector<double> c{1.0, -2.0, 3.0, 0.5, -0.25};
    DescentOptions opt;
    opt.grad_tol = 1e-10;
    const DescentResult r =
        projected_bb_descent(diagonal_quadratic(c), std::vector<double>(5, 0.0), std::nullopt,
                             std::nullopt, opt, true);
    REQUIRE(r.converged);
    for (std::size_t i = 0; i < c.size(); ++i) CHECK(r.x[i] == doctest::Approx(c[i]).epsilon(1e-9));
    CHECK(r.grad_norm <= 1e-10);
    for (std::size_t k = 1; k < r.energy_history.size(); ++k) {
        CHECK(r.energy_history[k] <= r.energy_history[k - 1] * (1.0 + 1e-14) + 1e-14);
    }
}

TEST_CASE("bounds are honoured and active constraints excluded from the residual") {
    const std::vector<double> c{1.0, -2.0, 3.0};
    const std::vector<double> lo{0.0, 0.0, 0.0};
    const std::vector<double> hi{2.0, 2.0, 2.0};
    DescentOptions opt;
    opt.grad_tol = 1e-12;
    const DescentResult r = projected_bb_descent(diagonal_quadratic(c), {0.5, 0.5, 0.5},
                                                 std::span<const double>(lo),
                                                 std::span<const double>(hi), opt);
    REQUIRE(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.x[1] == 0.0);
    CHECK(r.x[2] == 2.0);
}

TEST_CASE("fixed components (lo == hi) never move") {
    const std::vector<double> c{1.0, 1.0, 1.0, 1.0};
    const std::vector<double> lo{0.25, -1.0, -1.0, 0.75};
    const std::vector<double> hi{0.25, 5.0, 5.0, 0.75};
    DescentOptions opt;
    const DescentResult r = projected_bb_descent(diagonal_quadratic(c), {0.25, 0.0, 0.0, 0.75},
                                                 std::span<const double>(lo),
                                                 std::span<const double>(hi), opt);
    CHECK(r.x[0] == 0.25);
    CHECK(r.x[3] == 0.75);
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("every iterate stays in the box and energy does not increase") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<double> c(40), lo(40, -0.3), hi(40, 0.4), x0(40);
    for (auto& v : c) v = u(rng);
    for (auto& v : x0) v = 0.5 * u(rng) * 0.6;
    int calls = 0;
    bool inside = true;
    auto base = diagonal_quadratic(c);
    EnergyGradient eval = [&](std::span<const double> x, std::span<double> g) {
        ++calls;
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < lo[i] || x[i] > hi[i]) inside = false;
        }
        return base(x, g);
    };
    DescentOptions opt;
    const DescentResult r = projected_bb_descent(eval, x0, std::span<const double>(lo),
                                                 std::span<const double>(hi), opt, true);
    CHECK(r.converged);
    CHECK(calls > 0);
    CHECK(inside);
    for (std::size_t k = 1; k < r.energy_history.size(); ++k) {
        CHECK(r.energy_history[k] <= r.energy_history[k - 1] * (1.0 + 1e-14) + 1e-14);
    }
}

TEST_CASE("Rosenbrock valley") {
    DescentOptions opt;
    opt.grad_tol = 1e-8;
    opt.max_iter = 200000;
    const DescentResult r = projected_bb_descent(rosenbrock, {-1.2, 1.0}, std::nullopt,
                                                 std::nullopt, opt);
    REQUIRE(r.converged);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("iteration cap reports non-convergence") {
    DescentOptions opt;
    opt.grad_tol = 1e-14;
    opt.max_iter = 3;
    const DescentResult r = projected_bb_descent(rosenbrock, {-1.2, 1.0}, std::nullopt,
                                                 std::nullopt, opt);
    CHECK_FALSE(r.converged);
    CHECK(r.iterations <= 3);
}

TEST_CASE("projected gradient norm ignores components pushing out of the box") {
    const std::vector<double> x{0.0, 1.0, 0.5};
    const std::vector<double> lo{0.0, 0.0, 0.0};
    const std::vector<double> hi{1.0, 1.0, 1.0};
    // g > 0 at the lower bound pushes outward (descent direction is -g).
    CHECK(projected_gradient_norm(x, std::vector<double>{5.0, -7.0, 0.25},
                                  std::span<const double>(lo), std::span<const double>(hi)) ==
          0.25);
    CHECK(projected_gradient_norm(x, std::vector<double>{-5.0, 7.0, 0.25},
                                  std::span<const double>(lo), std::span<const double>(hi)) ==
          7.0);
    CHECK(projected_gradient_norm(x, std::vector<double>{-5.0, 7.0, 0.25}, std::nullopt,
                                  std::nullopt) == 7.0);
}
