#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "heterocyl/nonlinearity.hpp"

using namespace heterocyl;

TEST_CASE("quintic values at reference points") {
    CHECK(eval_f({1.0}, 0.0) == 0.0);
    CHECK(eval_f({1.0}, 1.0) == 0.0);
    CHECK(eval_f({0.5}, 1.0) == 0.5);
    CHECK(eval_F({1.0}, 0.0) == 0.0);
    CHECK(eval_F({1.0}, 1.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-15));
    CHECK(eval_F({1.5}, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(eval_fprime({0.7}, 0.0) == 0.0);
    CHECK(eval_fprime({1.0}, 1.0) == -2.0);
    CHECK(eval_fprime({0.0}, 2.0) == 12.0);
}

TEST_CASE("negative or non-finite lambda is rejected") {
    CHECK_THROWS_AS(QuinticNonlinearity({-1e-3}), std::invalid_argument);
    CHECK_THROWS_AS(QuinticNonlinearity({std::numeric_limits<double>::quiet_NaN()}),
                    std::invalid_argument);
    CHECK_THROWS_AS(QuinticNonlinearity({std::numeric_limits<double>::infinity()}),
                    std::invalid_argument);
    CHECK_NOTHROW(QuinticNonlinearity({0.0}));
}

TEST_CASE("f is odd bit for bit") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ut(-3.0, 3.0), ul(0.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const QuinticParams p{ul(rng)};
        const double t = ut(rng);
        CHECK(eval_f(p, -t) == -eval_f(p, t));
        CHECK(eval_F(p, -t) == eval_F(p, t));
        CHECK(eval_fprime(p, -t) == eval_fprime(p, t));
    }
    CHECK(QuinticNonlinearity({1.0}).is_odd());
}

TEST_CASE("F' = f and f' = fprime by central differences") {
    const double h = 1e-5;
    for (double lambda : {0.0, 0.0172, 1.0, 2.5}) {
        const QuinticParams p{lambda};
        for (double t = -2.0; t <= 2.0; t += 0.01) {
            const double dF = (eval_F(p, t + h) - eval_F(p, t - h)) / (2 * h);
            const double df = (eval_f(p, t + h) - eval_f(p, t - h)) / (2 * h);
            CHECK(std::abs(dF - eval_f(p, t)) <= 1e-8);
            CHECK(std::abs(df - eval_fprime(p, t)) <= 1e-8 * std::max(1.0, std::abs(df)));
        }
    }
}

TEST_CASE("F is bounded above with interior maximiser 1/(12 lambda^2)") {
    // The coercivity of the action rests on this bound; F itself tends to
    // -infinity like -lambda t^6/6.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ul(0.02, 3.0);
    for (int k = 0; k < 50; ++k) {
        const QuinticParams p{ul(rng)};
        const int n = 200001;
        double best = -std::numeric_limits<double>::infinity();
        int arg = -1;
        for (int i = 0; i < n; ++i) {
            const double t = -10.0 + 20.0 * i / (n - 1);
            const double v = eval_F(p, t);
            if (v > best) {
                best = v;
                arg = i;
            }
        }
        CHECK(arg > 0);
        CHECK(arg < n - 1);
        CHECK(best <= 1.0 / (12.0 * p.lambda * p.lambda) * (1.0 + 1e-15));
        CHECK(best == doctest::Approx(1.0 / (12.0 * p.lambda * p.lambda)).epsilon(1e-6));
        CHECK(eval_F(p, 10.0) < best);
    }
}

TEST_CASE("batch evaluators agree with the scalar ones") {
    const QuinticNonlinearity nl({0.3});
    std::vector<double> t{-2.0, -0.5, 0.0, 1e-8, 0.7, 1.9};
    std::vector<double> f(t.size()), F(t.size()), d(t.size());
    nl.f_batch(t, f);
    nl.F_batch(t, F);
    nl.fprime_batch(t, d);
    for (std::size_t i = 0; i < t.size(); ++i) {
        CHECK(f[i] == nl.f(t[i]));
        CHECK(F[i] == nl.F(t[i]));
        CHECK(d[i] == nl.fprime(t[i]));
    }
}

TEST_CASE("Horner forms keep relative accuracy near zero") {
    const QuinticParams p{0.5};
    const double t = 1e-80;
    CHECK(eval_f(p, t) == doctest::Approx(1e-240).epsilon(1e-14));
    CHECK(eval_fprime(p, t) == doctest::Approx(3e-160).epsilon(1e-14));
}
