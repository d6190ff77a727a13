#include "heterocyl/nonlinearity.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace heterocyl {

void Nonlinearity::f_batch(std::span<const double> t, std::span<double> out) const {
    assert(t.size() == out.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = f(t[i]);
}

void Nonlinearity::F_batch(std::span<const double> t, std::span<double> out) const {
    assert(t.size() == out.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = F(t[i]);
}

void Nonlinearity::fprime_batch(std::span<const double> t, std::span<double> out) const {
    assert(t.size() == out.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = fprime(t[i]);
}

QuinticNonlinearity::QuinticNonlinearity(QuinticParams params) : params_(params) {
    if (!std::isfinite(params.lambda) || params.lambda < 0.0) {
        throw std::invalid_argument("quintic nonlinearity requires lambda >= 0");
    }
}

void QuinticNonlinearity::f_batch(std::span<const double> t, std::span<double> out) const {
    assert(t.size() == out.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = eval_f(params_, t[i]);
}

void QuinticNonlinearity::F_batch(std::span<const double> t, std::span<double> out) const {
    assert(t.size() == out.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = eval_F(params_, t[i]);
}

void QuinticNonlinearity::fprime_batch(std::span<const double> t, std::span<double> out) const {
    assert(t.size() == out.size());
    for (std::size_t i = 0; i < t.size(); ++i) out[i] = eval_fprime(params_, t[i]);
}

}  // namespace heterocyl
