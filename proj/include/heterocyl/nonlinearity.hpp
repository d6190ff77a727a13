#pragma once

#include <span>

namespace heterocyl {

/// Nonlinearity contract for -Δu = f(u): the source term f, its primitive F
/// with F(0) = 0, and the derivative f'.
///
/// Batch evaluators exist so that grid sweeps pay one virtual dispatch per
/// row instead of one per node. Implementations must be stateless after
/// construction.
class Nonlinearity {
public:
    virtual ~Nonlinearity() = default;

    virtual double f(double t) const = 0;
    virtual double F(double t) const = 0;
    virtual double fprime(double t) const = 0;
    virtual bool is_odd() const = 0;

    virtual void f_batch(std::span<const double> t, std::span<double> out) const;
    virtual void F_batch(std::span<const double> t, std::span<double> out) const;
    virtual void fprime_batch(std::span<const double> t, std::span<double> out) const;
};

/// Parameter of the quintic family f(t) = t^3 - λ t^5.
struct QuinticParams {
    double lambda = 0.0;
};

// Horner forms keep the relative accuracy for |t| << 1.
inline double eval_f(const QuinticParams& p, double t) {
    const double t2 = t * t;
    return t * t2 * (1.0 - p.lambda * t2);
}

inline double eval_F(const QuinticParams& p, double t) {
    const double t2 = t * t;
    return t2 * t2 * (0.25 - p.lambda * t2 / 6.0);
}

inline double eval_fprime(const QuinticParams& p, double t) {
    const double t2 = t * t;
    return t2 * (3.0 - 5.0 * p.lambda * t2);
}

class QuinticNonlinearity final : public Nonlinearity {
public:
    /// Throws std::invalid_argument for negative or non-finite λ.
    explicit QuinticNonlinearity(QuinticParams params);

    const QuinticParams& params() const { return params_; }
    double lambda() const { return params_.lambda; }

    double f(double t) const override { return eval_f(params_, t); }
    double F(double t) const override { return eval_F(params_, t); }
    double fprime(double t) const override { return eval_fprime(params_, t); }
    bool is_odd() const override { return true; }

    void f_batch(std::span<const double> t, std::span<double> out) const override;
    void F_batch(std::span<const double> t, std::span<double> out) const override;
    void fprime_batch(std::span<const double> t, std::span<double> out) const override;

private:
    QuinticParams params_;
};

}  // namespace heterocyl
