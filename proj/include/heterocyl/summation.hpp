#pragma once

#include <cmath>

namespace heterocyl {

/// Neumaier compensated summation; the result is independent of how the
/// caller groups terms only up to the compensation error, so callers keep a
/// fixed order for bit-reproducible reductions.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace heterocyl
