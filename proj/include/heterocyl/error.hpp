#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace heterocyl {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Iteration cap hit; carries the best iterate seen so callers can report
/// or resume from it.
class NonConvergenceError : public SolverError {
public:
    NonConvergenceError(const std::string& what, std::vector<double> best, double grad_norm,
                        int iterations)
        : SolverError(what), best_(std::move(best)), grad_norm_(grad_norm),
          iterations_(iterations) {}

    const std::vector<double>& best() const { return best_; }
    double grad_norm() const { return grad_norm_; }
    int iterations() const { return iterations_; }

private:
    std::vector<double> best_;
    double grad_norm_;
    int iterations_;
};

class BlowUpError : public SolverError {
public:
    using SolverError::SolverError;
};

class BracketError : public SolverError {
public:
    BracketError(const std::string& what, double lo, double hi)
        : SolverError(what), lo_(lo), hi_(hi) {}
    double lo() const { return lo_; }
    double hi() const { return hi_; }

private:
    double lo_;
    double hi_;
};

}  // namespace heterocyl
