#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace heterocyl {

/// Nodal values of a function on the uniform grid x_i = i/nx of [0,1], with
/// homogeneous Dirichlet ends.
struct CrossSectionProfile {
    int nx = 0;
    std::vector<double> values;  // nx + 1 entries
    double action = 0.0;
    double lambda = 0.0;

    CrossSectionProfile() = default;
    CrossSectionProfile(int nx_, std::vector<double> v, double lambda_ = 0.0)
        : nx(nx_), values(std::move(v)), lambda(lambda_) {}

    static CrossSectionProfile zero(int nx, double lambda = 0.0) {
        return {nx, std::vector<double>(static_cast<std::size_t>(nx) + 1, 0.0), lambda};
    }

    double h() const { return 1.0 / nx; }
    double x(int i) const { return static_cast<double>(i) / nx; }
    double max_abs() const;
    /// values > 0 at every interior node.
    bool positive_interior() const;
};

/// Nodal values on (0,1) x (-L, L), stored x-major: values[i * (nz + 1) + j]
/// is u(x_i, z_j) with x_i = i*hx and z_j = -L + j*hz.
struct CylinderField {
    int nx = 0;
    int nz = 0;
    double half_length = 0.0;
    double hx = 0.0;
    double hz = 0.0;
    double shift = 0.0;  // crossing height left over after the last integer recentering
    std::vector<double> values;

    CylinderField() = default;
    CylinderField(int nx_, int nz_, double half_length_);

    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(nz + 1) +
               static_cast<std::size_t>(j);
    }
    double& at(int i, int j) { return values[index(i, j)]; }
    double at(int i, int j) const { return values[index(i, j)]; }

    std::span<double> column(int i) {
        return {values.data() + index(i, 0), static_cast<std::size_t>(nz) + 1};
    }
    std::span<const double> column(int i) const {
        return {values.data() + index(i, 0), static_cast<std::size_t>(nz) + 1};
    }
    std::vector<double> slice(int j) const;

    double x(int i) const { return i * hx; }
    double z(int j) const { return -half_length + j * hz; }
};

}  // namespace heterocyl
