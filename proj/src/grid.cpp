#include "heterocyl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace heterocyl {

double CrossSectionProfile::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

bool CrossSectionProfile::positive_interior() const {
    for (int i = 1; i < nx; ++i) {
        if (!(values[i] > 0.0)) return false;
    }
    return nx >= 2;
}

CylinderField::CylinderField(int nx_, int nz_, double half_length_)
    : nx(nx_), nz(nz_), half_length(half_length_) {
    if (nx < 2 || nz < 2 || !(half_length > 0.0)) {
        throw std::invalid_argument("cylinder field needs nx, nz >= 2 and L > 0");
    }
    hx = 1.0 / nx;
    hz = 2.0 * half_length / nz;
    values.assign(static_cast<std::size_t>(nx + 1) * static_cast<std::size_t>(nz + 1), 0.0);
}

std::vector<double> CylinderField::slice(int j) const {
    std::vector<double> s(static_cast<std::size_t>(nx) + 1);
    for (int i = 0; i <= nx; ++i) s[i] = at(i, j);
    return s;
}

}  // namespace heterocyl
