#include "polyelast/material.hpp"

#include <stdexcept>

namespace polyelast {

Eigen::Matrix3d Material::D() const {
    if (E <= 0.0) throw std::invalid_argument("Material: E must be positive");
    if (nu <= -1.0 || nu >= 0.5) throw std::invalid_argument("Material: nu outside (-1, 0.5)");
    if (mode == PlaneMode::Strain && nu >= 0.4999)
        throw std::invalid_argument("Material: near-incompressible plane strain unsupported");
    Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
    if (mode == PlaneMode::Stress) {
        const double c = E / (1.0 - nu * nu);
        D(0, 0) = D(1, 1) = c;
        D(0, 1) = D(1, 0) = c * nu;
        D(2, 2) = c * (1.0 - nu) / 2.0;
    } else {
        const double c = E / ((1.0 + nu) * (1.0 - 2.0 * nu));
        D(0, 0) = D(1, 1) = c * (1.0 - nu);
        D(0, 1) = D(1, 0) = c * nu;
        D(2, 2) = c * (1.0 - 2.0 * nu) / 2.0;
    }
    return D;
}

} // namespace polyelast
