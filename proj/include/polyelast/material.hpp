#pragma once

#include <Eigen/Dense>

namespace polyelast {

enum class PlaneMode { Stress, Strain };

/// Linear isotropic material with the plane-stress / plane-strain
/// constitutive matrix in Voigt order (xx, yy, xy).
struct Material {
    double E = 1.0;
    double nu = 0.0;
    PlaneMode mode = PlaneMode::Stress;

    Eigen::Matrix3d D() const;

    // Effective constants of the standard plane-elasticity switch.
    double E_bar() const { return mode == PlaneMode::Stress ? E : E / (1.0 - nu * nu); }
    double nu_bar() const { return mode == PlaneMode::Stress ? nu : nu / (1.0 - nu); }
    double shear_modulus() const { return E / (2.0 * (1.0 + nu)); }
    // Kolosov constant.
    double kappa() const {
        return mode == PlaneMode::Stress ? (3.0 - nu) / (1.0 + nu) : 3.0 - 4.0 * nu;
    }
};

} // namespace polyelast
