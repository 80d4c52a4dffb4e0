#pragma once

#include "polyelast/geometry.hpp"

#include <Eigen/Dense>
#include <functional>

namespace polyelast {

/// 1D rule on [-1, 1].
struct QuadratureRule1D {
    Eigen::VectorXd points;
    Eigen::VectorXd weights;
};

/// Rule on the unit reference triangle {(x,y): x,y >= 0, x+y <= 1},
/// stored in barycentric coordinates. Weights sum to 1/2.
struct TriangleRule {
    std::vector<Eigen::Vector3d> bary;
    Eigen::VectorXd weights;
};

// Gauss-Legendre rule, exact for polynomials of degree <= 2n-1.
QuadratureRule1D gauss_legendre_1d(int n_points);

// Dunavant symmetric triangle rule. Only degree 6 (12 points) is provided;
// other degrees throw.
TriangleRule dunavant_triangle(int degree);

// Integrate f over a polygon by fan sub-triangulation about `apex`
// (centroid when omitted). Polygon must be star-convex w.r.t. the apex;
// a degenerate fan triangle throws.
double integrate_polygon(const std::function<double(const Vec2&)>& f, const Polygon& poly,
                         const TriangleRule& rule);
double integrate_polygon(const std::function<double(const Vec2&)>& f, const Polygon& poly,
                         const TriangleRule& rule, const Vec2& apex);

} // namespace polyelast
