#pragma once

#include "polyelast/geometry.hpp"

#include <Eigen/Dense>

namespace polyelast {

/// Shape function values and Cartesian gradients at one evaluation point.
struct ShapeEval {
    Eigen::VectorXd values;                       // phi_I, sums to 1
    Eigen::Matrix<double, Eigen::Dynamic, 2> grads; // d phi_I / d(x,y)
};

/// 1D shape values and local-coordinate derivatives at one eta.
struct Shape1D {
    Eigen::VectorXd values;
    Eigen::VectorXd derivs;
};

struct Circumcenter {
    Vec2 center;
    Eigen::Matrix2d d_center; // column j = d(center)/d(x_j)
};

// Circumcenter of (a, b, x) with its derivative w.r.t. x.
// Throws when the three points are (near-)collinear.
Circumcenter circumcenter_with_derivs(const Vec2& a, const Vec2& b, const Vec2& x);

// Laplace (natural-neighbor) interpolant over a convex polygon, evaluated
// directly in physical coordinates. x must be strictly inside; points within
// 1e-10 * diameter of the boundary are rejected.
ShapeEval laplace_shape(const Vec2& x, const Polygon& poly);

// Gauss-Lobatto-Lagrange shape functions on [-1,1], order p in {1,2,3}.
// Node order runs from eta=-1 to eta=+1 (interior nodes at the Lobatto points).
Shape1D lagrange_shape_1d(int order, double eta);

// Parametric node positions for lagrange_shape_1d (p+1 values in [-1,1]).
Eigen::VectorXd lobatto_nodes_1d(int order);

/// Shape-value rows for the simple-averaging smoothed formulation on an
/// n-gon: identity rows at vertices, edge-midpoint and centre rows as means.
struct AveragingShapeTable {
    int n = 0;
    Eigen::VectorXd center;               // row at the central point O, 1/n each
    Eigen::MatrixXd edge_mid;             // row i: midpoint of edge (i, i+1 mod n)
    Eigen::MatrixXd spoke_mid;            // row i: midpoint of segment (O, vertex i)
    Eigen::VectorXd vertex_row(int i) const;
};

AveragingShapeTable averaging_shapes(int n_vertices);

} // namespace polyelast
