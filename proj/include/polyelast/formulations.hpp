#pragma once

#include "polyelast/geometry.hpp"
#include "polyelast/interpolants.hpp"
#include "polyelast/material.hpp"
#include "polyelast/quadrature.hpp"

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace polyelast {

/// One quadrature point of the isoparametrically mapped polygonal element:
/// physical position, weight (including the Jacobian), shape values and
/// physical shape gradients.
struct PolyFemQuadPoint {
    Vec2 x;
    double weight = 0.0;
    Eigen::VectorXd N;
    Eigen::Matrix<double, Eigen::Dynamic, 2> dNdx;
};

// Laplace shape data at the fan-subdivided quadrature points of the
// reference regular n-gon, mapped isoparametrically onto the physical
// polygon. Throws when the mapping Jacobian is non-positive.
std::vector<PolyFemQuadPoint> polyfem_quadrature(const Polygon& poly, const TriangleRule& rule);

// Polygonal FEM stiffness with Laplace interpolants. Dof order: (ux, uy)
// per vertex.
Eigen::MatrixXd stiffness_polyfem(const Polygon& poly, const Material& mat,
                                  const TriangleRule& rule);

/// One triangular smoothing subcell (O, v_i, v_{i+1}) with its area and
/// smoothed strain-displacement matrix (3 x 2n).
struct SmoothedSubcell {
    double area = 0.0;
    Eigen::MatrixXd B;
};

// Subcells of the cell-based smoothed formulation with simple-averaging
// shape values; one Gauss point (midpoint) per subcell edge.
std::vector<SmoothedSubcell> nsfem_subcells(const Polygon& poly);

// Smoothed polygonal stiffness: sum of B~^T D B~ A_C over the n subcells.
Eigen::MatrixXd stiffness_nsfem(const Polygon& poly, const Material& mat);

/// Boundary discretisation of a scaled-boundary polygon: an ordered chain of
/// 1D elements of shape order p around the scaling center. `closed` is false
/// for crack-tip chains (side faces along the crack are not discretised).
struct SbfemGeometry {
    Vec2 scaling_center;
    std::vector<Vec2> nodes;                  // boundary nodes, absolute coords
    std::vector<std::vector<int>> elements;   // p+1 local node ids each
    int order = 1;
    bool closed = true;
    int n_dof() const { return 2 * static_cast<int>(nodes.size()); }
};

// Build the boundary chain for a polygon: corner nodes plus p-1 interior
// nodes per edge at the Gauss-Lobatto parametric positions.
SbfemGeometry make_sbfem_geometry(const Polygon& poly, const Vec2& scaling_center, int order,
                                  bool closed);

struct SbfemCoefficients {
    Eigen::MatrixXd E0, E1, E2;
};

// Coefficient matrices E0, E1, E2 assembled element-by-element over the
// boundary with p+1 Gauss points per element. Throws when |J| <= 0 at a
// Gauss point (scaling requirement violated).
SbfemCoefficients sbfem_coefficient_matrices(const SbfemGeometry& geom, const Material& mat);

/// Modal data of one scaled-boundary polygon.
struct SbfemModalData {
    SbfemGeometry geom;
    Eigen::MatrixXd E0, E1, E2;
    Eigen::VectorXcd lambda;   // selected eigenvalues, Re <= 0; translations exactly 0
    Eigen::MatrixXcd phi_u;    // modal displacements (top half)
    Eigen::MatrixXcd phi_q;    // modal forces (bottom half)
};

// Eigen-decomposition of the Hamiltonian matrix Z built from E0, E1, E2;
// selects the 2n most negative-real-part eigenpairs. Analytically known
// modes replace their numerically fragile clusters: unit translations
// (lambda = 0), and the lambda = -1 linear modes (all four on closed
// boundaries; rotation plus the crack-aligned uniaxial state on open ones).
SbfemModalData sbfem_solve_element(const SbfemGeometry& geom, const SbfemCoefficients& coeff,
                                   const Material& mat);
SbfemModalData sbfem_solve_element(const SbfemGeometry& geom, const Material& mat);

// Builds the Hamiltonian matrix Z (exposed for the property tests).
Eigen::MatrixXd sbfem_hamiltonian(const SbfemCoefficients& coeff);

// K = Re(Phi_q Phi_u^-1), symmetrised after the asymmetry check.
Eigen::MatrixXd stiffness_sbfem(const SbfemModalData& modal);

// B1/B2 matrices of one boundary element at local coordinate eta, sized
// 3 x 2(p+1); used by the stress recovery and the coefficient integrals.
void sbfem_b_matrices(const SbfemGeometry& geom, int element, double eta, Eigen::MatrixXd& b1,
                      Eigen::MatrixXd& b2, double& det_j);

} // namespace polyelast
