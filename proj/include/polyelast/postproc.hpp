#pragma once

#include "polyelast/solver.hpp"

#include <functional>

namespace polyelast {

using DisplacementField = std::function<Vec2(const Vec2&)>;
using StressField = std::function<Eigen::Vector3d(const Vec2&)>;

/// Relative L2 / energy-norm errors of a solution against exact fields.
struct ErrorNorms {
    double l2_rel = 0.0;
    double h1_rel = 0.0;
    int dofs = 0;
    double h = 0.0; // mean element size
};

ErrorNorms error_norms(const PolygonMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& d,
                       const DisplacementField& exact_u, const StressField& exact_stress,
                       const Material& mat, Formulation form, const AssemblyResult& assembly);

// Integration constants c = Phi_u^-1 u_b of one scaled-boundary element.
Eigen::VectorXcd sbfem_integration_constants(const SbfemModalData& modal,
                                             const Eigen::VectorXd& u_b);

// Gather the boundary displacement vector of element e from the global
// solution (ordering matches the modal geometry).
Eigen::VectorXd sbfem_boundary_displacements(const PolygonMesh& mesh, const DofMap& dofs,
                                             const Eigen::VectorXd& d, int e);

// Semi-analytic displacement u(xi, eta) within boundary element `elem`.
Vec2 sbfem_displacement_at(const SbfemModalData& modal, const Eigen::VectorXcd& c, double xi,
                           int elem, double eta);

// Semi-analytic stress (sxx, syy, txy). xi = 0 throws when singular modes
// are present.
Eigen::Vector3d sbfem_stress_at(const SbfemModalData& modal, const Eigen::VectorXcd& c, double xi,
                                int elem, double eta, const Material& mat);

// Boundary nodal forces (E0 xi u,xi + E1^T u)|xi=1 for the given constants.
Eigen::VectorXd sbfem_boundary_forces(const SbfemModalData& modal, const Eigen::VectorXcd& c);

struct SifResult {
    double K_I = 0.0;
    double K_II = 0.0;
    double F_I = 0.0;  // K_I / (sigma sqrt(pi a)), when normalisation given
    double F_II = 0.0;
    double L0 = 0.0;   // boundary distance along theta = 0 from the tip
};

// Direct stress-intensity extraction from the singular modes
// (Re lambda in (-1, 0)) of a crack-tip element. `crack_angle` orients the
// theta = 0 ray (crack prolongation). Optional sigma/a fill the normalised
// factors.
SifResult extract_sif(const SbfemModalData& modal, const Eigen::VectorXcd& c, double crack_angle,
                      const Material& mat, double sigma_ref = 0.0, double a_ref = 0.0);

// Least-squares slope of log(error) vs log(h); dof counts are converted via
// h = dofs^(-1/2) when `measures_are_dofs`.
double convergence_rate(const std::vector<double>& errors, const std::vector<double>& measures,
                        bool measures_are_dofs);

} // namespace polyelast
