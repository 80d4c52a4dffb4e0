#pragma once

#include "polyelast/formulations.hpp"
#include "polyelast/mesh.hpp"

#include <Eigen/Sparse>
#include <functional>
#include <map>
#include <optional>
#include <vector>

namespace polyelast {

enum class Formulation { PolyFem, NSfem, Sbfem };

using SpMat = Eigen::SparseMatrix<double>;

/// Global dof numbering: two dofs per mesh node, plus (for SBFEM order p > 1)
/// two dofs per interior node of each unique element edge. Cracked double
/// nodes are distinct mesh nodes and so get distinct dofs automatically.
class DofMap {
public:
    DofMap(const PolygonMesh& mesh, int order);

    int total_dofs() const { return total_dofs_; }
    int order() const { return order_; }

    // Ordered chain of global point ids around element e (corner points and
    // edge-interior points); open chain for tip elements.
    std::vector<int> element_points(const PolygonMesh& mesh, int e) const;
    // Point ids along a boundary edge (from, to), endpoints included.
    std::vector<int> edge_points(int from, int to) const;

    Vec2 point_coord(const PolygonMesh& mesh, int point) const;
    int dof_x(int point) const { return 2 * point; }
    int dof_y(int point) const { return 2 * point + 1; }
    int n_points() const { return n_points_; }

private:
    int order_ = 1;
    int n_mesh_nodes_ = 0;
    int n_points_ = 0;
    int total_dofs_ = 0;
    std::map<std::pair<int, int>, std::vector<int>> edge_interior_; // key: (min,max)
    std::vector<Vec2> extra_coords_;
};

/// Assembled system plus the per-element data needed downstream.
struct AssemblyResult {
    SpMat K;
    std::vector<Eigen::MatrixXd> element_K;
    std::vector<std::vector<int>> element_dofs;
    std::vector<SbfemModalData> modal; // per element, SBFEM only
};

// Scatter-add of element stiffness into the global matrix. Deterministic:
// triplets are merged sorted by (row, col), so serial and parallel paths
// produce bitwise-identical results.
AssemblyResult assemble_global(const PolygonMesh& mesh, Formulation form, const Material& mat,
                               const DofMap& dofs, bool parallel = true);

struct EdgeTraction {
    int boundary_edge = -1; // index into mesh.boundary_edges
    std::function<Vec2(const Vec2&)> traction;
};

struct LoadCase {
    std::vector<std::pair<int, double>> essential; // (dof, prescribed value)
    std::vector<EdgeTraction> tractions;
    std::function<Vec2(const Vec2&)> body_force; // FEM/nSFEM only
};

// Consistent nodal loads from edge tractions (4-point Gauss per edge,
// shape order = 1 for FEM/nSFEM and p for SBFEM) and the optional body force.
Eigen::VectorXd apply_loads(const PolygonMesh& mesh, const DofMap& dofs, const LoadCase& load,
                            Formulation form);

/// Reduced system after eliminating prescribed dofs.
struct ReducedSystem {
    SpMat K;
    Eigen::VectorXd f;
    std::vector<int> free_dofs;        // reduced index -> full dof
    Eigen::VectorXd prescribed;        // full-length, constrained entries set
    Eigen::VectorXd recover(const Eigen::VectorXd& d_reduced) const;
};

ReducedSystem apply_essential_bc(const SpMat& K, const Eigen::VectorXd& f,
                                 const std::vector<std::pair<int, double>>& constraints);

// Direct sparse solve (LDLT); throws unless the relative residual is <= 1e-10.
Eigen::VectorXd solve_linear(const SpMat& K, const Eigen::VectorXd& f);

// Convenience driver: assemble, load, constrain, solve; returns the
// full-length displacement vector.
struct SolveResult {
    Eigen::VectorXd d;
    AssemblyResult assembly;
};
SolveResult solve_problem(const PolygonMesh& mesh, Formulation form, const Material& mat,
                          const DofMap& dofs, const LoadCase& load);

} // namespace polyelast
