#include "polyelast/solver.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace polyelast {

DofMap::DofMap(const PolygonMesh& mesh, int order) {
    order_ = order;
    n_mesh_nodes_ = static_cast<int>(mesh.nodes.size());
    int next = n_mesh_nodes_;
    if (order > 1) {
        const Eigen::VectorXd lob = lobatto_nodes_1d(order);
        for (size_t e = 0; e < mesh.elements.size(); ++e) {
            const auto& elem = mesh.elements[e];
            const size_t n = elem.size();
            const bool tip = mesh.is_tip_element(static_cast<int>(e));
            for (size_t i = 0; i < n; ++i) {
                if (tip && i + 1 == n) break;
                const int a = elem[i];
                const int b = elem[(i + 1) % n];
                const auto key = std::minmax(a, b);
                if (edge_interior_.count({key.first, key.second})) continue;
                std::vector<int> interior;
                const Vec2 pa = mesh.nodes[static_cast<size_t>(key.first)];
                const Vec2 pb = mesh.nodes[static_cast<size_t>(key.second)];
                for (int k = 1; k < order; ++k) {
                    const double t = 0.5 * (lob[k] + 1.0);
                    extra_coords_.push_back(pa + t * (pb - pa));
                    interior.push_back(next++);
                }
                edge_interior_[{key.first, key.second}] = interior;
            }
        }
    }
    n_points_ = next;
    total_dofs_ = 2 * n_points_;
}

std::vector<int> DofMap::element_points(const PolygonMesh& mesh, int e) const {
    const auto& elem = mesh.elements[static_cast<size_t>(e)];
    const size_t n = elem.size();
    const bool tip = mesh.is_tip_element(e);
    std::vector<int> pts;
    for (size_t i = 0; i < n; ++i) {
        pts.push_back(elem[i]);
        if (tip && i + 1 == n) break;
        if (order_ > 1) {
            const int a = elem[i];
            const int b = elem[(i + 1) % n];
            const auto key = std::minmax(a, b);
            const auto& interior = edge_interior_.at({key.first, key.second});
            if (a <= b)
                pts.insert(pts.end(), interior.begin(), interior.end());
            else
                pts.insert(pts.end(), interior.rbegin(), interior.rend());
        }
    }
    return pts;
}

std::vector<int> DofMap::edge_points(int from, int to) const {
    std::vector<int> pts = {from};
    if (order_ > 1) {
        const auto key = std::minmax(from, to);
        const auto& interior = edge_interior_.at({key.first, key.second});
        if (from <= to)
            pts.insert(pts.end(), interior.begin(), interior.end());
        else
            pts.insert(pts.end(), interior.rbegin(), interior.rend());
    }
    pts.push_back(to);
    return pts;
}

Vec2 DofMap::point_coord(const PolygonMesh& mesh, int point) const {
    if (point < n_mesh_nodes_) return mesh.nodes[static_cast<size_t>(point)];
    return extra_coords_[static_cast<size_t>(point - n_mesh_nodes_)];
}

namespace {

struct ElementWork {
    Eigen::MatrixXd K;
    std::vector<int> dofs;
    SbfemModalData modal;
    bool has_modal = false;
};

ElementWork compute_element(const PolygonMesh& mesh, int e, Formulation form, const Material& mat,
                            const DofMap& dofs, const TriangleRule& rule) {
    ElementWork w;
    const std::vector<int> pts = dofs.element_points(mesh, e);
    w.dofs.reserve(2 * pts.size());
    for (int p : pts) {
        w.dofs.push_back(dofs.dof_x(p));
        w.dofs.push_back(dofs.dof_y(p));
    }
    switch (form) {
        case Formulation::PolyFem:
            if (mesh.is_tip_element(e))
                throw std::runtime_error("polyfem cannot handle crack-tip elements");
            w.K = stiffness_polyfem(mesh.element_polygon(e), mat, rule);
            break;
        case Formulation::NSfem:
            if (mesh.is_tip_element(e))
                throw std::runtime_error("nsfem cannot handle crack-tip elements");
            w.K = stiffness_nsfem(mesh.element_polygon(e), mat);
            break;
        case Formulation::Sbfem: {
            const bool tip = mesh.is_tip_element(e);
            const SbfemGeometry geom =
                make_sbfem_geometry(mesh.element_polygon(e), mesh.scaling_center(e), dofs.order(),
                                    !tip);
            w.modal = sbfem_solve_element(geom, mat);
            w.K = stiffness_sbfem(w.modal);
            w.has_modal = true;
            break;
        }
    }
    if (w.K.rows() != static_cast<long>(w.dofs.size()))
        throw std::runtime_error("assemble_global: element dof mismatch");
    return w;
}

} // namespace

AssemblyResult assemble_global(const PolygonMesh& mesh, Formulation form, const Material& mat,
                               const DofMap& dofs, bool parallel) {
    const int ne = static_cast<int>(mesh.elements.size());
    const TriangleRule rule = dunavant_triangle(6);

    std::vector<ElementWork> work(static_cast<size_t>(ne));
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int e = 0; e < ne; ++e) {
        try {
            work[static_cast<size_t>(e)] = compute_element(mesh, e, form, mat, dofs, rule);
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) {
        try {
            std::rethrow_exception(err);
        } catch (const std::exception& ex) {
            throw std::runtime_error(std::string("assemble_global: ") + ex.what());
        }
    }

    // Deterministic merge: stable-sort all triplets by (row, col) and add in
    // that order, independent of the thread schedule.
    std::vector<Eigen::Triplet<double>> trips;
    size_t count = 0;
    for (const auto& w : work) count += w.dofs.size() * w.dofs.size();
    trips.reserve(count);
    for (const auto& w : work) {
        const int n = static_cast<int>(w.dofs.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                trips.emplace_back(w.dofs[static_cast<size_t>(i)], w.dofs[static_cast<size_t>(j)],
                                   w.K(i, j));
    }
    std::stable_sort(trips.begin(), trips.end(), [](const auto& a, const auto& b) {
        return a.row() != b.row() ? a.row() < b.row() : a.col() < b.col();
    });

    AssemblyResult res;
    res.K.resize(dofs.total_dofs(), dofs.total_dofs());
    res.K.setFromTriplets(trips.begin(), trips.end());
    res.element_K.reserve(work.size());
    res.element_dofs.reserve(work.size());
    for (auto& w : work) {
        res.element_K.push_back(std::move(w.K));
        res.element_dofs.push_back(std::move(w.dofs));
        if (w.has_modal) res.modal.push_back(std::move(w.modal));
    }
    return res;
}

Eigen::VectorXd apply_loads(const PolygonMesh& mesh, const DofMap& dofs, const LoadCase& load,
                            Formulation form) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(dofs.total_dofs());
    const QuadratureRule1D gauss = gauss_legendre_1d(4);
    const int shape_order = form == Formulation::Sbfem ? dofs.order() : 1;

    for (const EdgeTraction& tr : load.tractions) {
        if (tr.boundary_edge < 0 ||
            tr.boundary_edge >= static_cast<int>(mesh.boundary_edges.size()))
            throw std::invalid_argument("apply_loads: traction on a non-boundary edge");
        const auto& be = mesh.boundary_edges[static_cast<size_t>(tr.boundary_edge)];
        const std::vector<int> pts =
            shape_order > 1 ? dofs.edge_points(be[0], be[1]) : std::vector<int>{be[0], be[1]};
        const Vec2 pa = mesh.nodes[static_cast<size_t>(be[0])];
        const Vec2 pb = mesh.nodes[static_cast<size_t>(be[1])];
        const double len = (pb - pa).norm();
        for (long q = 0; q < gauss.points.size(); ++q) {
            const double eta = gauss.points[q];
            const Shape1D sh = lagrange_shape_1d(shape_order, eta);
            // Straight edge: affine geometry, |J| = len / 2.
            const Vec2 x = pa + 0.5 * (eta + 1.0) * (pb - pa);
            const Vec2 t = tr.traction(x);
            for (size_t i = 0; i < pts.size(); ++i) {
                f[dofs.dof_x(pts[i])] += sh.values[static_cast<long>(i)] * t.x() * gauss.weights[q] * len / 2.0;
                f[dofs.dof_y(pts[i])] += sh.values[static_cast<long>(i)] * t.y() * gauss.weights[q] * len / 2.0;
            }
        }
    }

    if (load.body_force) {
        if (form == Formulation::Sbfem)
            throw std::invalid_argument("apply_loads: body force unsupported for sbfem");
        const TriangleRule rule = dunavant_triangle(6);
        for (size_t e = 0; e < mesh.elements.size(); ++e) {
            const Polygon poly = mesh.element_polygon(static_cast<int>(e));
            const Vec2 apex = polygon_centroid(poly);
            const auto& elem = mesh.elements[e];
            const size_t n = elem.size();
            for (size_t i = 0; i < n; ++i) {
                const Vec2& a = poly[i];
                const Vec2& b = poly[(i + 1) % n];
                const double area2 = cross2(a - apex, b - apex);
                for (long q = 0; q < rule.weights.size(); ++q) {
                    const Eigen::Vector3d& l = rule.bary[static_cast<size_t>(q)];
                    const Vec2 x = l[0] * apex + l[1] * a + l[2] * b;
                    const Vec2 bf = load.body_force(x);
                    const ShapeEval sh = form == Formulation::PolyFem
                                             ? laplace_shape(x, poly)
                                             : ShapeEval{};
                    for (size_t k = 0; k < n; ++k) {
                        const double N = form == Formulation::PolyFem
                                             ? sh.values[static_cast<long>(k)]
                                             : 1.0 / static_cast<double>(n);
                        f[dofs.dof_x(elem[k])] += N * bf.x() * rule.weights[q] * area2;
                        f[dofs.dof_y(elem[k])] += N * bf.y() * rule.weights[q] * area2;
                    }
                }
            }
        }
    }
    return f;
}

Eigen::VectorXd ReducedSystem::recover(const Eigen::VectorXd& d_reduced) const {
    Eigen::VectorXd full = prescribed;
    for (size_t i = 0; i < free_dofs.size(); ++i)
        full[free_dofs[i]] = d_reduced[static_cast<long>(i)];
    return full;
}

ReducedSystem apply_essential_bc(const SpMat& K, const Eigen::VectorXd& f,
                                 const std::vector<std::pair<int, double>>& constraints) {
    const int n = static_cast<int>(K.rows());
    std::vector<char> fixed(static_cast<size_t>(n), 0);
    Eigen::VectorXd ubar = Eigen::VectorXd::Zero(n);
    for (const auto& [dof, val] : constraints) {
        if (dof < 0 || dof >= n) throw std::invalid_argument("apply_essential_bc: dof out of range");
        if (fixed[static_cast<size_t>(dof)] && ubar[dof] != val)
            throw std::invalid_argument("apply_essential_bc: conflicting constraints on dof " +
                                        std::to_string(dof));
        fixed[static_cast<size_t>(dof)] = 1;
        ubar[dof] = val;
    }

    ReducedSystem red;
    std::vector<int> new_index(static_cast<size_t>(n), -1);
    for (int i = 0; i < n; ++i)
        if (!fixed[static_cast<size_t>(i)]) {
            new_index[static_cast<size_t>(i)] = static_cast<int>(red.free_dofs.size());
            red.free_dofs.push_back(i);
        }
    red.prescribed = ubar;

    const int m = static_cast<int>(red.free_dofs.size());
    red.f.resize(m);
    for (int i = 0; i < m; ++i) red.f[i] = f[red.free_dofs[static_cast<size_t>(i)]];

    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<size_t>(K.nonZeros()));
    for (int k = 0; k < K.outerSize(); ++k) {
        for (SpMat::InnerIterator it(K, k); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            if (fixed[static_cast<size_t>(r)]) continue;
            if (fixed[static_cast<size_t>(c)]) {
                if (ubar[c] != 0.0) red.f[new_index[static_cast<size_t>(r)]] -= it.value() * ubar[c];
            } else {
                trips.emplace_back(new_index[static_cast<size_t>(r)], new_index[static_cast<size_t>(c)],
                                   it.value());
            }
        }
    }
    red.K.resize(m, m);
    red.K.setFromTriplets(trips.begin(), trips.end());
    return red;
}

Eigen::VectorXd solve_linear(const SpMat& K, const Eigen::VectorXd& f) {
    if (K.rows() == 0) return Eigen::VectorXd();
    Eigen::SimplicialLDLT<SpMat> ldlt(K);
    if (ldlt.info() != Eigen::Success)
        throw std::runtime_error("solve_linear: factorization failed (insufficient constraints?)");
    Eigen::VectorXd d = ldlt.solve(f);
    // One refinement step, then enforce the residual contract.
    Eigen::VectorXd r = f - K * d;
    d += ldlt.solve(r);
    r = f - K * d;
    const double fn = f.norm();
    if (fn > 0.0 && r.norm() / fn > 1e-10)
        throw std::runtime_error("solve_linear: relative residual exceeds 1e-10");
    return d;
}

SolveResult solve_problem(const PolygonMesh& mesh, Formulation form, const Material& mat,
                          const DofMap& dofs, const LoadCase& load) {
    SolveResult out;
    out.assembly = assemble_global(mesh, form, mat, dofs);
    const Eigen::VectorXd f = apply_loads(mesh, dofs, load, form);
    const ReducedSystem red = apply_essential_bc(out.assembly.K, f, load.essential);
    const Eigen::VectorXd dr = solve_linear(red.K, red.f);
    out.d = red.recover(dr);
    return out;
}

} // namespace polyelast
