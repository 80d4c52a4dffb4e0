#include "polyelast/solver.hpp"
#include "polyelast/voronoi.hpp"

#include "doctest.h"

#include <cmath>
#include <numeric>

using namespace polyelast;

namespace {

const Material kUnit{1.0, 0.3, PlaneMode::Stress};

PolygonMesh two_squares() {
    PolygonMesh mesh;
    mesh.nodes = {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}};
    mesh.elements = {{0, 1, 4, 5}, {1, 2, 3, 4}};
    mesh.boundary_edges = {{0, 1, 0}, {1, 2, 0}, {2, 3, 1}, {3, 4, 2}, {4, 5, 2}, {5, 0, 3}};
    return mesh;
}

PolygonMesh voronoi_square(int n, std::uint64_t seed, int lloyd = 40) {
    Domain dom;
    dom.outer = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    Rng rng(seed);
    return generate_voronoi_mesh(dom, random_seeds(dom, n, rng), lloyd);
}

Eigen::VectorXd global_pattern(const PolygonMesh& mesh, const DofMap& dofs,
                               const std::function<Vec2(const Vec2&)>& field) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dofs.total_dofs());
    for (int p = 0; p < dofs.n_points(); ++p) {
        const Vec2 u = field(dofs.point_coord(mesh, p));
        v[dofs.dof_x(p)] = u.x();
        v[dofs.dof_y(p)] = u.y();
    }
    return v;
}

} // namespace

TEST_CASE("assembly: single element equals its element matrix") {
    PolygonMesh mesh;
    mesh.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    mesh.elements = {{0, 1, 2, 3}};
    mesh.boundary_edges = {{0, 1, 0}, {1, 2, 1}, {2, 3, 2}, {3, 0, 3}};
    const DofMap dofs(mesh, 1);
    const AssemblyResult res = assemble_global(mesh, Formulation::PolyFem, kUnit, dofs);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(res.K);
    CHECK((dense - res.element_K[0]).norm() <= 1e-15 * dense.norm());
}

TEST_CASE("assembly: shared dofs accumulate both contributions") {
    const PolygonMesh mesh = two_squares();
    const DofMap dofs(mesh, 1);
    const AssemblyResult res = assemble_global(mesh, Formulation::NSfem, kUnit, dofs);
    const Eigen::MatrixXd dense = Eigen::MatrixXd(res.K);

    // Node 1 belongs to both squares; its diagonal is the sum of both
    // element diagonal blocks.
    const double k0 = res.element_K[0](2, 2);  // node 1 is local 1 in element 0
    const double k1 = res.element_K[1](0, 0);  // node 1 is local 0 in element 1
    CHECK(dense(2, 2) == doctest::Approx(k0 + k1).epsilon(1e-14));
    CHECK((dense - dense.transpose()).norm() <= 1e-12 * dense.norm());
}

TEST_CASE("assembly: rigid-body null space of the free-floating mesh") {
    const PolygonMesh mesh = voronoi_square(25, 6);
    Vec2 c = Vec2::Zero();
    for (const Vec2& p : mesh.nodes) c += p;
    c /= static_cast<double>(mesh.nodes.size());
    for (Formulation form : {Formulation::PolyFem, Formulation::NSfem, Formulation::Sbfem}) {
        const DofMap dofs(mesh, 1);
        const AssemblyResult res = assemble_global(mesh, form, kUnit, dofs);
        const double knorm = Eigen::MatrixXd(res.K).norm();
        const Eigen::VectorXd tx =
            global_pattern(mesh, dofs, [](const Vec2&) { return Vec2(1.0, 0.0); });
        const Eigen::VectorXd ty =
            global_pattern(mesh, dofs, [](const Vec2&) { return Vec2(0.0, 1.0); });
        const Eigen::VectorXd rot = global_pattern(
            mesh, dofs, [&](const Vec2& p) { return Vec2(-(p.y() - c.y()), p.x() - c.x()); });
        CHECK((res.K * tx).norm() <= 1e-7 * knorm);
        CHECK((res.K * ty).norm() <= 1e-7 * knorm);
        CHECK((res.K * rot).norm() <= 1e-7 * knorm * rot.norm());
    }
}

TEST_CASE("assembly: serial and parallel paths are bitwise identical") {
    const PolygonMesh mesh = voronoi_square(60, 9);
    for (Formulation form : {Formulation::PolyFem, Formulation::NSfem, Formulation::Sbfem}) {
        const DofMap dofs(mesh, 1);
        const AssemblyResult serial = assemble_global(mesh, form, kUnit, dofs, false);
        const AssemblyResult parallel = assemble_global(mesh, form, kUnit, dofs, true);
        REQUIRE(serial.K.nonZeros() == parallel.K.nonZeros());
        for (long i = 0; i < serial.K.nonZeros(); ++i)
            CHECK(serial.K.valuePtr()[i] == parallel.K.valuePtr()[i]);
    }
}

TEST_CASE("apply_loads: constant traction lumps half per end node") {
    PolygonMesh mesh;
    mesh.nodes = {{0, 0}, {2, 0}, {2, 1}, {0, 1}};
    mesh.elements = {{0, 1, 2, 3}};
    mesh.boundary_edges = {{0, 1, 0}, {1, 2, 1}, {2, 3, 2}, {3, 0, 3}};
    const DofMap dofs(mesh, 1);
    LoadCase load;
    load.tractions.push_back({2, [](const Vec2&) { return Vec2(0.0, 3.0); }}); // top edge, len 2
    const Eigen::VectorXd f = apply_loads(mesh, dofs, load, Formulation::PolyFem);
    CHECK(f[dofs.dof_y(2)] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(f[dofs.dof_y(3)] == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(f.sum() == doctest::Approx(6.0).epsilon(1e-13));

    LoadCase bad;
    bad.tractions.push_back({99, [](const Vec2&) { return Vec2(); }});
    CHECK_THROWS(apply_loads(mesh, dofs, bad, Formulation::PolyFem));
}

TEST_CASE("apply_loads: parabolic shear resultant equals the applied load") {
    // Edge x = L of the cantilever with the exact shear profile.
    const double P = 150.0, D = 2.0, I = D * D * D / 12.0;
    PolygonMesh mesh;
    mesh.nodes = {{10, -1}, {10, -0.25}, {10, 0.4}, {10, 1}};
    mesh.elements = {{0, 1, 2, 3}}; // placeholder, only edges are used
    mesh.boundary_edges = {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}};
    const DofMap dofs(mesh, 1);
    LoadCase load;
    for (int e = 0; e < 3; ++e)
        load.tractions.push_back({e, [&](const Vec2& x) {
                                      return Vec2(0.0, -P / (2.0 * I) * (D * D / 4.0 - x.y() * x.y()));
                                  }});
    const Eigen::VectorXd f = apply_loads(mesh, dofs, load, Formulation::PolyFem);
    double fy = 0.0;
    for (int p = 0; p < dofs.n_points(); ++p) fy += f[dofs.dof_y(p)];
    CHECK(fy == doctest::Approx(-P).epsilon(1e-10));
}

TEST_CASE("apply_loads: sbfem higher-order edges get consistent loads") {
    PolygonMesh mesh;
    mesh.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    mesh.elements = {{0, 1, 2, 3}};
    mesh.boundary_edges = {{0, 1, 0}, {1, 2, 1}, {2, 3, 2}, {3, 0, 3}};
    const DofMap dofs(mesh, 2);
    LoadCase load;
    load.tractions.push_back({2, [](const Vec2&) { return Vec2(0.0, 1.0); }}); // top edge
    const Eigen::VectorXd f = apply_loads(mesh, dofs, load, Formulation::Sbfem);
    // 1D consistent load of a quadratic element under unit traction: 1/6, 2/3, 1/6.
    const std::vector<int> pts = dofs.edge_points(2, 3);
    REQUIRE(pts.size() == 3);
    CHECK(f[dofs.dof_y(pts[0])] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(f[dofs.dof_y(pts[1])] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(f[dofs.dof_y(pts[2])] == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("essential bc elimination and recovery") {
    const PolygonMesh mesh = voronoi_square(16, 12);
    const DofMap dofs(mesh, 1);
    const AssemblyResult asmb = assemble_global(mesh, Formulation::PolyFem, kUnit, dofs);
    const int n = dofs.total_dofs();

    SUBCASE("all dofs constrained returns the prescribed values") {
        std::vector<std::pair<int, double>> cons;
        for (int i = 0; i < n; ++i) cons.push_back({i, 0.01 * i});
        const ReducedSystem red = apply_essential_bc(asmb.K, Eigen::VectorXd::Zero(n), cons);
        CHECK(red.free_dofs.empty());
        const Eigen::VectorXd d = red.recover(solve_linear(red.K, red.f));
        for (int i = 0; i < n; ++i) CHECK(d[i] == doctest::Approx(0.01 * i));
    }

    SUBCASE("three pins make the reduced matrix positive definite") {
        std::vector<std::pair<int, double>> cons = {{0, 0.0}, {1, 0.0}, {3, 0.0}};
        const ReducedSystem red = apply_essential_bc(asmb.K, Eigen::VectorXd::Zero(n), cons);
        Eigen::SimplicialLLT<SpMat> chol(red.K);
        CHECK(chol.info() == Eigen::Success);
    }

    SUBCASE("conflicting constraints are rejected, duplicates allowed") {
        CHECK_THROWS(apply_essential_bc(asmb.K, Eigen::VectorXd::Zero(n), {{0, 0.0}, {0, 1.0}}));
        CHECK_NOTHROW(apply_essential_bc(asmb.K, Eigen::VectorXd::Zero(n), {{0, 1.0}, {0, 1.0}}));
    }

    SUBCASE("reactions equal K*u on the constrained rows") {
        // Prescribe one dof, no loads; fix three more to remove rigid modes.
        std::vector<std::pair<int, double>> cons = {{0, 0.5}, {1, 0.0}, {2, 0.0}, {5, 0.0}};
        const ReducedSystem red = apply_essential_bc(asmb.K, Eigen::VectorXd::Zero(n), cons);
        const Eigen::VectorXd d = red.recover(solve_linear(red.K, red.f));
        const Eigen::VectorXd reactions = asmb.K * d;
        for (int i : {3, 4, 6, 7}) CHECK(std::abs(reactions[i]) < 1e-10 * reactions.norm());
    }
}

TEST_CASE("solve_linear basics") {
    SpMat I(4, 4);
    I.setIdentity();
    const Eigen::VectorXd f = Eigen::Vector4d(1, 2, 3, 4);
    CHECK((solve_linear(I, f) - f).norm() == 0.0);

    // Random SPD system via A^T A + I.
    Rng rng(3);
    Eigen::MatrixXd A(50, 50);
    for (int i = 0; i < 50; ++i)
        for (int j = 0; j < 50; ++j) A(i, j) = rng.uniform(-1, 1);
    const Eigen::MatrixXd S = A.transpose() * A + Eigen::MatrixXd::Identity(50, 50);
    SpMat K = S.sparseView();
    Eigen::VectorXd b(50);
    for (int i = 0; i < 50; ++i) b[i] = rng.uniform(-1, 1);
    const Eigen::VectorXd x = solve_linear(K, b);
    CHECK((K * x - b).norm() <= 1e-12 * b.norm());

    // Indefinite (under-constrained) system is rejected.
    const PolygonMesh mesh = voronoi_square(9, 2);
    const DofMap dofs(mesh, 1);
    const AssemblyResult asmb = assemble_global(mesh, Formulation::PolyFem, kUnit, dofs);
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(dofs.total_dofs());
    Eigen::VectorXd load = zero;
    load[0] = 1.0;
    CHECK_THROWS(solve_linear(asmb.K, load)); // floating structure
}

TEST_CASE("solution invariant under node renumbering") {
    const PolygonMesh mesh = voronoi_square(20, 21);
    // Simple tension problem: clamp bottom, pull top.
    auto solve_case = [](const PolygonMesh& m) {
        const DofMap dofs(m, 1);
        LoadCase load;
        for (size_t i = 0; i < m.boundary_edges.size(); ++i) {
            const auto& be = m.boundary_edges[i];
            if (be[2] == kBoundaryTop)
                load.tractions.push_back({static_cast<int>(i), [](const Vec2&) { return Vec2(0, 1); }});
        }
        for (size_t nd = 0; nd < m.nodes.size(); ++nd)
            if (std::abs(m.nodes[nd].y()) < 1e-12) {
                load.essential.push_back({dofs.dof_x(static_cast<int>(nd)), 0.0});
                load.essential.push_back({dofs.dof_y(static_cast<int>(nd)), 0.0});
            }
        return solve_problem(m, Formulation::PolyFem, kUnit, dofs, load).d;
    };
    const Eigen::VectorXd d_orig = solve_case(mesh);

    // Permute nodes deterministically and remap all references.
    const int nn = static_cast<int>(mesh.nodes.size());
    std::vector<int> perm(static_cast<size_t>(nn));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(5);
    for (int i = nn - 1; i > 0; --i)
        std::swap(perm[static_cast<size_t>(i)], perm[rng.next_u64() % static_cast<size_t>(i + 1)]);
    PolygonMesh shuffled;
    shuffled.nodes.resize(mesh.nodes.size());
    for (int i = 0; i < nn; ++i) shuffled.nodes[static_cast<size_t>(perm[static_cast<size_t>(i)])] = mesh.nodes[static_cast<size_t>(i)];
    for (const auto& elem : mesh.elements) {
        std::vector<int> e2;
        for (int idx : elem) e2.push_back(perm[static_cast<size_t>(idx)]);
        shuffled.elements.push_back(e2);
    }
    for (const auto& be : mesh.boundary_edges)
        shuffled.boundary_edges.push_back({perm[static_cast<size_t>(be[0])], perm[static_cast<size_t>(be[1])], be[2]});

    const Eigen::VectorXd d_perm = solve_case(shuffled);
    double max_diff = 0.0;
    for (int i = 0; i < nn; ++i) {
        max_diff = std::max(max_diff, std::abs(d_orig[2 * i] - d_perm[2 * perm[static_cast<size_t>(i)]]));
        max_diff = std::max(max_diff, std::abs(d_orig[2 * i + 1] - d_perm[2 * perm[static_cast<size_t>(i)] + 1]));
    }
    CHECK(max_diff < 1e-10 * d_orig.cwiseAbs().maxCoeff());
}

TEST_CASE("dofmap: order-2 edge points and crack double nodes") {
    const PolygonMesh mesh = two_squares();
    const DofMap d1(mesh, 1);
    CHECK(d1.total_dofs() == 12);
    const DofMap d2(mesh, 2);
    CHECK(d2.total_dofs() == 12 + 2 * 7); // 7 unique edges

    const std::vector<int> pts = d2.element_points(mesh, 0);
    CHECK(pts.size() == 8);
    // Interior point of edge (1,4) shared between both elements.
    const std::vector<int> e14 = d2.edge_points(1, 4);
    const std::vector<int> e41 = d2.edge_points(4, 1);
    REQUIRE(e14.size() == 3);
    CHECK(e14[1] == e41[1]);
    CHECK((d2.point_coord(mesh, e14[1]) - Vec2(1.0, 0.5)).norm() < 1e-14);
}
