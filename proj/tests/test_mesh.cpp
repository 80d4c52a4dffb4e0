#include "polyelast/mesh.hpp"
#include "polyelast/voronoi.hpp"

#include "doctest.h"

#include <cmath>
#include <set>

using namespace polyelast;

namespace {

// Structured triangulation of the unit square, nx x ny cells split into two
// CCW triangles each.
void structured_triangulation(int nx, int ny, std::vector<Vec2>& nodes,
                              std::vector<std::array<int, 3>>& tris) {
    nodes.clear();
    tris.clear();
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            nodes.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / ny});
    auto id = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
}

} // namespace

TEST_CASE("validate_mesh accepts a hand-built square pair") {
    PolygonMesh mesh;
    mesh.nodes = {{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}};
    mesh.elements = {{0, 1, 4, 5}, {1, 2, 3, 4}};
    mesh.boundary_edges = {{0, 1, 0}, {1, 2, 0}, {2, 3, 1}, {3, 4, 2}, {4, 5, 2}, {5, 0, 3}};
    const ValidationReport rep = validate_mesh(mesh);
    CHECK(rep.ok());
}

TEST_CASE("validate_mesh flags broken meshes") {
    PolygonMesh mesh;
    mesh.nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    mesh.elements = {{0, 1, 2, 3}};
    mesh.boundary_edges = {{0, 1, 0}, {1, 2, 0}, {2, 3, 0}, {3, 0, 0}};
    CHECK(validate_mesh(mesh).ok());

    PolygonMesh cw = mesh;
    std::reverse(cw.elements[0].begin(), cw.elements[0].end());
    CHECK_FALSE(validate_mesh(cw).elements[0].ccw);

    PolygonMesh bad_idx = mesh;
    bad_idx.elements[0][0] = 9;
    CHECK_FALSE(validate_mesh(bad_idx).ok());

    PolygonMesh open_edge = mesh;
    open_edge.boundary_edges.pop_back(); // edge (3,0) used once but not declared
    CHECK_FALSE(validate_mesh(open_edge).edges_conforming);
}

TEST_CASE("star convexity report on concave polygons") {
    // L-shaped polygon whose centroid is outside the kernel.
    const Polygon ell = {{0, 0}, {4, 0}, {4, 1}, {1, 1}, {1, 4}, {0, 4}};
    const Vec2 centroid = polygon_centroid(ell);
    CHECK_FALSE(polygon_is_star_convex(ell, centroid));

    // The kernel (bottom-left square) still contains valid centers.
    const Polygon kernel = polygon_kernel(ell);
    REQUIRE(!kernel.empty());
    const Vec2 kc = polygon_centroid(kernel);
    CHECK(polygon_is_star_convex(ell, kc));

    // Convex polygons are star-convex about their centroid.
    const Polygon hexa = {{1, 0}, {0.5, 0.9}, {-0.5, 0.9}, {-1, 0}, {-0.5, -0.9}, {0.5, -0.9}};
    CHECK(polygon_is_star_convex(hexa, polygon_centroid(hexa)));

    PolygonMesh mesh;
    mesh.nodes.assign(ell.begin(), ell.end());
    mesh.elements = {{0, 1, 2, 3, 4, 5}};
    for (int i = 0; i < 6; ++i) mesh.boundary_edges.push_back({i, (i + 1) % 6, 0});
    CHECK_FALSE(validate_mesh(mesh).elements[0].star_convex);
}

TEST_CASE("dual mesh of a two-triangle square") {
    std::vector<Vec2> nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 2, 3}};
    const PolygonMesh dual = dual_polygon_mesh(nodes, tris);
    CHECK(dual.elements.size() == 4); // one polygon per corner node
    CHECK(dual.total_area() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(validate_mesh(dual).ok());
}

TEST_CASE("dual mesh of a structured grid has hexagonal interior cells") {
    std::vector<Vec2> nodes;
    std::vector<std::array<int, 3>> tris;
    structured_triangulation(4, 4, nodes, tris);
    const PolygonMesh dual = dual_polygon_mesh(nodes, tris);
    CHECK(dual.elements.size() == nodes.size());
    CHECK(dual.total_area() == doctest::Approx(1.0).epsilon(1e-13));

    // Interior nodes have 6 incident triangles -> hexagonal dual cells
    // (elements are emitted in node order).
    for (size_t e = 0; e < dual.elements.size(); ++e)
        CHECK(polygon_area(dual.element_polygon(static_cast<int>(e))) > 0.0);
    for (int j = 1; j < 4; ++j)
        for (int i = 1; i < 4; ++i)
            CHECK(dual.elements[static_cast<size_t>(j * 5 + i)].size() == 6);
    CHECK(validate_mesh(dual).ok());
}

TEST_CASE("dual mesh rejects non-conforming input") {
    std::vector<Vec2> nodes = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<std::array<int, 3>> tris = {{0, 1, 2}, {0, 1, 3}}; // edge (0,1) used twice same way
    CHECK_THROWS(dual_polygon_mesh(nodes, tris));
    std::vector<std::array<int, 3>> cw = {{0, 2, 1}};
    CHECK_THROWS(dual_polygon_mesh(nodes, cw));
}

TEST_CASE("conform_to_crack duplicates path nodes and keeps area") {
    // Mirrored mesh on [0,2]x[-1,1] with the crack from (0,0) to (1,0).
    Domain dom;
    dom.outer = {{0, -1}, {2, -1}, {2, 1}, {0, 1}};
    const Vec2 tip(1.0, 0.0);
    std::vector<Vec2> seeds = {tip, Vec2(1.6, 0.0)};
    VoronoiOptions opts;
    opts.fixed_seeds = {0, 1};
    opts.lloyd_iterations = 12;
    Rng rng(5);
    for (int i = 0; i < 12; ++i) {
        const Vec2 u(rng.uniform(0.05, 1.95), rng.uniform(0.1, 0.9));
        const int base = static_cast<int>(seeds.size());
        seeds.push_back(u);
        seeds.push_back({u.x(), -u.y()});
        opts.mirrored_pairs.push_back({base, base + 1});
    }
    const PolygonMesh mesh = generate_voronoi_mesh(dom, seeds, opts);
    const double area_before = mesh.total_area();

    int on_path = 0;
    for (const Vec2& p : mesh.nodes)
        if (std::abs(p.y()) < 1e-9 && p.x() < 1.0 - 1e-9) ++on_path;
    REQUIRE(on_path >= 2);

    const ConformResult res = conform_to_crack(mesh, tip, Vec2(0.0, 0.0));
    CHECK(res.mesh.nodes.size() == mesh.nodes.size() + static_cast<size_t>(res.doubled_nodes.size()));
    CHECK(static_cast<int>(res.doubled_nodes.size()) == on_path);
    CHECK(res.mesh.total_area() == doctest::Approx(area_before).epsilon(1e-14));
    CHECK(res.mesh.cracks.size() == 1);
    CHECK(res.mesh.cracks[0].tip_element >= 0);
    CHECK(validate_mesh(res.mesh).ok());

    // Tip polygon is an open chain with coincident first/last nodes and is
    // star-convex about the tip.
    const auto& chain = res.mesh.elements[static_cast<size_t>(res.mesh.cracks[0].tip_element)];
    const Vec2 first = res.mesh.nodes[static_cast<size_t>(chain.front())];
    const Vec2 last = res.mesh.nodes[static_cast<size_t>(chain.back())];
    CHECK((first - last).norm() < 1e-12);
    CHECK(chain.front() != chain.back());
    CHECK(polygon_is_star_convex(res.mesh.element_polygon(res.mesh.cracks[0].tip_element), tip));

    // Tip on an edge or vertex is rejected.
    CHECK_THROWS(conform_to_crack(mesh, mesh.nodes[static_cast<size_t>(mesh.elements[0][0])],
                                  Vec2(0.0, 0.0)));
}

TEST_CASE("subdivide_tip_edges keeps conformity") {
    Domain dom;
    dom.outer = {{0, -1}, {2, -1}, {2, 1}, {0, 1}};
    const Vec2 tip(1.0, 0.0);
    std::vector<Vec2> seeds = {tip, Vec2(1.5, 0.0)};
    VoronoiOptions opts;
    opts.fixed_seeds = {0, 1};
    opts.lloyd_iterations = 10;
    Rng rng(9);
    for (int i = 0; i < 10; ++i) {
        const Vec2 u(rng.uniform(0.05, 1.95), rng.uniform(0.1, 0.9));
        const int base = static_cast<int>(seeds.size());
        seeds.push_back(u);
        seeds.push_back({u.x(), -u.y()});
        opts.mirrored_pairs.push_back({base, base + 1});
    }
    PolygonMesh mesh = generate_voronoi_mesh(dom, seeds, opts);
    ConformResult res = conform_to_crack(mesh, tip, Vec2(0.0, 0.0));
    const int tip_e = res.mesh.cracks[0].tip_element;
    const size_t chain_before = res.mesh.elements[static_cast<size_t>(tip_e)].size();
    const double area_before = res.mesh.total_area();

    subdivide_tip_edges(res.mesh, tip_e, 4);
    CHECK(res.mesh.elements[static_cast<size_t>(tip_e)].size() == 4 * (chain_before - 1) + 1);
    CHECK(res.mesh.total_area() == doctest::Approx(area_before).epsilon(1e-14));
    CHECK(validate_mesh(res.mesh).ok());
}

TEST_CASE("mesh json round trip") {
    Domain dom;
    dom.outer = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    Rng rng(3);
    const PolygonMesh mesh = generate_voronoi_mesh(dom, random_seeds(dom, 12, rng), 5);
    const std::string text = mesh_to_json(mesh);
    const PolygonMesh back = mesh_from_json(text);
    REQUIRE(back.nodes.size() == mesh.nodes.size());
    REQUIRE(back.elements == mesh.elements);
    REQUIRE(back.boundary_edges.size() == mesh.boundary_edges.size());
    for (size_t i = 0; i < mesh.nodes.size(); ++i)
        CHECK((back.nodes[i] - mesh.nodes[i]).norm() == 0.0); // bit-exact round trip
    CHECK(mesh_to_json(back) == text);
}

TEST_CASE("domain validation") {
    Domain dom;
    dom.outer = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    dom.holes.push_back({Vec2(3.0, 3.0), 0.2});
    CHECK_THROWS(dom.validate()); // hole outside the plate
    dom.holes[0] = {Vec2(0.5, 0.5), 0.0};
    CHECK_THROWS(dom.validate()); // non-positive radius
    dom.holes[0] = {Vec2(0.5, 0.5), 0.2};
    CHECK_NOTHROW(dom.validate());
}
