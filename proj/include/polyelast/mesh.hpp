#pragma once

#include "polyelast/geometry.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace polyelast {

/// Crack terminating at `tip` inside element `tip_element`. `mouth` is the
/// other end of the crack line (domain/hole boundary, or the opposite tip of
/// an internal crack). `crack_angle` is the angle of the crack prolongation
/// ray (mouth -> tip direction) from the positive x-axis.
struct CrackDescriptor {
    Vec2 tip;
    Vec2 mouth;
    int tip_element = -1;
    double crack_angle = 0.0;
};

/// Polygonal mesh. Elements are CCW node-index loops with arbitrary vertex
/// counts. A crack-tip element is stored as an open chain: its first and
/// last nodes are distinct indices at (nearly) the same coordinates and the
/// implied closing edge is the crack slit.
struct PolygonMesh {
    std::vector<Vec2> nodes;
    std::vector<std::vector<int>> elements;
    std::vector<std::array<int, 3>> boundary_edges; // (node, node, tag)
    std::vector<CrackDescriptor> cracks;

    Polygon element_polygon(int e) const;
    bool is_tip_element(int e) const;
    // Scaling center: crack tip for tip elements, centroid otherwise.
    Vec2 scaling_center(int e) const;
    double total_area() const;
};

/// Boundary edge tags assigned by the mesh generators.
enum BoundaryTag : int {
    kBoundaryBottom = 0,
    kBoundaryRight = 1,
    kBoundaryTop = 2,
    kBoundaryLeft = 3,
    kBoundaryHole = 4,
    kBoundaryCrackFace = 5,
};

struct Circle {
    Vec2 center;
    double radius = 0.0;
};

/// Analysis domain: convex outer polygon, optional circular holes.
struct Domain {
    Polygon outer;
    std::vector<Circle> holes;
    int seed_count = 0;

    double area() const; // outer area minus hole areas
    bool contains(const Vec2& p) const;
    void validate() const; // throws on holes outside the outer polygon etc.
};

struct ElementReport {
    bool positive_area = false;
    bool simple = false;
    bool ccw = false;
    bool star_convex = false;
    bool ok() const { return positive_area && simple && ccw && star_convex; }
};

struct ValidationReport {
    std::vector<ElementReport> elements;
    bool edges_conforming = false;
    bool indices_in_range = false;
    bool ok() const;
};

ValidationReport validate_mesh(const PolygonMesh& mesh);

// Dual polygonal mesh of a conforming triangulation: one polygon per node,
// built from incident-triangle centroids (plus boundary edge midpoints and
// the node itself on the boundary).
PolygonMesh dual_polygon_mesh(const std::vector<Vec2>& tri_nodes,
                              const std::vector<std::array<int, 3>>& tri_elements);

struct ConformResult {
    PolygonMesh mesh;
    // (original node, duplicate node) pairs created along the crack path.
    std::vector<std::array<int, 2>> doubled_nodes;
};

// Make the mesh conform to a straight crack running from `mouth` (on the
// domain boundary) to `tip` (strictly inside some element). Nodes on the
// open path are duplicated, and the tip element becomes an open chain with
// the tip as its scaling center.
ConformResult conform_to_crack(const PolygonMesh& mesh, const Vec2& tip, const Vec2& mouth);

// Internal straight crack between two tips, each strictly inside an element.
ConformResult conform_to_internal_crack(const PolygonMesh& mesh, const Vec2& tip_a,
                                        const Vec2& tip_b);

// Tie the crack faces shut again: merge the doubled nodes, close the tip
// chains and drop crack-face boundary edges. Inverse of conform_to_crack up
// to vertex rotation; used by verification oracles.
PolygonMesh heal_cracks(const PolygonMesh& mesh,
                        const std::vector<std::array<int, 2>>& doubled_nodes);

// Split every boundary edge of a tip element into k equal sub-edges,
// updating the adjacent elements and the boundary-edge table.
void subdivide_tip_edges(PolygonMesh& mesh, int tip_element, int k);

// JSON mesh IO (schema: nodes, elements, boundary_edges, cracks).
std::string mesh_to_json(const PolygonMesh& mesh);
PolygonMesh mesh_from_json(const std::string& text);
void save_mesh(const PolygonMesh& mesh, const std::string& path);
PolygonMesh load_mesh(const std::string& path);

} // namespace polyelast
