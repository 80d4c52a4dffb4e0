#include "polyelast/mesh.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace polyelast {

Polygon PolygonMesh::element_polygon(int e) const {
    Polygon p;
    p.reserve(elements[static_cast<size_t>(e)].size());
    for (int idx : elements[static_cast<size_t>(e)]) p.push_back(nodes[static_cast<size_t>(idx)]);
    return p;
}

bool PolygonMesh::is_tip_element(int e) const {
    for (const auto& c : cracks)
        if (c.tip_element == e) return true;
    return false;
}

Vec2 PolygonMesh::scaling_center(int e) const {
    for (const auto& c : cracks)
        if (c.tip_element == e) return c.tip;
    return polygon_centroid(element_polygon(e));
}

double PolygonMesh::total_area() const {
    double a = 0.0;
    for (size_t e = 0; e < elements.size(); ++e) a += polygon_area(element_polygon(static_cast<int>(e)));
    return a;
}

double Domain::area() const {
    double a = polygon_area(outer);
    for (const Circle& h : holes) a -= M_PI * h.radius * h.radius;
    return a;
}

bool Domain::contains(const Vec2& p) const {
    if (!point_in_polygon(p, outer)) return false;
    for (const Circle& h : holes)
        if ((p - h.center).norm() <= h.radius) return false;
    return true;
}

void Domain::validate() const {
    if (outer.size() < 3) throw std::invalid_argument("domain: outer boundary needs >= 3 vertices");
    if (polygon_area(outer) <= 0.0) throw std::invalid_argument("domain: outer boundary must be CCW");
    for (size_t i = 0; i < holes.size(); ++i) {
        const Circle& h = holes[i];
        if (h.radius <= 0.0)
            throw std::invalid_argument("domain: hole " + std::to_string(i) + " has non-positive radius");
        // The hole must cut into the plate (corner holes of symmetry models
        // are allowed) without swallowing it.
        const double dist = distance_to_boundary(h.center, outer);
        if (!point_in_polygon(h.center, outer) && dist >= h.radius)
            throw std::invalid_argument("domain: hole " + std::to_string(i) +
                                        " lies outside the outer boundary");
        double vmax = 0.0;
        for (const Vec2& v : outer) vmax = std::max(vmax, (v - h.center).norm());
        if (vmax <= h.radius)
            throw std::invalid_argument("domain: hole " + std::to_string(i) +
                                        " swallows the outer boundary");
    }
}

bool ValidationReport::ok() const {
    if (!edges_conforming || !indices_in_range) return false;
    for (const auto& e : elements)
        if (!e.ok()) return false;
    return true;
}

ValidationReport validate_mesh(const PolygonMesh& mesh) {
    ValidationReport rep;
    rep.indices_in_range = true;
    const int nn = static_cast<int>(mesh.nodes.size());
    for (const auto& elem : mesh.elements)
        for (int idx : elem)
            if (idx < 0 || idx >= nn) rep.indices_in_range = false;
    for (const auto& be : mesh.boundary_edges)
        if (be[0] < 0 || be[0] >= nn || be[1] < 0 || be[1] >= nn) rep.indices_in_range = false;
    if (!rep.indices_in_range) return rep;

    rep.elements.resize(mesh.elements.size());
    for (size_t e = 0; e < mesh.elements.size(); ++e) {
        const Polygon poly = mesh.element_polygon(static_cast<int>(e));
        ElementReport& r = rep.elements[e];
        const double area = polygon_area(poly);
        r.positive_area = area > 0.0;
        r.ccw = area > 0.0;
        r.simple = polygon_is_simple(poly) ||
                   (mesh.is_tip_element(static_cast<int>(e)) &&
                    polygon_is_simple(merge_close_vertices(poly, 1e-12 * polygon_diameter(poly))));
        r.star_convex =
            r.positive_area && polygon_is_star_convex(poly, mesh.scaling_center(static_cast<int>(e)));
    }

    // Interior edges must pair up with opposite orientation; edges used once
    // must appear in the boundary table.
    std::map<std::pair<int, int>, int> directed;
    for (size_t e = 0; e < mesh.elements.size(); ++e) {
        const auto& elem = mesh.elements[e];
        const size_t n = elem.size();
        const bool tip = mesh.is_tip_element(static_cast<int>(e));
        for (size_t i = 0; i < n; ++i) {
            if (tip && i + 1 == n) break; // open chain: no closing edge
            directed[{elem[i], elem[(i + 1) % n]}]++;
        }
    }
    std::set<std::pair<int, int>> boundary_set;
    for (const auto& be : mesh.boundary_edges) boundary_set.insert({be[0], be[1]});
    rep.edges_conforming = true;
    for (const auto& [edge, count] : directed) {
        if (count > 1) rep.edges_conforming = false;
        const auto rev = directed.find({edge.second, edge.first});
        const int rev_count = rev == directed.end() ? 0 : rev->second;
        if (rev_count == 0) {
            if (!boundary_set.count(edge) && !boundary_set.count({edge.second, edge.first}))
                rep.edges_conforming = false;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Triangle-dual mesh
// ---------------------------------------------------------------------------

PolygonMesh dual_polygon_mesh(const std::vector<Vec2>& tri_nodes,
                              const std::vector<std::array<int, 3>>& tri_elements) {
    const int nn = static_cast<int>(tri_nodes.size());
    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& t : tri_elements) {
        const Vec2& a = tri_nodes[static_cast<size_t>(t[0])];
        const Vec2& b = tri_nodes[static_cast<size_t>(t[1])];
        const Vec2& c = tri_nodes[static_cast<size_t>(t[2])];
        if (cross2(b - a, c - a) <= 0.0)
            throw std::invalid_argument("dual_polygon_mesh: triangle not CCW or degenerate");
        for (int k = 0; k < 3; ++k) edge_count[{t[static_cast<size_t>(k)], t[static_cast<size_t>((k + 1) % 3)]}]++;
    }
    for (const auto& [e, c] : edge_count) {
        if (c > 1) throw std::invalid_argument("dual_polygon_mesh: non-conforming triangulation");
        const auto rev = edge_count.find({e.second, e.first});
        if (rev != edge_count.end() && rev->second > 1)
            throw std::invalid_argument("dual_polygon_mesh: non-conforming triangulation");
    }

    // For each node, triangles keyed by the vertex that follows the node in
    // CCW order; walking key -> third vertex sweeps the fan CCW.
    struct Fan { std::map<int, std::pair<int, int>> next; }; // a -> (tri index, b)
    std::vector<Fan> fans(static_cast<size_t>(nn));
    for (size_t ti = 0; ti < tri_elements.size(); ++ti) {
        const auto& t = tri_elements[ti];
        for (int k = 0; k < 3; ++k) {
            const int v = t[static_cast<size_t>(k)];
            const int a = t[static_cast<size_t>((k + 1) % 3)];
            const int b = t[static_cast<size_t>((k + 2) % 3)];
            fans[static_cast<size_t>(v)].next[a] = {static_cast<int>(ti), b};
        }
    }

    PolygonMesh mesh;
    std::vector<int> centroid_id(tri_elements.size(), -1);
    auto centroid_node = [&](int ti) {
        if (centroid_id[static_cast<size_t>(ti)] < 0) {
            const auto& t = tri_elements[static_cast<size_t>(ti)];
            const Vec2 c = (tri_nodes[static_cast<size_t>(t[0])] + tri_nodes[static_cast<size_t>(t[1])] +
                            tri_nodes[static_cast<size_t>(t[2])]) / 3.0;
            centroid_id[static_cast<size_t>(ti)] = static_cast<int>(mesh.nodes.size());
            mesh.nodes.push_back(c);
        }
        return centroid_id[static_cast<size_t>(ti)];
    };
    std::map<std::pair<int, int>, int> mid_id;
    auto midpoint_node = [&](int a, int b) {
        const auto key = std::minmax(a, b);
        auto it = mid_id.find({key.first, key.second});
        if (it != mid_id.end()) return it->second;
        const int id = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(0.5 * (tri_nodes[static_cast<size_t>(a)] + tri_nodes[static_cast<size_t>(b)]));
        mid_id[{key.first, key.second}] = id;
        return id;
    };
    std::map<int, int> corner_id;
    auto corner_node = [&](int v) {
        auto it = corner_id.find(v);
        if (it != corner_id.end()) return it->second;
        const int id = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(tri_nodes[static_cast<size_t>(v)]);
        corner_id[v] = id;
        return id;
    };
    auto is_boundary_edge = [&](int a, int b) {
        return edge_count.find({b, a}) == edge_count.end();
    };

    for (int v = 0; v < nn; ++v) {
        const Fan& fan = fans[static_cast<size_t>(v)];
        if (fan.next.empty()) continue; // unused node
        // Find a starting key: for boundary nodes the outgoing boundary edge.
        int start = fan.next.begin()->first;
        bool boundary = false;
        for (const auto& [a, tb] : fan.next) {
            if (is_boundary_edge(v, a)) {
                start = a;
                boundary = true;
                break;
            }
        }
        std::vector<int> tri_ring;
        int key = start;
        int last_b = -1;
        for (size_t guard = 0; guard <= fan.next.size(); ++guard) {
            auto it = fan.next.find(key);
            if (it == fan.next.end()) break;
            tri_ring.push_back(it->second.first);
            last_b = it->second.second;
            key = last_b;
            if (!boundary && key == start) break;
        }

        std::vector<int> poly;
        if (boundary) {
            poly.push_back(corner_node(v));
            poly.push_back(midpoint_node(v, start));
            for (int ti : tri_ring) poly.push_back(centroid_node(ti));
            poly.push_back(midpoint_node(last_b, v));
            mesh.boundary_edges.push_back({poly[0], poly[1], 0});
            mesh.boundary_edges.push_back({poly.back(), poly[0], 0});
        } else {
            for (int ti : tri_ring) poly.push_back(centroid_node(ti));
        }
        mesh.elements.push_back(poly);
    }
    return mesh;
}

// ---------------------------------------------------------------------------
// Crack conformance
// ---------------------------------------------------------------------------

namespace {

double mesh_diameter(const PolygonMesh& mesh) {
    Vec2 lo = mesh.nodes[0], hi = mesh.nodes[0];
    for (const Vec2& p : mesh.nodes) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

int find_tip_element(const PolygonMesh& mesh, const Vec2& tip, double tol) {
    for (size_t e = 0; e < mesh.elements.size(); ++e) {
        const Polygon poly = mesh.element_polygon(static_cast<int>(e));
        if (point_in_polygon(tip, poly)) {
            if (distance_to_boundary(tip, poly) <= tol)
                throw std::invalid_argument(
                    "conform_to_crack: tip lies on an element edge or node");
            return static_cast<int>(e);
        }
    }
    throw std::invalid_argument("conform_to_crack: tip not inside any element");
}

struct PathFrame {
    Vec2 origin, dir;
    double length;
    double t(const Vec2& p) const { return (p - origin).dot(dir) / length; }
    double offset(const Vec2& p) const { return cross2(dir, p - origin); }
};

ConformResult conform_impl(const PolygonMesh& input, const Vec2& p_from, const Vec2& p_to,
                           bool from_is_tip) {
    ConformResult res;
    res.mesh = input;
    PolygonMesh& mesh = res.mesh;
    const double diam = mesh_diameter(mesh);
    const double tol = 1e-9 * diam;

    PathFrame fr;
    fr.origin = p_from;
    fr.dir = (p_to - p_from).normalized();
    fr.length = (p_to - p_from).norm();
    if (fr.length < tol) throw std::invalid_argument("conform_to_crack: zero-length crack");

    const int e_to = find_tip_element(mesh, p_to, tol);
    const int e_from = from_is_tip ? find_tip_element(mesh, p_from, tol) : -1;

    // Nodes lying on the crack path (within the open segment, plus the mouth).
    std::vector<int> path;
    for (size_t i = 0; i < mesh.nodes.size(); ++i) {
        const Vec2& p = mesh.nodes[i];
        if (std::abs(fr.offset(p)) > tol) continue;
        const double t = fr.t(p);
        if (t < -tol / fr.length || t > 1.0 + tol / fr.length) continue;
        path.push_back(static_cast<int>(i));
    }
    if (path.empty()) throw std::invalid_argument("conform_to_crack: no mesh nodes on the crack path");
    std::sort(path.begin(), path.end(),
              [&](int a, int b) { return fr.t(mesh.nodes[static_cast<size_t>(a)]) < fr.t(mesh.nodes[static_cast<size_t>(b)]); });

    // Snap path nodes exactly onto the line.
    for (int nd : path) {
        Vec2& p = mesh.nodes[static_cast<size_t>(nd)];
        p = fr.origin + (p - fr.origin).dot(fr.dir) * fr.dir;
    }

    // Duplicate path nodes; elements on the negative side take the copy.
    std::map<int, int> dup;
    for (int nd : path) {
        const int copy = static_cast<int>(mesh.nodes.size());
        mesh.nodes.push_back(mesh.nodes[static_cast<size_t>(nd)]);
        dup[nd] = copy;
        res.doubled_nodes.push_back({nd, copy});
    }

    // Remap per element, remembering changes for the boundary-edge fix-up.
    std::vector<int> boundary_owner(mesh.boundary_edges.size(), -1);
    for (size_t be = 0; be < mesh.boundary_edges.size(); ++be) {
        const auto& edge = mesh.boundary_edges[be];
        for (size_t e = 0; e < mesh.elements.size() && boundary_owner[be] < 0; ++e) {
            const auto& elem = mesh.elements[e];
            for (size_t i = 0; i < elem.size(); ++i)
                if (elem[i] == edge[0] && elem[(i + 1) % elem.size()] == edge[1]) {
                    boundary_owner[be] = static_cast<int>(e);
                    break;
                }
        }
    }

    std::vector<std::map<int, int>> element_remap(mesh.elements.size());
    for (size_t e = 0; e < mesh.elements.size(); ++e) {
        auto& elem = mesh.elements[e];
        bool touches = false;
        for (int idx : elem)
            if (dup.count(idx)) touches = true;
        if (!touches) continue;
        if (static_cast<int>(e) == e_to || static_cast<int>(e) == e_from) continue; // handled below
        const double side = fr.offset(polygon_centroid(mesh.element_polygon(static_cast<int>(e))));
        if (side < -tol) {
            for (int& idx : elem)
                if (dup.count(idx)) {
                    element_remap[e][idx] = dup[idx];
                    idx = dup[idx];
                }
        } else if (side <= tol) {
            throw std::runtime_error("conform_to_crack: non-tip element straddles the crack line");
        }
    }

    // Split each tip element's loop at its on-path vertex into an open
    // chain. The first copy of Q matches the side of the CCW-next vertex so
    // that the chain edges pair up with the remapped neighbour elements.
    auto split_tip = [&](int e) {
        auto& elem = mesh.elements[static_cast<size_t>(e)];
        int qpos = -1;
        for (size_t i = 0; i < elem.size(); ++i)
            if (dup.count(elem[i])) {
                if (qpos >= 0)
                    throw std::runtime_error("conform_to_crack: tip element has several path nodes");
                qpos = static_cast<int>(i);
            }
        if (qpos < 0) throw std::runtime_error("conform_to_crack: tip element misses the crack path");
        const size_t n = elem.size();
        const int q = elem[static_cast<size_t>(qpos)];
        const int next = elem[(static_cast<size_t>(qpos) + 1) % n];
        const bool next_below = fr.offset(mesh.nodes[static_cast<size_t>(next)]) < 0.0;
        const int start = next_below ? dup[q] : q;
        const int end = next_below ? q : dup[q];
        std::vector<int> chain;
        chain.push_back(start);
        for (size_t k = 1; k < n; ++k) chain.push_back(elem[(static_cast<size_t>(qpos) + k) % n]);
        chain.push_back(end);
        element_remap[static_cast<size_t>(e)][q] = start; // edges leaving Q CCW use the start copy
        elem = chain;
    };
    split_tip(e_to);
    if (from_is_tip) split_tip(e_from);

    for (size_t be = 0; be < mesh.boundary_edges.size(); ++be) {
        const int owner = boundary_owner[be];
        if (owner < 0) continue;
        auto& edge = mesh.boundary_edges[be];
        const auto& remap = element_remap[static_cast<size_t>(owner)];
        // The owner traverses (edge[0], edge[1]); a remapped start/end node is
        // identified by matching the directed edge in the updated polygon.
        const auto& elem = mesh.elements[static_cast<size_t>(owner)];
        for (size_t i = 0; i + 1 <= elem.size(); ++i) {
            const int a = elem[i % elem.size()];
            const int b = elem[(i + 1) % elem.size()];
            const int a0 = remap.count(edge[0]) ? remap.at(edge[0]) : edge[0];
            const int b0 = remap.count(edge[1]) ? remap.at(edge[1]) : edge[1];
            if ((a == edge[0] || a == a0) && (b == edge[1] || b == b0)) {
                edge[0] = a;
                edge[1] = b;
                break;
            }
        }
    }

    // Crack faces become boundary edges (positive side keeps originals).
    for (size_t i = 0; i + 1 < path.size(); ++i) {
        const int a = path[i], b = path[i + 1];
        const bool last_pair = i + 2 == path.size();
        if (last_pair && !from_is_tip) {
            // segment entering the tip element is the un-discretised slit
        }
        mesh.boundary_edges.push_back({b, a, kBoundaryCrackFace});
        mesh.boundary_edges.push_back({dup[a], dup[b], kBoundaryCrackFace});
    }

    const double angle = std::atan2(fr.dir.y(), fr.dir.x());
    mesh.cracks.push_back({p_to, p_from, e_to, angle});
    if (from_is_tip)
        mesh.cracks.push_back({p_from, p_to, e_from, std::atan2(-fr.dir.y(), -fr.dir.x())});
    return res;
}

} // namespace

ConformResult conform_to_crack(const PolygonMesh& mesh, const Vec2& tip, const Vec2& mouth) {
    return conform_impl(mesh, mouth, tip, false);
}

ConformResult conform_to_internal_crack(const PolygonMesh& mesh, const Vec2& tip_a,
                                        const Vec2& tip_b) {
    return conform_impl(mesh, tip_a, tip_b, true);
}

PolygonMesh heal_cracks(const PolygonMesh& mesh,
                        const std::vector<std::array<int, 2>>& doubled_nodes) {
    std::map<int, int> undo;
    for (const auto& d : doubled_nodes) undo[d[1]] = d[0];
    auto remap = [&](int idx) {
        auto it = undo.find(idx);
        return it == undo.end() ? idx : it->second;
    };

    PolygonMesh healed;
    healed.nodes = mesh.nodes;
    for (size_t e = 0; e < mesh.elements.size(); ++e) {
        std::vector<int> elem;
        for (int idx : mesh.elements[e]) {
            const int m = remap(idx);
            if (elem.empty() || (elem.back() != m && elem.front() != m)) elem.push_back(m);
        }
        healed.elements.push_back(elem);
    }
    for (const auto& be : mesh.boundary_edges) {
        if (be[2] == kBoundaryCrackFace) continue;
        const int a = remap(be[0]);
        const int b = remap(be[1]);
        if (a != b) healed.boundary_edges.push_back({a, b, be[2]});
    }

    // Compact away the now-unused duplicate nodes.
    std::vector<int> new_id(healed.nodes.size(), -1);
    std::vector<Vec2> nodes;
    for (const auto& elem : healed.elements)
        for (int idx : elem)
            if (new_id[static_cast<size_t>(idx)] < 0) {
                new_id[static_cast<size_t>(idx)] = static_cast<int>(nodes.size());
                nodes.push_back(healed.nodes[static_cast<size_t>(idx)]);
            }
    for (auto& elem : healed.elements)
        for (int& idx : elem) idx = new_id[static_cast<size_t>(idx)];
    for (auto& be : healed.boundary_edges) {
        be[0] = new_id[static_cast<size_t>(be[0])];
        be[1] = new_id[static_cast<size_t>(be[1])];
    }
    healed.nodes = std::move(nodes);
    return healed;
}

void subdivide_tip_edges(PolygonMesh& mesh, int tip_element, int k) {
    if (k <= 1) return;
    if (!mesh.is_tip_element(tip_element))
        throw std::invalid_argument("subdivide_tip_edges: element is not a crack-tip element");
    const std::vector<int> chain = mesh.elements[static_cast<size_t>(tip_element)];

    for (size_t i = 0; i + 1 < chain.size(); ++i) {
        const int a = chain[i], b = chain[i + 1];
        const Vec2 pa = mesh.nodes[static_cast<size_t>(a)];
        const Vec2 pb = mesh.nodes[static_cast<size_t>(b)];
        std::vector<int> inner;
        for (int s = 1; s < k; ++s) {
            inner.push_back(static_cast<int>(mesh.nodes.size()));
            mesh.nodes.push_back(pa + (static_cast<double>(s) / k) * (pb - pa));
        }
        auto insert_between = [&](std::vector<int>& elem, int from, int to,
                                  const std::vector<int>& mids) {
            for (size_t p = 0; p < elem.size(); ++p) {
                const size_t pn = (p + 1) % elem.size();
                if (elem[p] == from && elem[pn] == to) {
                    elem.insert(elem.begin() + static_cast<long>(p) + 1, mids.begin(), mids.end());
                    return true;
                }
            }
            return false;
        };
        insert_between(mesh.elements[static_cast<size_t>(tip_element)], a, b, inner);

        // Conforming update of the neighbour across (b, a), if any.
        std::vector<int> rev(inner.rbegin(), inner.rend());
        for (size_t e = 0; e < mesh.elements.size(); ++e) {
            if (static_cast<int>(e) == tip_element) continue;
            if (insert_between(mesh.elements[e], b, a, rev)) break;
        }

        // Split matching boundary entries into k sub-edges.
        for (size_t be = 0; be < mesh.boundary_edges.size(); ++be) {
            auto edge = mesh.boundary_edges[be];
            if (edge[0] == a && edge[1] == b) {
                mesh.boundary_edges.erase(mesh.boundary_edges.begin() + static_cast<long>(be));
                std::vector<int> pts = {a};
                pts.insert(pts.end(), inner.begin(), inner.end());
                pts.push_back(b);
                for (size_t s = 0; s + 1 < pts.size(); ++s)
                    mesh.boundary_edges.push_back({pts[s], pts[s + 1], edge[2]});
                break;
            }
            if (edge[0] == b && edge[1] == a) {
                mesh.boundary_edges.erase(mesh.boundary_edges.begin() + static_cast<long>(be));
                std::vector<int> pts = {b};
                pts.insert(pts.end(), rev.begin(), rev.end());
                pts.push_back(a);
                for (size_t s = 0; s + 1 < pts.size(); ++s)
                    mesh.boundary_edges.push_back({pts[s], pts[s + 1], edge[2]});
                break;
            }
        }
    }
}

// ---------------------------------------------------------------------------
// JSON IO
// ---------------------------------------------------------------------------

std::string mesh_to_json(const PolygonMesh& mesh) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const Vec2& p : mesh.nodes) j["nodes"].push_back({p.x(), p.y()});
    j["elements"] = mesh.elements;
    j["boundary_edges"] = nlohmann::json::array();
    for (const auto& be : mesh.boundary_edges) j["boundary_edges"].push_back({be[0], be[1], be[2]});
    j["cracks"] = nlohmann::json::array();
    for (const auto& c : mesh.cracks)
        j["cracks"].push_back({{"tip", {c.tip.x(), c.tip.y()}},
                               {"mouth", {c.mouth.x(), c.mouth.y()}},
                               {"tip_element", c.tip_element},
                               {"crack_angle", c.crack_angle}});
    return j.dump(1);
}

PolygonMesh mesh_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    PolygonMesh mesh;
    for (const auto& p : j.at("nodes")) mesh.nodes.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    mesh.elements = j.at("elements").get<std::vector<std::vector<int>>>();
    for (const auto& be : j.at("boundary_edges"))
        mesh.boundary_edges.push_back({be.at(0).get<int>(), be.at(1).get<int>(), be.at(2).get<int>()});
    if (j.contains("cracks")) {
        for (const auto& c : j.at("cracks")) {
            CrackDescriptor d;
            d.tip = Vec2(c.at("tip").at(0).get<double>(), c.at("tip").at(1).get<double>());
            d.mouth = Vec2(c.at("mouth").at(0).get<double>(), c.at("mouth").at(1).get<double>());
            d.tip_element = c.at("tip_element").get<int>();
            d.crack_angle = c.at("crack_angle").get<double>();
            mesh.cracks.push_back(d);
        }
    }
    return mesh;
}

void save_mesh(const PolygonMesh& mesh, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary);
        if (!f) throw std::runtime_error("save_mesh: cannot write " + tmp);
        f << mesh_to_json(mesh);
    }
    std::rename(tmp.c_str(), path.c_str());
}

PolygonMesh load_mesh(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("load_mesh: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return mesh_from_json(ss.str());
}

} // namespace polyelast
