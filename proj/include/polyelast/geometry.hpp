#pragma once

#include <Eigen/Dense>
#include <vector>

namespace polyelast {

using Vec2 = Eigen::Vector2d;
using Polygon = std::vector<Vec2>;

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

// Signed area, positive for counter-clockwise vertex order.
double polygon_area(const Polygon& poly);

// Area centroid (valid for simple polygons with nonzero area).
Vec2 polygon_centroid(const Polygon& poly);

// Largest pairwise vertex distance.
double polygon_diameter(const Polygon& poly);

bool point_in_polygon(const Vec2& p, const Polygon& poly);

// Distance from p to the closest boundary segment.
double distance_to_boundary(const Vec2& p, const Polygon& poly);

// Strict convexity test up to tolerance on the cross products (collinear
// vertices are accepted as convex).
bool polygon_is_convex(const Polygon& poly, double tol = 1e-12);

// Every boundary edge visible from c: cross(b-a, c-a) >= -tol * scale for
// each directed edge (a, b) of a CCW polygon.
bool polygon_is_star_convex(const Polygon& poly, const Vec2& c, double tol = 1e-10);

// Non-self-intersection test by pairwise segment checks (adjacent edges and
// coincident endpoints excluded). O(n^2), meant for validation paths.
bool polygon_is_simple(const Polygon& poly, double tol = 1e-12);

// Clip a polygon against the half-plane { x : (x - p) . n >= 0 }.
// Sutherland-Hodgman step; may return an empty polygon.
Polygon clip_halfplane(const Polygon& poly, const Vec2& p, const Vec2& n);

// Kernel of a simple polygon (intersection of all edge half-planes).
// Empty result means no interior point sees the whole boundary.
Polygon polygon_kernel(const Polygon& poly);

// Merge consecutive vertices closer than tol; drops degenerate slivers.
Polygon merge_close_vertices(const Polygon& poly, double tol);

// Intersection of segment (a,b) with ray from origin o along dir.
// Returns true on a hit with t in [0,1] along the segment and s >= 0 along
// the ray; outputs both parameters.
bool ray_segment_intersect(const Vec2& o, const Vec2& dir, const Vec2& a, const Vec2& b,
                           double& s_ray, double& t_seg, double tol = 1e-14);

} // namespace polyelast
