#include "polyelast/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polyelast {

double polygon_area(const Polygon& poly) {
    double s = 0.0;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        s += cross2(a, b);
    }
    return 0.5 * s;
}

Vec2 polygon_centroid(const Polygon& poly) {
    double a = 0.0;
    Vec2 c = Vec2::Zero();
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % n];
        const double w = cross2(p, q);
        a += w;
        c += w * (p + q);
    }
    return c / (3.0 * a);
}

double polygon_diameter(const Polygon& poly) {
    double d2 = 0.0;
    for (size_t i = 0; i < poly.size(); ++i)
        for (size_t j = i + 1; j < poly.size(); ++j)
            d2 = std::max(d2, (poly[i] - poly[j]).squaredNorm());
    return std::sqrt(d2);
}

bool point_in_polygon(const Vec2& p, const Polygon& poly) {
    bool inside = false;
    const size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double xint = a.x() + (p.y() - a.y()) / (b.y() - a.y()) * (b.x() - a.x());
            if (p.x() < xint) inside = !inside;
        }
    }
    return inside;
}

double distance_to_boundary(const Vec2& p, const Polygon& poly) {
    double best = std::numeric_limits<double>::max();
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const Vec2 ab = b - a;
        const double len2 = ab.squaredNorm();
        double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        best = std::min(best, (p - (a + t * ab)).norm());
    }
    return best;
}

bool polygon_is_convex(const Polygon& poly, double tol) {
    const size_t n = poly.size();
    if (n < 3) return false;
    const double scale = polygon_diameter(poly);
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const Vec2& c = poly[(i + 2) % n];
        if (cross2(b - a, c - b) < -tol * scale * scale) return false;
    }
    return true;
}

bool polygon_is_star_convex(const Polygon& poly, const Vec2& c, double tol) {
    const size_t n = poly.size();
    const double scale = polygon_diameter(poly);
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if ((b - a).norm() < tol * scale) continue; // zero-length closing edge of crack chains
        if (cross2(b - a, c - a) < -tol * scale * scale) return false;
    }
    return true;
}

namespace {

bool segments_properly_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d,
                                 double tol) {
    const double d1 = cross2(b - a, c - a);
    const double d2 = cross2(b - a, d - a);
    const double d3 = cross2(d - c, a - c);
    const double d4 = cross2(d - c, b - c);
    return (d1 > tol) != (d2 > tol) && (d3 > tol) != (d4 > tol) &&
           (d1 < -tol) != (d2 < -tol) && (d3 < -tol) != (d4 < -tol);
}

} // namespace

bool polygon_is_simple(const Polygon& poly, double tol) {
    const size_t n = poly.size();
    if (n < 3) return false;
    const double scale = polygon_diameter(poly);
    const double t = tol * scale * scale;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        for (size_t j = i + 1; j < n; ++j) {
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            const Vec2& c = poly[j];
            const Vec2& d = poly[(j + 1) % n];
            if (segments_properly_intersect(a, b, c, d, t)) return false;
        }
    }
    return true;
}

Polygon clip_halfplane(const Polygon& poly, const Vec2& p, const Vec2& n) {
    Polygon out;
    const size_t m = poly.size();
    if (m == 0) return out;
    out.reserve(m + 2);
    for (size_t i = 0; i < m; ++i) {
        const Vec2& cur = poly[i];
        const Vec2& nxt = poly[(i + 1) % m];
        const double dc = (cur - p).dot(n);
        const double dn = (nxt - p).dot(n);
        if (dc >= 0.0) {
            out.push_back(cur);
            if (dn < 0.0) out.push_back(cur + dc / (dc - dn) * (nxt - cur));
        } else if (dn >= 0.0) {
            out.push_back(cur + dc / (dc - dn) * (nxt - cur));
        }
    }
    return out;
}

Polygon polygon_kernel(const Polygon& poly) {
    // Start from the bounding box and cut by every edge half-plane.
    Vec2 lo = poly[0], hi = poly[0];
    for (const Vec2& v : poly) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    Polygon ker = {lo, {hi.x(), lo.y()}, hi, {lo.x(), hi.y()}};
    const size_t n = poly.size();
    for (size_t i = 0; i < n && !ker.empty(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        const Vec2 t = b - a;
        if (t.norm() == 0.0) continue;
        const Vec2 inward(-t.y(), t.x()); // interior is left of a CCW edge
        ker = clip_halfplane(ker, a, inward);
    }
    return ker;
}

Polygon merge_close_vertices(const Polygon& poly, double tol) {
    Polygon out;
    for (const Vec2& v : poly) {
        if (out.empty() || (v - out.back()).norm() > tol) out.push_back(v);
    }
    while (out.size() > 1 && (out.front() - out.back()).norm() <= tol) out.pop_back();
    return out;
}

bool ray_segment_intersect(const Vec2& o, const Vec2& dir, const Vec2& a, const Vec2& b,
                           double& s_ray, double& t_seg, double tol) {
    const Vec2 ab = b - a;
    const double den = cross2(dir, ab);
    if (std::abs(den) < tol) return false;
    const Vec2 ao = a - o;
    s_ray = cross2(ao, ab) / den;
    t_seg = cross2(ao, dir) / den;
    return s_ray >= -tol && t_seg >= -tol && t_seg <= 1.0 + tol;
}

} // namespace polyelast
