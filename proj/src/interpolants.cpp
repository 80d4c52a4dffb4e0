#include "polyelast/interpolants.hpp"

#include <cmath>
#include <stdexcept>

namespace polyelast {

Circumcenter circumcenter_with_derivs(const Vec2& a, const Vec2& b, const Vec2& x) {
    const double a1 = a.x(), a2 = a.y();
    const double b1 = b.x(), b2 = b.y();
    const double px = x.x(), py = x.y();

    const double D = (a1 - px) * (b2 - py) - (b1 - px) * (a2 - py);
    const double scale = std::max({(a - b).norm(), (a - x).norm(), (b - x).norm()});
    if (std::abs(D) < 1e-14 * scale * scale)
        throw std::runtime_error("circumcenter_with_derivs: collinear point triple");

    const double t1 = ((a1 - px) * (a1 + px) + (a2 - py) * (a2 + py)) * (b2 - py);
    const double t2 = ((b1 - px) * (b1 + px) + (b2 - py) * (b2 + py)) * (a2 - py);
    const double v1 = 0.5 * (t1 - t2) / D;
    const double t4 = ((b1 - px) * (b1 + px) + (b2 - py) * (b2 + py)) * (a1 - px);
    const double t5 = ((a1 - px) * (a1 + px) + (a2 - py) * (a2 + py)) * (b1 - px);
    const double v2 = 0.5 * (t4 - t5) / D;

    const double dx = a2 - b2;
    const double dy = b1 - a1;
    const double term3 = 0.5 * ((b1 * b1 - a1 * a1) + (b2 * b2 - a2 * a2));

    Circumcenter out;
    out.center = Vec2(v1, v2);
    out.d_center(0, 0) = (px - v1) * dx / D;
    out.d_center(0, 1) = (term3 + py * dx - v1 * dy) / D;
    out.d_center(1, 0) = (-term3 + px * dy - v2 * dx) / D;
    out.d_center(1, 1) = (py - v2) * dy / D;
    return out;
}

ShapeEval laplace_shape(const Vec2& x, const Polygon& poly) {
    const int n = static_cast<int>(poly.size());
    if (n < 3) throw std::invalid_argument("laplace_shape: polygon needs >= 3 vertices");
    if (!polygon_is_convex(poly))
        throw std::invalid_argument("laplace_shape: polygon must be convex");
    const double diam = polygon_diameter(poly);
    if (!point_in_polygon(x, poly) || distance_to_boundary(x, poly) < 1e-10 * diam)
        throw std::invalid_argument("laplace_shape: point outside or too close to boundary");

    Eigen::VectorXd alpha(n);
    Eigen::MatrixXd dalpha(n, 2);
    double denom = 0.0;
    Vec2 sumder = Vec2::Zero();

    for (int i = 0; i < n; ++i) {
        const Vec2& vi = poly[static_cast<size_t>(i)];
        const Vec2& vm = poly[static_cast<size_t>((i + n - 1) % n)];
        const Vec2& vp = poly[static_cast<size_t>((i + 1) % n)];

        // Voronoi facet between x and vertex i spans the circumcenters of
        // (prev, i, x) and (i, next, x).
        const Circumcenter cm = circumcenter_with_derivs(vm, vi, x);
        const Circumcenter cp = circumcenter_with_derivs(vi, vp, x);

        const Vec2 d = cm.center - cp.center;
        const double s = d.norm();
        const double h = (x - vi).norm();
        const Vec2 ds = (cm.d_center - cp.d_center).transpose() * d / s;
        const Vec2 dh = (x - vi) / h;

        const double w = s / h;
        alpha[i] = w;
        const Vec2 dw = (ds - w * dh) / h;
        dalpha.row(i) = dw.transpose();
        denom += w;
        sumder += dw;
    }

    ShapeEval out;
    out.values = alpha / denom;
    out.grads.resize(n, 2);
    for (int i = 0; i < n; ++i)
        out.grads.row(i) = (dalpha.row(i) - out.values[i] * sumder.transpose()) / denom;
    return out;
}

Eigen::VectorXd lobatto_nodes_1d(int order) {
    const double s5 = 1.0 / std::sqrt(5.0);
    switch (order) {
        case 1: return Eigen::Vector2d(-1.0, 1.0);
        case 2: return Eigen::Vector3d(-1.0, 0.0, 1.0);
        case 3: return Eigen::Vector4d(-1.0, -s5, s5, 1.0);
        default: throw std::invalid_argument("lobatto_nodes_1d: order must be 1, 2 or 3");
    }
}

Shape1D lagrange_shape_1d(int order, double eta) {
    if (eta < -1.0 - 1e-12 || eta > 1.0 + 1e-12)
        throw std::invalid_argument("lagrange_shape_1d: eta outside [-1,1]");
    Shape1D s;
    const double x = eta;
    switch (order) {
        case 1:
            s.values = Eigen::Vector2d(0.5 * (1.0 - x), 0.5 * (1.0 + x));
            s.derivs = Eigen::Vector2d(-0.5, 0.5);
            break;
        case 2:
            s.values = Eigen::Vector3d(0.5 * (-1.0 + x) * x, 1.0 - x * x, 0.5 * (1.0 + x) * x);
            s.derivs = Eigen::Vector3d(-0.5 + x, -2.0 * x, 0.5 + x);
            break;
        case 3: {
            const double r5 = std::sqrt(5.0);
            s.values.resize(4);
            s.derivs.resize(4);
            s.values[0] = -0.125 * (-1.0 + x) * (-1.0 + 5.0 * x * x);
            s.values[1] = 0.625 * (-1.0 + x * x) * (-1.0 + r5 * x);
            s.values[2] = -(r5 / 8.0) * (-1.0 + x * x) * (r5 + 5.0 * x);
            s.values[3] = 0.125 * (1.0 + x) * (-1.0 + 5.0 * x * x);
            s.derivs[0] = 0.125 * (1.0 + (10.0 - 15.0 * x) * x);
            s.derivs[1] = 0.625 * (-r5 + (-2.0 + 3.0 * r5 * x) * x);
            s.derivs[2] = -(r5 / 8.0) * (-5.0 + (2.0 * r5 + 15.0 * x) * x);
            s.derivs[3] = 0.125 * (-1.0 + (10.0 + 15.0 * x) * x);
            break;
        }
        default:
            throw std::invalid_argument("lagrange_shape_1d: order must be 1, 2 or 3");
    }
    return s;
}

Eigen::VectorXd AveragingShapeTable::vertex_row(int i) const {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
    r[i] = 1.0;
    return r;
}

AveragingShapeTable averaging_shapes(int n_vertices) {
    if (n_vertices < 3) throw std::invalid_argument("averaging_shapes: need n >= 3");
    AveragingShapeTable t;
    const int n = n_vertices;
    t.n = n;
    t.center = Eigen::VectorXd::Constant(n, 1.0 / n);
    t.edge_mid = Eigen::MatrixXd::Zero(n, n);
    t.spoke_mid = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        t.edge_mid(i, i) = 0.5;
        t.edge_mid(i, (i + 1) % n) = 0.5;
        t.spoke_mid.row(i) = 0.5 * t.center.transpose();
        t.spoke_mid(i, i) += 0.5;
    }
    return t;
}

} // namespace polyelast
