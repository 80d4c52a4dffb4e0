#include "polyelast/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace polyelast {

QuadratureRule1D gauss_legendre_1d(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_1d: need n >= 1");
    QuadratureRule1D rule;
    rule.points.resize(n);
    rule.weights.resize(n);
    // Newton iteration on P_n(x) with Chebyshev-like initial guesses.
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            const double pn = (n == 1) ? x : p1;
            const double pm = (n == 1) ? 1.0 : p0;
            pp = n * (x * pn - pm) / (x * x - 1.0);
            const double dx = pn / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.points[i] = -x;
        rule.points[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.points[n / 2] = 0.0;
    return rule;
}

TriangleRule dunavant_triangle(int degree) {
    if (degree != 6)
        throw std::invalid_argument("dunavant_triangle: only the degree-6 rule is provided");
    TriangleRule rule;
    // Degree 6, 12 points: two 3-fold orbits and one 6-fold orbit.
    struct Orbit { double w, a, b; int mult; };
    const Orbit orbits[] = {
        {0.116786275726379, 0.501426509658179, 0.249286745170910, 3},
        {0.050844906370207, 0.873821971016996, 0.063089014491502, 3},
        {0.082851075618374, 0.053145049844816, 0.310352451033785, 6},
    };
    std::vector<double> w;
    for (const Orbit& o : orbits) {
        if (o.mult == 3) {
            rule.bary.push_back({o.a, o.b, o.b});
            rule.bary.push_back({o.b, o.a, o.b});
            rule.bary.push_back({o.b, o.b, o.a});
            for (int i = 0; i < 3; ++i) w.push_back(0.5 * o.w);
        } else {
            const double c = 1.0 - o.a - o.b;
            const double perms[6][3] = {{o.a, o.b, c}, {o.a, c, o.b}, {o.b, o.a, c},
                                        {o.b, c, o.a}, {c, o.a, o.b}, {c, o.b, o.a}};
            for (auto& p : perms) {
                rule.bary.push_back({p[0], p[1], p[2]});
                w.push_back(0.5 * o.w);
            }
        }
    }
    rule.weights = Eigen::Map<Eigen::VectorXd>(w.data(), static_cast<long>(w.size()));
    return rule;
}

double integrate_polygon(const std::function<double(const Vec2&)>& f, const Polygon& poly,
                         const TriangleRule& rule) {
    return integrate_polygon(f, poly, rule, polygon_centroid(poly));
}

double integrate_polygon(const std::function<double(const Vec2&)>& f, const Polygon& poly,
                         const TriangleRule& rule, const Vec2& apex) {
    const size_t n = poly.size();
    const double total_area = std::abs(polygon_area(poly));
    double sum = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        if ((a - b).norm() < 1e-14 * std::sqrt(total_area)) continue; // crack-chain closure
        const double area2 = cross2(a - apex, b - apex); // 2 * triangle area
        if (area2 <= 1e-14 * total_area)
            throw std::runtime_error("integrate_polygon: degenerate fan triangle");
        for (long q = 0; q < rule.weights.size(); ++q) {
            const Eigen::Vector3d& l = rule.bary[static_cast<size_t>(q)];
            const Vec2 x = l[0] * apex + l[1] * a + l[2] * b;
            sum += rule.weights[q] * area2 * f(x);
        }
    }
    return sum;
}

} // namespace polyelast
