#include "polyelast/quadrature.hpp"
#include "polyelast/voronoi.hpp"

#include "doctest.h"

#include <cmath>

using namespace polyelast;

namespace {

// Analytic monomial integrals used as independent oracles.
double interval_monomial(int k) { // int_{-1}^{1} x^k dx
    return k % 2 == 1 ? 0.0 : 2.0 / (k + 1);
}

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

double ref_triangle_monomial(int p, int q) { // int over unit triangle x^p y^q
    return factorial(p) * factorial(q) / factorial(p + q + 2);
}

// Green's-theorem boundary integral of x^p y^q over a polygon:
// int x^p y^q dA = oint x^(p+1)/(p+1) y^q dy, evaluated edge-by-edge with
// a high-order Gauss rule (exact for polynomial integrands).
double greens_monomial(const Polygon& poly, int p, int q) {
    const QuadratureRule1D g = gauss_legendre_1d(12);
    double sum = 0.0;
    const size_t n = poly.size();
    for (size_t i = 0; i < n; ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % n];
        for (long k = 0; k < g.points.size(); ++k) {
            const double t = 0.5 * (g.points[k] + 1.0);
            const double x = a.x() + t * (b.x() - a.x());
            const double y = a.y() + t * (b.y() - a.y());
            const double dy = 0.5 * (b.y() - a.y());
            sum += g.weights[k] * std::pow(x, p + 1) / (p + 1) * std::pow(y, q) * dy;
        }
    }
    return sum;
}

} // namespace

TEST_CASE("gauss-legendre basics") {
    const QuadratureRule1D r1 = gauss_legendre_1d(1);
    CHECK(r1.points[0] == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(r1.weights[0] == doctest::Approx(2.0).epsilon(1e-15));

    const QuadratureRule1D r2 = gauss_legendre_1d(2);
    CHECK(r2.points[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r2.points[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(r2.weights[0] == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS(gauss_legendre_1d(0));
}

TEST_CASE("gauss-legendre degree exactness") {
    for (int n = 1; n <= 8; ++n) {
        const QuadratureRule1D r = gauss_legendre_1d(n);
        CHECK(r.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
        for (int k = 0; k <= 2 * n - 1; ++k) {
            double s = 0.0;
            for (long i = 0; i < r.points.size(); ++i)
                s += r.weights[i] * std::pow(r.points[i], k);
            CHECK(s == doctest::Approx(interval_monomial(k)).epsilon(1e-13));
        }
    }
}

TEST_CASE("dunavant degree-6 rule") {
    const TriangleRule rule = dunavant_triangle(6);
    CHECK(rule.weights.size() == 12);
    CHECK(rule.weights.sum() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(rule.weights.minCoeff() > 0.0);
    CHECK_THROWS(dunavant_triangle(4));

    // All monomials of total degree <= 6 against the closed-form oracle.
    for (int p = 0; p <= 6; ++p) {
        for (int q = 0; p + q <= 6; ++q) {
            double s = 0.0;
            for (long i = 0; i < rule.weights.size(); ++i) {
                const Eigen::Vector3d& l = rule.bary[static_cast<size_t>(i)];
                // reference triangle vertices (0,0), (1,0), (0,1)
                const double x = l[1];
                const double y = l[2];
                s += rule.weights[i] * std::pow(x, p) * std::pow(y, q) * 2.0;
            }
            const double exact = ref_triangle_monomial(p, q) * 2.0;
            CHECK(s == doctest::Approx(exact).epsilon(1e-13));
        }
    }
    // Spot value from the oracle: x^2 y^2 integrates to 1/180.
    CHECK(ref_triangle_monomial(2, 2) == doctest::Approx(1.0 / 180.0).epsilon(1e-15));
}

TEST_CASE("integrate_polygon basics and monomial oracle") {
    const TriangleRule rule = dunavant_triangle(6);
    const Polygon square = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    CHECK(integrate_polygon([](const Vec2&) { return 1.0; }, square, rule) ==
          doctest::Approx(1.0).epsilon(1e-14));
    CHECK(integrate_polygon([](const Vec2& x) { return x.x(); }, square, rule) ==
          doctest::Approx(0.5).epsilon(1e-14));

    // Random convex pentagon: x^3 y^2 against the Green's-theorem oracle.
    Rng rng(7);
    Polygon pent;
    for (int i = 0; i < 5; ++i) {
        const double ang = 2.0 * M_PI * (i + 0.2 * rng.next_double()) / 5.0;
        pent.push_back({0.3 + 0.8 * std::cos(ang), -0.2 + 0.8 * std::sin(ang)});
    }
    const double got =
        integrate_polygon([](const Vec2& x) { return std::pow(x.x(), 3) * x.y() * x.y(); }, pent, rule);
    const double expect = greens_monomial(pent, 3, 2);
    CHECK(got == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("integrate_polygon additivity and affine invariance") {
    const TriangleRule rule = dunavant_triangle(6);
    auto f = [](const Vec2& x) { return std::sin(x.x()) * std::cos(0.7 * x.y()) + x.squaredNorm(); };
    const Polygon hexa = {{1, 0}, {0.5, 0.9}, {-0.5, 0.9}, {-1, 0}, {-0.5, -0.9}, {0.5, -0.9}};

    // Split along the x-axis into two halves.
    const Polygon upper = {{1, 0}, {0.5, 0.9}, {-0.5, 0.9}, {-1, 0}};
    const Polygon lower = {{-1, 0}, {-0.5, -0.9}, {0.5, -0.9}, {1, 0}};
    const double whole = integrate_polygon(f, hexa, rule);
    const double parts = integrate_polygon(f, upper, rule) + integrate_polygon(f, lower, rule);
    CHECK(whole == doctest::Approx(parts).epsilon(1e-12));

    // Rotate and translate polygon and integrand together.
    const double ang = 0.83;
    const Eigen::Rotation2D<double> rot(ang);
    const Vec2 shift(1.7, -2.4);
    Polygon moved;
    for (const Vec2& v : hexa) moved.push_back(rot * v + shift);
    auto f_moved = [&](const Vec2& x) { return f(rot.inverse() * (x - shift)); };
    CHECK(integrate_polygon(f_moved, moved, rule) == doctest::Approx(whole).epsilon(1e-12));
}

TEST_CASE("integrate_polygon rejects degenerate fans") {
    const TriangleRule rule = dunavant_triangle(6);
    // Apex placed on a vertex makes a fan triangle degenerate.
    const Polygon tri = {{0, 0}, {1, 0}, {0, 1}};
    CHECK_THROWS(integrate_polygon([](const Vec2&) { return 1.0; }, tri, rule, Vec2(0, 0)));
}
