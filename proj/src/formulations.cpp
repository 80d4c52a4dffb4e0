#include "polyelast/formulations.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace polyelast {

namespace {

using Cplx = std::complex<double>;

Eigen::MatrixXd b_matrix_from_grads(const Eigen::Matrix<double, Eigen::Dynamic, 2>& grads) {
    const long n = grads.rows();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 2 * n);
    for (long i = 0; i < n; ++i) {
        B(0, 2 * i) = grads(i, 0);
        B(1, 2 * i + 1) = grads(i, 1);
        B(2, 2 * i) = grads(i, 1);
        B(2, 2 * i + 1) = grads(i, 0);
    }
    return B;
}

} // namespace

std::vector<PolyFemQuadPoint> polyfem_quadrature(const Polygon& poly, const TriangleRule& rule) {
    // Shape functions are evaluated on the reference regular n-gon and
    // mapped isoparametrically; on the cyclic reference polygon the Laplace
    // interpolant is linearly precise everywhere, which the mapping carries
    // over to the physical element.
    const int n = static_cast<int>(poly.size());
    Polygon ref;
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * M_PI * i / n;
        ref.push_back({std::cos(a), std::sin(a)});
    }
    std::vector<PolyFemQuadPoint> points;
    points.reserve(static_cast<size_t>(n) * static_cast<size_t>(rule.weights.size()));
    for (int i = 0; i < n; ++i) {
        const Vec2& a = ref[static_cast<size_t>(i)];
        const Vec2& b = ref[static_cast<size_t>((i + 1) % n)];
        const double area2 = cross2(a, b); // fan apex at the origin
        for (long q = 0; q < rule.weights.size(); ++q) {
            const Eigen::Vector3d& l = rule.bary[static_cast<size_t>(q)];
            const Vec2 xi = l[1] * a + l[2] * b;
            const ShapeEval sh = laplace_shape(xi, ref);

            Eigen::Matrix2d J = Eigen::Matrix2d::Zero(); // d(x)/d(xi)
            Vec2 x = Vec2::Zero();
            for (int k = 0; k < n; ++k) {
                x += sh.values[k] * poly[static_cast<size_t>(k)];
                J += poly[static_cast<size_t>(k)] * sh.grads.row(k);
            }
            const double det = J.determinant();
            if (det <= 0.0)
                throw std::runtime_error("polyfem_quadrature: non-positive mapping Jacobian");

            PolyFemQuadPoint pt;
            pt.x = x;
            pt.weight = rule.weights[q] * area2 * det;
            pt.N = sh.values;
            pt.dNdx = sh.grads * J.inverse();
            points.push_back(std::move(pt));
        }
    }
    return points;
}

Eigen::MatrixXd stiffness_polyfem(const Polygon& poly, const Material& mat,
                                  const TriangleRule& rule) {
    const int n = static_cast<int>(poly.size());
    const Eigen::Matrix3d D = mat.D();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (const PolyFemQuadPoint& pt : polyfem_quadrature(poly, rule)) {
        const Eigen::MatrixXd B = b_matrix_from_grads(pt.dNdx);
        K.noalias() += B.transpose() * D * B * pt.weight;
    }
    return K;
}

std::vector<SmoothedSubcell> nsfem_subcells(const Polygon& poly) {
    const int n = static_cast<int>(poly.size());
    const AveragingShapeTable table = averaging_shapes(n);
    Vec2 O = Vec2::Zero();
    for (const Vec2& v : poly) O += v;
    O /= n;

    std::vector<SmoothedSubcell> cells;
    cells.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        const Vec2& vi = poly[static_cast<size_t>(i)];
        const Vec2& vj = poly[static_cast<size_t>((i + 1) % n)];
        const double area = 0.5 * cross2(vi - O, vj - O);
        if (area <= 0.0) throw std::runtime_error("stiffness_nsfem: degenerate subcell");

        // One Gauss point per subcell edge: midpoint value times edge length,
        // weighted by the outward normal.
        struct EdgeEval { Vec2 a, b; Eigen::VectorXd mid; };
        const EdgeEval edges[3] = {
            {O, vi, table.spoke_mid.row(i)},
            {vi, vj, table.edge_mid.row(i)},
            {vj, O, table.spoke_mid.row((i + 1) % n)},
        };
        Eigen::VectorXd bx = Eigen::VectorXd::Zero(n);
        Eigen::VectorXd by = Eigen::VectorXd::Zero(n);
        for (const EdgeEval& e : edges) {
            const Vec2 t = e.b - e.a;
            const double len = t.norm();
            const Vec2 normal(t.y() / len, -t.x() / len); // outward for CCW subcell
            bx += e.mid * (normal.x() * len);
            by += e.mid * (normal.y() * len);
        }
        SmoothedSubcell sc;
        sc.area = area;
        sc.B = Eigen::MatrixXd::Zero(3, 2 * n);
        for (int k = 0; k < n; ++k) {
            sc.B(0, 2 * k) = bx(k) / area;
            sc.B(1, 2 * k + 1) = by(k) / area;
            sc.B(2, 2 * k) = by(k) / area;
            sc.B(2, 2 * k + 1) = bx(k) / area;
        }
        cells.push_back(std::move(sc));
    }
    return cells;
}

Eigen::MatrixXd stiffness_nsfem(const Polygon& poly, const Material& mat) {
    const int n = static_cast<int>(poly.size());
    const Eigen::Matrix3d D = mat.D();
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (const SmoothedSubcell& sc : nsfem_subcells(poly))
        K.noalias() += sc.B.transpose() * D * sc.B * sc.area;
    return K;
}

// ---------------------------------------------------------------------------
// Scaled boundary polygon
// ---------------------------------------------------------------------------

SbfemGeometry make_sbfem_geometry(const Polygon& poly, const Vec2& scaling_center, int order,
                                  bool closed) {
    SbfemGeometry g;
    g.scaling_center = scaling_center;
    g.order = order;
    g.closed = closed;
    const Eigen::VectorXd lob = lobatto_nodes_1d(order);
    const size_t n = poly.size();
    const size_t n_edges = closed ? n : n - 1;

    for (size_t e = 0; e < n_edges; ++e) {
        const Vec2& a = poly[e];
        const Vec2& b = poly[(e + 1) % n];
        std::vector<int> conn;
        if (e == 0) {
            g.nodes.push_back(a);
        }
        conn.push_back(static_cast<int>(g.nodes.size()) - 1);
        for (int k = 1; k < order; ++k) {
            const double t = 0.5 * (lob[k] + 1.0);
            g.nodes.push_back(a + t * (b - a));
            conn.push_back(static_cast<int>(g.nodes.size()) - 1);
        }
        if (closed && e + 1 == n_edges) {
            conn.push_back(0);
        } else {
            g.nodes.push_back(b);
            conn.push_back(static_cast<int>(g.nodes.size()) - 1);
        }
        g.elements.push_back(conn);
    }
    return g;
}

void sbfem_b_matrices(const SbfemGeometry& geom, int element, double eta, Eigen::MatrixXd& b1,
                      Eigen::MatrixXd& b2, double& det_j) {
    const auto& conn = geom.elements[static_cast<size_t>(element)];
    const int ne = static_cast<int>(conn.size());
    const Shape1D sh = lagrange_shape_1d(geom.order, eta);

    double x = 0.0, y = 0.0, dx = 0.0, dy = 0.0;
    for (int i = 0; i < ne; ++i) {
        const Vec2 p = geom.nodes[static_cast<size_t>(conn[static_cast<size_t>(i)])] - geom.scaling_center;
        x += sh.values[i] * p.x();
        y += sh.values[i] * p.y();
        dx += sh.derivs[i] * p.x();
        dy += sh.derivs[i] * p.y();
    }
    det_j = x * dy - y * dx;
    if (det_j <= 0.0)
        throw std::runtime_error("sbfem: |J| <= 0 on boundary element " + std::to_string(element) +
                                 " (polygon not star-convex about the scaling center)");

    b1 = Eigen::MatrixXd::Zero(3, 2 * ne);
    b2 = Eigen::MatrixXd::Zero(3, 2 * ne);
    for (int i = 0; i < ne; ++i) {
        const double Ni = sh.values[i];
        const double dNi = sh.derivs[i];
        b1(0, 2 * i) = dy * Ni;
        b1(1, 2 * i + 1) = -dx * Ni;
        b1(2, 2 * i) = -dx * Ni;
        b1(2, 2 * i + 1) = dy * Ni;
        b2(0, 2 * i) = -y * dNi;
        b2(1, 2 * i + 1) = x * dNi;
        b2(2, 2 * i) = x * dNi;
        b2(2, 2 * i + 1) = -y * dNi;
    }
    b1 /= det_j;
    b2 /= det_j;
}

SbfemCoefficients sbfem_coefficient_matrices(const SbfemGeometry& geom, const Material& mat) {
    const Eigen::Matrix3d D = mat.D();
    const int nd = geom.n_dof();
    SbfemCoefficients c;
    c.E0 = Eigen::MatrixXd::Zero(nd, nd);
    c.E1 = Eigen::MatrixXd::Zero(nd, nd);
    c.E2 = Eigen::MatrixXd::Zero(nd, nd);
    const QuadratureRule1D gauss = gauss_legendre_1d(geom.order + 1);

    Eigen::MatrixXd b1, b2;
    for (size_t e = 0; e < geom.elements.size(); ++e) {
        const auto& conn = geom.elements[e];
        const int ne = static_cast<int>(conn.size());
        std::vector<int> dofs(static_cast<size_t>(2 * ne));
        for (int i = 0; i < ne; ++i) {
            dofs[static_cast<size_t>(2 * i)] = 2 * conn[static_cast<size_t>(i)];
            dofs[static_cast<size_t>(2 * i + 1)] = 2 * conn[static_cast<size_t>(i)] + 1;
        }
        for (long q = 0; q < gauss.points.size(); ++q) {
            double det_j = 0.0;
            sbfem_b_matrices(geom, static_cast<int>(e), gauss.points[q], b1, b2, det_j);
            const double w = gauss.weights[q] * det_j;
            const Eigen::MatrixXd e0 = b1.transpose() * D * b1 * w;
            const Eigen::MatrixXd e1 = b2.transpose() * D * b1 * w;
            const Eigen::MatrixXd e2 = b2.transpose() * D * b2 * w;
            for (int i = 0; i < 2 * ne; ++i)
                for (int j = 0; j < 2 * ne; ++j) {
                    c.E0(dofs[static_cast<size_t>(i)], dofs[static_cast<size_t>(j)]) += e0(i, j);
                    c.E1(dofs[static_cast<size_t>(i)], dofs[static_cast<size_t>(j)]) += e1(i, j);
                    c.E2(dofs[static_cast<size_t>(i)], dofs[static_cast<size_t>(j)]) += e2(i, j);
                }
        }
    }
    return c;
}

namespace {

// Parlett-Reinsch balancing: diagonal similarity D^-1 Z D equilibrating row
// and column norms. Improves QR convergence; eigenvectors scale back by D.
Eigen::VectorXd balance_in_place(Eigen::MatrixXd& Z) {
    const long n = Z.rows();
    Eigen::VectorXd scale = Eigen::VectorXd::Ones(n);
    const double radix = 2.0;
    bool changed = true;
    for (int sweep = 0; sweep < 50 && changed; ++sweep) {
        changed = false;
        for (long i = 0; i < n; ++i) {
            double c = Z.col(i).lpNorm<1>() - std::abs(Z(i, i));
            double r = Z.row(i).lpNorm<1>() - std::abs(Z(i, i));
            if (c == 0.0 || r == 0.0) continue;
            const double sum = c + r;
            double f = 1.0;
            while (c < r / radix) {
                c *= radix;
                r /= radix;
                f *= radix;
            }
            while (c >= r * radix) {
                c /= radix;
                r *= radix;
                f /= radix;
            }
            if ((c + r) < 0.95 * sum && f != 1.0) {
                scale[i] *= f;
                Z.row(i) /= f;
                Z.col(i) *= f;
                changed = true;
            }
        }
    }
    return scale;
}

} // namespace

Eigen::MatrixXd sbfem_hamiltonian(const SbfemCoefficients& coeff) {
    const int nd = static_cast<int>(coeff.E0.rows());
    const Eigen::MatrixXd E0_inv_E1t = coeff.E0.ldlt().solve(coeff.E1.transpose());
    const Eigen::MatrixXd E0_inv = coeff.E0.ldlt().solve(Eigen::MatrixXd::Identity(nd, nd));
    Eigen::MatrixXd Z(2 * nd, 2 * nd);
    Z.topLeftCorner(nd, nd) = E0_inv_E1t;
    Z.topRightCorner(nd, nd) = -E0_inv;
    Z.bottomLeftCorner(nd, nd) = coeff.E1 * E0_inv_E1t - coeff.E2;
    Z.bottomRightCorner(nd, nd) = -coeff.E1 * E0_inv;
    return Z;
}

SbfemModalData sbfem_solve_element(const SbfemGeometry& geom, const Material& mat) {
    return sbfem_solve_element(geom, sbfem_coefficient_matrices(geom, mat), mat);
}

SbfemModalData sbfem_solve_element(const SbfemGeometry& geom, const SbfemCoefficients& coeff,
                                   const Material& mat) {
    const int nd = geom.n_dof();
    // Normalize the stiffness scale before the eigensolve; the eigenvalues
    // are dimensionless exponents and Phi_q scales back linearly.
    const double s = coeff.E0.cwiseAbs().maxCoeff();
    if (!(s > 0.0)) throw std::runtime_error("sbfem_solve_element: zero coefficient matrices");
    SbfemCoefficients sc;
    sc.E0 = coeff.E0 / s;
    sc.E1 = coeff.E1 / s;
    sc.E2 = coeff.E2 / s;
    {
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(sc.E0);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw std::runtime_error("sbfem_solve_element: E0 not positive definite");
    }
    const Eigen::MatrixXd Z = sbfem_hamiltonian(sc);

    Eigen::MatrixXd Zb = Z;
    const Eigen::VectorXd bal = balance_in_place(Zb);
    // The QR iteration can stall on rare inputs; diagonal shifts leave the
    // eigenvectors untouched and restart it from a different configuration.
    Eigen::EigenSolver<Eigen::MatrixXd> eig;
    eig.setMaxIterations(200 * static_cast<int>(Zb.rows()));
    double mu = 0.0;
    for (const double shift : {0.0, 0.0314159, -0.0271828, 0.1, -0.1}) {
        mu = shift;
        eig.compute(Zb - mu * Eigen::MatrixXd::Identity(Zb.rows(), Zb.cols()));
        if (eig.info() == Eigen::Success) break;
    }
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("sbfem_solve_element: eigensolver failed");
    const Eigen::VectorXcd lam = eig.eigenvalues().array() + mu;
    Eigen::MatrixXcd vec = eig.eigenvectors();
    for (long j = 0; j < vec.cols(); ++j) {
        vec.col(j) = bal.cast<Cplx>().asDiagonal() * vec.col(j);
        vec.col(j) /= vec.col(j).norm();
    }

    std::vector<int> order(static_cast<size_t>(2 * nd));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return lam[a].real() < lam[b].real();
    });

    // Eigenvectors of tightly clustered eigenvalues can come back with large
    // residuals (no re-orthogonalization across a repeated eigenvalue).
    // Refine such clusters by shifted inverse subspace iteration; the zero
    // and -1 clusters are replaced by exact modes below and are skipped.
    {
        const Eigen::MatrixXcd Zc = Z.cast<Cplx>();
        std::vector<int> group;
        for (int k = 0; k < nd; k += static_cast<int>(group.size())) {
            group.clear();
            const Cplx l0 = lam[order[static_cast<size_t>(k)]];
            group.push_back(order[static_cast<size_t>(k)]);
            for (int j = k + 1; j < nd; ++j) {
                if (std::abs(lam[order[static_cast<size_t>(j)]] - l0) > 1e-6) break;
                group.push_back(order[static_cast<size_t>(j)]);
            }
            if (group.size() < 2) continue;
            if (std::abs(l0) < 0.25 || std::abs(l0 - Cplx(-1.0, 0.0)) < 1e-6) continue;
            double worst = 0.0;
            for (int idx : group)
                worst = std::max(worst, (Zc * vec.col(idx) - lam[idx] * vec.col(idx)).norm() /
                                            vec.col(idx).norm());
            if (worst < 1e-10) continue;

            Eigen::MatrixXcd V(2 * nd, static_cast<long>(group.size()));
            Cplx mean(0.0, 0.0);
            double spread = 0.0;
            for (size_t j = 0; j < group.size(); ++j) {
                V.col(static_cast<long>(j)) = vec.col(group[j]);
                mean += lam[group[j]];
            }
            mean /= static_cast<double>(group.size());
            for (int idx : group) spread = std::max(spread, std::abs(lam[idx] - mean));
            const Cplx shift = mean + Cplx(1e-8, 1e-8);
            const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(
                Zc - shift * Eigen::MatrixXcd::Identity(2 * nd, 2 * nd));
            for (int pass = 0; pass < 2; ++pass) {
                const Eigen::MatrixXcd W = lu.solve(V);
                const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(W);
                V = qr.householderQ() * Eigen::MatrixXcd::Identity(2 * nd, static_cast<long>(group.size()));
            }
            const double allowed = 1e-7 + 4.0 * spread;
            for (size_t j = 0; j < group.size(); ++j) {
                const double res =
                    (Zc * V.col(static_cast<long>(j)) - mean * V.col(static_cast<long>(j))).norm();
                if (res > allowed)
                    throw std::runtime_error(
                        "sbfem_solve_element: cluster refinement failed (defective cluster?)");
                vec.col(group[j]) = V.col(static_cast<long>(j));
            }
        }
    }

    SbfemModalData modal;
    modal.geom = geom;
    modal.E0 = coeff.E0;
    modal.E1 = coeff.E1;
    modal.E2 = coeff.E2;
    modal.lambda.resize(nd);
    modal.phi_u.resize(nd, nd);
    modal.phi_q.resize(nd, nd);
    for (int k = 0; k < nd; ++k) {
        const int src = order[static_cast<size_t>(k)];
        if (lam[src].real() > 0.25)
            throw std::runtime_error(
                "sbfem_solve_element: fewer than 2n eigenvalues with non-positive real part");
        modal.lambda[k] = lam[src];
        modal.phi_u.col(k) = vec.col(src).head(nd);
        modal.phi_q.col(k) = s * vec.col(src).tail(nd);
    }

    // The two selected near-zero eigenpairs are the rigid translations;
    // replace them by exact unit modes with zero boundary force.
    for (int k = nd - 2; k < nd; ++k)
        if (std::abs(modal.lambda[k]) > 0.25)
            throw std::runtime_error("sbfem_solve_element: translation eigenvalues not found");
    modal.lambda[nd - 2] = 0.0;
    modal.lambda[nd - 1] = 0.0;
    modal.phi_u.col(nd - 2).setZero();
    modal.phi_u.col(nd - 1).setZero();
    modal.phi_q.col(nd - 2).setZero();
    modal.phi_q.col(nd - 1).setZero();
    for (int i = 0; i < nd; i += 2) {
        modal.phi_u(i, nd - 2) = 1.0;
        modal.phi_u(i + 1, nd - 1) = 1.0;
    }

    // The lambda = -1 cluster also has analytically known modes ("u = ksi *
    // linear field" with boundary forces (E0 + E1^T) u, from the ODE
    // identity (E0 + E1^T - E1 - E2) u = 0). Substituting them sidesteps
    // inaccurate eigenvectors at the repeated eigenvalue: all four linear
    // states on a closed boundary; only the zero-traction pair (rotation and
    // the crack-aligned uniaxial state) on an open crack chain.
    {
        std::vector<int> cluster;
        for (int k = 0; k < nd; ++k)
            if (std::abs(modal.lambda[k] - Cplx(-1.0, 0.0)) < 1e-6) cluster.push_back(k);
        const size_t expected = geom.closed ? 4 : 2;
        if (cluster.size() != expected)
            throw std::runtime_error("sbfem_solve_element: linear-mode cluster has " +
                                     std::to_string(cluster.size()) + " members, expected " +
                                     std::to_string(expected));
        Eigen::MatrixXd lin = Eigen::MatrixXd::Zero(nd, static_cast<long>(expected));
        if (geom.closed) {
            for (size_t i = 0; i < geom.nodes.size(); ++i) {
                const Vec2 p = geom.nodes[i] - geom.scaling_center;
                const long r = static_cast<long>(2 * i);
                lin(r, 0) = p.x();      // u = (x, 0)
                lin(r + 1, 1) = p.y();  // u = (0, y)
                lin(r, 2) = p.y();      // u = (y, x)
                lin(r + 1, 2) = p.x();
                lin(r, 3) = -p.y();     // rotation
                lin(r + 1, 3) = p.x();
            }
        } else {
            // Crack faces along d stay traction-free for the rotation and
            // for uniaxial stress aligned with the slit.
            const Vec2 d = (geom.nodes.front() - geom.scaling_center).normalized();
            const Vec2 n(-d.y(), d.x());
            const double nb = mat.nu_bar();
            for (size_t i = 0; i < geom.nodes.size(); ++i) {
                const Vec2 p = geom.nodes[i] - geom.scaling_center;
                const long r = static_cast<long>(2 * i);
                lin(r, 0) = -p.y();     // rotation
                lin(r + 1, 0) = p.x();
                const Vec2 t_mode = p.dot(d) * d - nb * p.dot(n) * n;
                lin(r, 1) = t_mode.x();
                lin(r + 1, 1) = t_mode.y();
            }
        }
        const Eigen::MatrixXd force = (coeff.E0 + coeff.E1.transpose()) * lin;
        for (size_t j = 0; j < expected; ++j) {
            const int k = cluster[j];
            modal.lambda[k] = Cplx(-1.0, 0.0);
            modal.phi_u.col(k) = lin.col(static_cast<long>(j));
            modal.phi_q.col(k) = force.col(static_cast<long>(j));
        }
    }
    return modal;
}

Eigen::MatrixXd stiffness_sbfem(const SbfemModalData& modal) {
    const int nd = static_cast<int>(modal.phi_u.rows());
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(modal.phi_u);
    if (!lu.isInvertible())
        throw std::runtime_error("stiffness_sbfem: Phi_u is singular");
    const double cond = lu.matrixLU().diagonal().cwiseAbs().maxCoeff() /
                        lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (cond > 1e12)
        throw std::runtime_error("stiffness_sbfem: Phi_u condition number exceeds 1e12");

    const Eigen::MatrixXcd Kc = modal.phi_q * lu.inverse();
    const Eigen::MatrixXd K = Kc.real();
    const double asym = (K - K.transpose()).norm() / std::max(K.norm(), 1e-300);
    if (asym > 1e-6)
        throw std::runtime_error("stiffness_sbfem: relative asymmetry " + std::to_string(asym) +
                                 " exceeds 1e-6");
    return 0.5 * (K + K.transpose());
}

} // namespace polyelast
