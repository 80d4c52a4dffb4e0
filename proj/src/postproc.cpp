#include "polyelast/postproc.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace polyelast {

namespace {

using Cplx = std::complex<double>;

Eigen::VectorXcd xi_power(const Eigen::VectorXcd& lambda, double xi, double shift) {
    // Entries xi^(-lambda - shift); translations (lambda = 0) stay finite for
    // shift = 0 and are paired with vanishing mode columns for shift = 1.
    Eigen::VectorXcd p(lambda.size());
    const Cplx lx = std::log(Cplx(xi, 0.0));
    for (long i = 0; i < lambda.size(); ++i) p[i] = std::exp((-lambda[i] - shift) * lx);
    return p;
}

} // namespace

Eigen::VectorXcd sbfem_integration_constants(const SbfemModalData& modal,
                                             const Eigen::VectorXd& u_b) {
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(modal.phi_u);
    if (!lu.isInvertible())
        throw std::runtime_error("sbfem_integration_constants: Phi_u singular");
    const double cond = lu.matrixLU().diagonal().cwiseAbs().maxCoeff() /
                        lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (cond > 1e12)
        throw std::runtime_error("sbfem_integration_constants: Phi_u ill-conditioned");
    return lu.solve(u_b.cast<Cplx>());
}

Eigen::VectorXd sbfem_boundary_displacements(const PolygonMesh& mesh, const DofMap& dofs,
                                             const Eigen::VectorXd& d, int e) {
    const std::vector<int> pts = dofs.element_points(mesh, e);
    Eigen::VectorXd u(2 * pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        u[static_cast<long>(2 * i)] = d[dofs.dof_x(pts[i])];
        u[static_cast<long>(2 * i + 1)] = d[dofs.dof_y(pts[i])];
    }
    return u;
}

Vec2 sbfem_displacement_at(const SbfemModalData& modal, const Eigen::VectorXcd& c, double xi,
                           int elem, double eta) {
    const Eigen::VectorXcd scale = xi_power(modal.lambda, xi, 0.0);
    const Eigen::VectorXcd u_xi = modal.phi_u * scale.cwiseProduct(c).matrix();
    const auto& conn = modal.geom.elements[static_cast<size_t>(elem)];
    const Shape1D sh = lagrange_shape_1d(modal.geom.order, eta);
    Cplx ux(0.0), uy(0.0);
    for (size_t i = 0; i < conn.size(); ++i) {
        ux += sh.values[static_cast<long>(i)] * u_xi[2 * conn[i]];
        uy += sh.values[static_cast<long>(i)] * u_xi[2 * conn[i] + 1];
    }
    return Vec2(ux.real(), uy.real());
}

namespace {

// Stress modes Psi_sigma(eta) restricted to one boundary element:
// D (-B1 Phi_u Lambda + B2 Phi_u), a 3 x n_mode complex matrix.
Eigen::MatrixXcd stress_modes_at(const SbfemModalData& modal, int elem, double eta,
                                 const Eigen::Matrix3d& D) {
    Eigen::MatrixXd b1, b2;
    double det_j = 0.0;
    sbfem_b_matrices(modal.geom, elem, eta, b1, b2, det_j);
    const auto& conn = modal.geom.elements[static_cast<size_t>(elem)];
    const long nm = modal.lambda.size();
    Eigen::MatrixXcd phi_loc(2 * conn.size(), nm);
    for (size_t i = 0; i < conn.size(); ++i) {
        phi_loc.row(static_cast<long>(2 * i)) = modal.phi_u.row(2 * conn[i]);
        phi_loc.row(static_cast<long>(2 * i + 1)) = modal.phi_u.row(2 * conn[i] + 1);
    }
    const Eigen::MatrixXcd term =
        -b1.cast<Cplx>() * phi_loc * modal.lambda.asDiagonal() + b2.cast<Cplx>() * phi_loc;
    return D.cast<Cplx>() * term;
}

} // namespace

Eigen::Vector3d sbfem_stress_at(const SbfemModalData& modal, const Eigen::VectorXcd& c, double xi,
                                int elem, double eta, const Material& mat) {
    if (xi <= 0.0) {
        for (long i = 0; i < modal.lambda.size(); ++i) {
            const double re = modal.lambda[i].real();
            if (re > -1.0 + 1e-9 && re < -1e-9 && std::abs(c[i]) > 0.0)
                throw std::invalid_argument("sbfem_stress_at: stress unbounded at the tip");
        }
    }
    const Eigen::MatrixXcd psi = stress_modes_at(modal, elem, eta, mat.D());
    const Eigen::VectorXcd scale = xi_power(modal.lambda, xi, 1.0);
    Eigen::Vector3cd s = Eigen::Vector3cd::Zero();
    for (long i = 0; i < modal.lambda.size(); ++i) {
        if (modal.lambda[i] == Cplx(0.0, 0.0)) continue; // translations: zero stress
        s += psi.col(i) * (scale[i] * c[i]);
    }
    const double imag = s.imag().norm();
    const double real = s.real().norm();
    if (imag > 1e-8 * std::max(real, 1e-300) && imag > 1e-12)
        throw std::runtime_error("sbfem_stress_at: complex mode pairs failed to combine");
    return s.real();
}

Eigen::VectorXd sbfem_boundary_forces(const SbfemModalData& modal, const Eigen::VectorXcd& c) {
    // f = (E0 xi u,xi + E1^T u)|_{xi=1} with u(xi) = Phi_u xi^{-Lambda} c.
    const Eigen::VectorXcd lc = modal.lambda.cwiseProduct(c);
    const Eigen::VectorXcd f = -modal.E0.cast<Cplx>() * (modal.phi_u * lc) +
                               modal.E1.transpose().cast<Cplx>() * (modal.phi_u * c);
    return f.real();
}

SifResult extract_sif(const SbfemModalData& modal, const Eigen::VectorXcd& c, double crack_angle,
                      const Material& mat, double sigma_ref, double a_ref) {
    std::vector<long> singular;
    for (long i = 0; i < modal.lambda.size(); ++i) {
        const double re = modal.lambda[i].real();
        if (re > -1.0 + 1e-6 && re < -1e-6) singular.push_back(i);
    }
    if (singular.empty())
        throw std::runtime_error("extract_sif: element is not a crack-tip element");

    // Locate the boundary element hit by the theta = 0 ray.
    const Vec2 dir(std::cos(crack_angle), std::sin(crack_angle));
    int hit_elem = -1;
    double eta0 = 0.0, L0 = 0.0;
    for (size_t e = 0; e < modal.geom.elements.size(); ++e) {
        const auto& conn = modal.geom.elements[e];
        const Vec2 a = modal.geom.nodes[static_cast<size_t>(conn.front())] - modal.geom.scaling_center;
        const Vec2 b = modal.geom.nodes[static_cast<size_t>(conn.back())] - modal.geom.scaling_center;
        double s_ray = 0.0, t_seg = 0.0;
        if (!ray_segment_intersect(Vec2::Zero(), dir, a, b, s_ray, t_seg)) continue;
        if (s_ray <= 1e-12) continue;
        hit_elem = static_cast<int>(e);
        eta0 = 2.0 * std::clamp(t_seg, 0.0, 1.0) - 1.0;
        L0 = s_ray;
        break;
    }
    if (hit_elem < 0) throw std::runtime_error("extract_sif: theta=0 ray misses the boundary");

    // Stress modes jump between boundary elements; a hit at a shared node is
    // evaluated as the mean of both one-sided limits.
    Eigen::MatrixXcd psi = stress_modes_at(modal, hit_elem, eta0, mat.D());
    const int n_be = static_cast<int>(modal.geom.elements.size());
    if (eta0 > 1.0 - 1e-9 && hit_elem + 1 < n_be) {
        psi = 0.5 * (psi + stress_modes_at(modal, hit_elem + 1, -1.0, mat.D()));
    } else if (eta0 < -1.0 + 1e-9 && hit_elem > 0) {
        psi = 0.5 * (psi + stress_modes_at(modal, hit_elem - 1, 1.0, mat.D()));
    }

    // Rotate the stress modes into the crack frame (x' along the ray).
    const double cs = std::cos(crack_angle), sn = std::sin(crack_angle);
    Cplx syy(0.0), txy(0.0);
    for (long i : singular) {
        const Cplx sxx_g = psi(0, i), syy_g = psi(1, i), txy_g = psi(2, i);
        const Cplx syy_l = sn * sn * sxx_g + cs * cs * syy_g - 2.0 * cs * sn * txy_g;
        const Cplx txy_l = cs * sn * (syy_g - sxx_g) + (cs * cs - sn * sn) * txy_g;
        syy += syy_l * c[i];
        txy += txy_l * c[i];
    }
    const double mag = std::max({std::abs(syy), std::abs(txy), 1e-300});
    if (std::max(std::abs(syy.imag()), std::abs(txy.imag())) > 1e-8 * mag)
        throw std::runtime_error("extract_sif: singular-pair recombination not real");

    SifResult r;
    const double front = std::sqrt(2.0 * M_PI * L0);
    r.K_I = front * syy.real();
    r.K_II = front * txy.real();
    r.L0 = L0;
    if (sigma_ref > 0.0 && a_ref > 0.0) {
        r.F_I = r.K_I / (sigma_ref * std::sqrt(M_PI * a_ref));
        r.F_II = r.K_II / (sigma_ref * std::sqrt(M_PI * a_ref));
    }
    return r;
}

// ---------------------------------------------------------------------------
// Error norms
// ---------------------------------------------------------------------------

namespace {

struct NormAccum {
    double err_l2 = 0.0, ref_l2 = 0.0, err_h1 = 0.0, ref_h1 = 0.0;
    void add(const NormAccum& o) {
        err_l2 += o.err_l2;
        ref_l2 += o.ref_l2;
        err_h1 += o.err_h1;
        ref_h1 += o.ref_h1;
    }
};

void accumulate_point(NormAccum& acc, double w, const Vec2& uh, const Eigen::Vector3d& eps_h,
                      const Vec2& u, const Eigen::Vector3d& eps, const Eigen::Matrix3d& D) {
    const Vec2 du = u - uh;
    const Eigen::Vector3d de = eps - eps_h;
    acc.err_l2 += w * du.squaredNorm();
    acc.ref_l2 += w * u.squaredNorm();
    acc.err_h1 += w * de.dot(D * de);
    acc.ref_h1 += w * eps.dot(D * eps);
}

} // namespace

ErrorNorms error_norms(const PolygonMesh& mesh, const DofMap& dofs, const Eigen::VectorXd& d,
                       const DisplacementField& exact_u, const StressField& exact_stress,
                       const Material& mat, Formulation form, const AssemblyResult& assembly) {
    const TriangleRule rule = dunavant_triangle(6);
    const Eigen::Matrix3d D = mat.D();
    const Eigen::Matrix3d Dinv = D.inverse();
    const int ne = static_cast<int>(mesh.elements.size());

    std::vector<NormAccum> per_element(static_cast<size_t>(ne));
    std::exception_ptr err;

#pragma omp parallel for schedule(dynamic)
    for (int e = 0; e < ne; ++e) {
        try {
            NormAccum acc;
            const Polygon poly = mesh.element_polygon(e);
            const auto& elem = mesh.elements[static_cast<size_t>(e)];
            const size_t nv = elem.size();

            if (form == Formulation::PolyFem) {
                Eigen::VectorXd de(2 * nv);
                for (size_t i = 0; i < nv; ++i) {
                    de[static_cast<long>(2 * i)] = d[dofs.dof_x(elem[i])];
                    de[static_cast<long>(2 * i + 1)] = d[dofs.dof_y(elem[i])];
                }
                for (const PolyFemQuadPoint& pt : polyfem_quadrature(poly, rule)) {
                    Vec2 uh = Vec2::Zero();
                    Eigen::Vector3d eh = Eigen::Vector3d::Zero();
                    for (size_t k = 0; k < nv; ++k) {
                        const Vec2 uk(de[static_cast<long>(2 * k)], de[static_cast<long>(2 * k + 1)]);
                        uh += pt.N[static_cast<long>(k)] * uk;
                        eh[0] += pt.dNdx(static_cast<long>(k), 0) * uk.x();
                        eh[1] += pt.dNdx(static_cast<long>(k), 1) * uk.y();
                        eh[2] += pt.dNdx(static_cast<long>(k), 1) * uk.x() +
                                 pt.dNdx(static_cast<long>(k), 0) * uk.y();
                    }
                    accumulate_point(acc, pt.weight, uh, eh, exact_u(pt.x),
                                     Dinv * exact_stress(pt.x), D);
                }
            } else if (form == Formulation::NSfem) {
                Eigen::VectorXd de(2 * nv);
                Vec2 u_mean = Vec2::Zero();
                for (size_t i = 0; i < nv; ++i) {
                    de[static_cast<long>(2 * i)] = d[dofs.dof_x(elem[i])];
                    de[static_cast<long>(2 * i + 1)] = d[dofs.dof_y(elem[i])];
                    u_mean += Vec2(de[static_cast<long>(2 * i)], de[static_cast<long>(2 * i + 1)]);
                }
                u_mean /= static_cast<double>(nv);
                Vec2 O = Vec2::Zero();
                for (const Vec2& v : poly) O += v;
                O /= static_cast<double>(nv);
                const std::vector<SmoothedSubcell> cells = nsfem_subcells(poly);
                for (size_t i = 0; i < nv; ++i) {
                    const Vec2& a = poly[i];
                    const Vec2& b = poly[(i + 1) % nv];
                    const Eigen::Vector3d eh = cells[i].B * de;
                    const Vec2 ua(de[static_cast<long>(2 * i)], de[static_cast<long>(2 * i + 1)]);
                    const size_t j = (i + 1) % nv;
                    const Vec2 ub(de[static_cast<long>(2 * j)], de[static_cast<long>(2 * j + 1)]);
                    const double area2 = cross2(a - O, b - O);
                    for (long q = 0; q < rule.weights.size(); ++q) {
                        const Eigen::Vector3d& l = rule.bary[static_cast<size_t>(q)];
                        const Vec2 x = l[0] * O + l[1] * a + l[2] * b;
                        const Vec2 uh = l[0] * u_mean + l[1] * ua + l[2] * ub;
                        accumulate_point(acc, rule.weights[q] * area2, uh, eh, exact_u(x),
                                         Dinv * exact_stress(x), D);
                    }
                }
            } else {
                const SbfemModalData& modal = assembly.modal[static_cast<size_t>(e)];
                const Eigen::VectorXd ub = sbfem_boundary_displacements(mesh, dofs, d, e);
                const Eigen::VectorXcd c = sbfem_integration_constants(modal, ub);
                const Vec2 ctr = modal.geom.scaling_center;
                for (size_t be = 0; be < modal.geom.elements.size(); ++be) {
                    const auto& conn = modal.geom.elements[be];
                    const Vec2 a = modal.geom.nodes[static_cast<size_t>(conn.front())];
                    const Vec2 b = modal.geom.nodes[static_cast<size_t>(conn.back())];
                    const double area2 = cross2(a - ctr, b - ctr);
                    for (long q = 0; q < rule.weights.size(); ++q) {
                        const Eigen::Vector3d& l = rule.bary[static_cast<size_t>(q)];
                        const Vec2 x = l[0] * ctr + l[1] * a + l[2] * b;
                        const double xi = l[1] + l[2];
                        const double eta = 2.0 * l[2] / xi - 1.0;
                        const Vec2 uh = sbfem_displacement_at(modal, c, xi, static_cast<int>(be), eta);
                        const Eigen::Vector3d sh =
                            sbfem_stress_at(modal, c, xi, static_cast<int>(be), eta, mat);
                        accumulate_point(acc, rule.weights[q] * area2, uh, Dinv * sh, exact_u(x),
                                         Dinv * exact_stress(x), D);
                    }
                }
            }
            per_element[static_cast<size_t>(e)] = acc;
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    NormAccum total;
    for (const NormAccum& a : per_element) total.add(a); // fixed order: deterministic
    ErrorNorms out;
    out.l2_rel = std::sqrt(total.err_l2 / total.ref_l2);
    out.h1_rel = std::sqrt(total.err_h1 / total.ref_h1);
    out.dofs = dofs.total_dofs();
    double hsum = 0.0;
    for (int e = 0; e < ne; ++e) hsum += std::sqrt(std::abs(polygon_area(mesh.element_polygon(e))));
    out.h = hsum / ne;
    return out;
}

double convergence_rate(const std::vector<double>& errors, const std::vector<double>& measures,
                        bool measures_are_dofs) {
    if (errors.size() < 2 || errors.size() != measures.size())
        throw std::invalid_argument("convergence_rate: need >= 2 matching levels");
    std::vector<double> x, y;
    for (size_t i = 0; i < errors.size(); ++i) {
        if (errors[i] <= 0.0) throw std::invalid_argument("convergence_rate: zero error");
        const double h = measures_are_dofs ? 1.0 / std::sqrt(measures[i]) : measures[i];
        x.push_back(std::log(h));
        y.push_back(std::log(errors[i]));
    }
    const double n = static_cast<double>(x.size());
    double xm = 0.0, ym = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        xm += x[i];
        ym += y[i];
    }
    xm /= n;
    ym /= n;
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - xm) * (y[i] - ym);
        den += (x[i] - xm) * (x[i] - xm);
    }
    if (den == 0.0) throw std::invalid_argument("convergence_rate: all levels have the same size");
    return num / den;
}

} // namespace polyelast
