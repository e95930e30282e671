#include "invset/czono.hpp"

#include <cmath>

#include "invset/linprog.hpp"

namespace invset {

ConstrainedZonotope::ConstrainedZonotope(Vector c, Matrix G, Matrix F_eq, Vector theta_eq)
    : c_(std::move(c)), G_(std::move(G)), Feq_(std::move(F_eq)), theta_eq_(std::move(theta_eq)) {
    if (G_.rows() != c_.size()) {
        fail(ErrorCode::DimensionMismatch, "ConstrainedZonotope: G rows must match center");
    }
    if (Feq_.rows() != theta_eq_.size()) {
        fail(ErrorCode::DimensionMismatch, "ConstrainedZonotope: F_eq rows and theta_eq differ");
    }
    if (Feq_.rows() > 0 && Feq_.cols() != G_.cols()) {
        fail(ErrorCode::DimensionMismatch, "ConstrainedZonotope: F_eq columns must match G");
    }
    if (Feq_.rows() == 0 && Feq_.cols() != G_.cols()) {
        Feq_.resize(0, G_.cols());
    }
    require_finite(c_, "ConstrainedZonotope c");
    require_finite(G_, "ConstrainedZonotope G");
    require_finite(Feq_, "ConstrainedZonotope F_eq");
    require_finite(theta_eq_, "ConstrainedZonotope theta_eq");
}

ConstrainedZonotope ConstrainedZonotope::zonotope(Vector c, Matrix G) {
    const Eigen::Index D = G.cols();
    return ConstrainedZonotope(std::move(c), std::move(G), Matrix(0, D), Vector(0));
}

ConstrainedZonotope ConstrainedZonotope::box(const Vector& radii) {
    return zonotope(Vector::Zero(radii.size()), radii.asDiagonal());
}

ConstrainedZonotope ConstrainedZonotope::box(Eigen::Index n, double radius) {
    return box(Vector::Constant(n, radius));
}

ConstrainedZonotope ConstrainedZonotope::linear_map(const Matrix& M) const {
    if (M.cols() != dim()) {
        fail(ErrorCode::DimensionMismatch, "linear_map: map columns must match set dimension");
    }
    return ConstrainedZonotope(M * c_, M * G_, Feq_, theta_eq_);
}

ConstrainedZonotope cz_intersect_under_map(const ConstrainedZonotope& Z1, const Matrix& R,
                                           const ConstrainedZonotope& Z2) {
    if (R.cols() != Z1.dim() || R.rows() != Z2.dim()) {
        fail(ErrorCode::DimensionMismatch, "cz_intersect_under_map: map dimensions mismatch");
    }
    const Eigen::Index D1 = Z1.generators(), D2 = Z2.generators();
    const Eigen::Index n1 = Z1.constraints(), n2 = Z2.constraints();
    const Eigen::Index r = Z2.dim();

    Matrix G(Z1.dim(), D1 + D2);
    G.leftCols(D1) = Z1.G();
    G.rightCols(D2).setZero();

    Matrix F = Matrix::Zero(n1 + n2 + r, D1 + D2);
    Vector theta(n1 + n2 + r);
    if (n1 > 0) {
        F.block(0, 0, n1, D1) = Z1.F_eq();
        theta.head(n1) = Z1.theta_eq();
    }
    if (n2 > 0) {
        F.block(n1, D1, n2, D2) = Z2.F_eq();
        theta.segment(n1, n2) = Z2.theta_eq();
    }
    F.block(n1 + n2, 0, r, D1) = R * Z1.G();
    F.block(n1 + n2, D1, r, D2) = -Z2.G();
    theta.tail(r) = Z2.center() - R * Z1.center();

    return ConstrainedZonotope(Z1.center(), std::move(G), std::move(F), std::move(theta));
}

ConstrainedZonotope cz_intersect(const ConstrainedZonotope& Z1, const ConstrainedZonotope& Z2) {
    if (Z1.dim() != Z2.dim()) {
        fail(ErrorCode::DimensionMismatch, "cz_intersect: dimension mismatch");
    }
    return cz_intersect_under_map(Z1, Matrix::Identity(Z1.dim(), Z1.dim()), Z2);
}

ConstrainedZonotope closed_loop_constraints_cz(const ConstrainedZonotope& X,
                                               const ConstrainedZonotope& Uc, const Matrix& K) {
    if (K.rows() != Uc.dim() || K.cols() != X.dim()) {
        fail(ErrorCode::DimensionMismatch, "closed_loop_constraints_cz: K must be m x n");
    }
    return cz_intersect_under_map(X, K, Uc);
}

ConstrainedZonotope cz_recurrence_step(const ConstrainedZonotope& Zk, const Matrix& M_inv,
                                       const ConstrainedZonotope& Xbar) {
    if (M_inv.rows() != M_inv.cols() || M_inv.rows() != Zk.dim()) {
        fail(ErrorCode::DimensionMismatch, "cz_recurrence_step: M_inv must be n x n");
    }
    if (Xbar.dim() != Zk.dim()) {
        fail(ErrorCode::DimensionMismatch, "cz_recurrence_step: dimension mismatch");
    }
    return cz_intersect(Zk.linear_map(M_inv), Xbar);
}

bool cz_contained_in_hpoly(const ConstrainedZonotope& Z, const HPolyhedron& P, double tol) {
    if (Z.dim() != P.dim()) {
        fail(ErrorCode::DimensionMismatch, "cz_contained_in_hpoly: dimension mismatch");
    }
    if (cz_is_empty(Z, tol)) {
        fail(ErrorCode::EmptySet, "cz_contained_in_hpoly: constrained zonotope is empty");
    }
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        if (support_cz(Z, P.F().row(i).transpose(), tol) > P.theta()(i) + tol) {
            return false;
        }
    }
    return true;
}

ConstrainedZonotope cz_from_hpoly(const HPolyhedron& P, double tol) {
    const Eigen::Index n = P.dim();
    if (P.flagged_empty() || hpoly_is_empty(P, tol)) {
        fail(ErrorCode::EmptySet, "cz_from_hpoly: polyhedron is empty");
    }
    // interval hull via 2n support queries
    Vector lo(n), hi(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector d = Vector::Zero(n);
        d(i) = 1.0;
        const double up = support_hpoly(P, d, tol);
        const double dn = -support_hpoly(P, -d, tol);
        if (!std::isfinite(up) || !std::isfinite(dn)) {
            fail(ErrorCode::Unbounded, "cz_from_hpoly: polyhedron is unbounded");
        }
        lo(i) = dn;
        hi(i) = up;
    }
    const Vector c0 = 0.5 * (lo + hi);
    const Vector rad = (0.5 * (hi - lo)).cwiseMax(0.0);

    // start from the interval hull, then fold each half-space in with one
    // slack generator: f^T x + r s = theta - r with s in [-1, 1],
    // r = (theta - min_{hull} f^T x) / 2
    const Eigen::Index q = P.rows();
    const Eigen::Index D = n + q;
    Matrix G = Matrix::Zero(n, D);
    G.leftCols(n) = rad.asDiagonal();
    Matrix F = Matrix::Zero(q, D);
    Vector theta(q);
    for (Eigen::Index i = 0; i < q; ++i) {
        const Vector f = P.F().row(i).transpose();
        const double th = P.theta()(i);
        const double fmin = f.dot(c0) - (G.leftCols(n).transpose() * f).cwiseAbs().sum();
        const double r = 0.5 * std::max(th - fmin, 0.0);
        F.block(i, 0, 1, n) = f.transpose() * G.leftCols(n);
        F(i, n + i) = r;
        theta(i) = th - r - f.dot(c0);
    }
    return ConstrainedZonotope(c0, std::move(G), std::move(F), std::move(theta));
}

}  // namespace invset
