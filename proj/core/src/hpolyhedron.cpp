#include "invset/hpolyhedron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace invset {

namespace {
constexpr double kZeroRowTol = 1e-14;
}

HPolyhedron::HPolyhedron(Matrix F, Vector theta) {
    if (F.rows() != theta.size()) {
        fail(ErrorCode::DimensionMismatch, "HPolyhedron: F rows and theta length differ");
    }
    require_finite(F, "HPolyhedron F");
    require_finite(theta, "HPolyhedron theta");

    std::vector<Eigen::Index> keep;
    keep.reserve(static_cast<size_t>(F.rows()));
    for (Eigen::Index i = 0; i < F.rows(); ++i) {
        const double norm = F.row(i).norm();
        if (norm <= kZeroRowTol) {
            if (theta(i) < 0.0) flagged_empty_ = true;
            continue;  // 0 <= theta_i rows carry no information
        }
        keep.push_back(i);
    }
    if (keep.size() == static_cast<size_t>(F.rows())) {
        F_ = std::move(F);
        theta_ = std::move(theta);
    } else {
        F_.resize(static_cast<Eigen::Index>(keep.size()), F.cols());
        theta_.resize(static_cast<Eigen::Index>(keep.size()));
        for (size_t r = 0; r < keep.size(); ++r) {
            F_.row(static_cast<Eigen::Index>(r)) = F.row(keep[r]);
            theta_(static_cast<Eigen::Index>(r)) = theta(keep[r]);
        }
    }
}

HPolyhedron HPolyhedron::box(const Vector& radii) {
    const Eigen::Index n = radii.size();
    Matrix F(2 * n, n);
    F.topRows(n).setIdentity();
    F.bottomRows(n) = -Matrix::Identity(n, n);
    Vector theta(2 * n);
    theta.head(n) = radii;
    theta.tail(n) = radii;
    return HPolyhedron(std::move(F), std::move(theta));
}

HPolyhedron HPolyhedron::box(Eigen::Index n, double radius) {
    return box(Vector::Constant(n, radius));
}

bool HPolyhedron::contains_point(const Vector& x, double tol) const {
    if (x.size() != dim()) {
        fail(ErrorCode::DimensionMismatch, "contains_point: dimension mismatch");
    }
    if (flagged_empty_) return false;
    if (rows() == 0) return true;
    return ((F_ * x - theta_).array() <= tol).all();
}

HPolyhedron closed_loop_constraints_h(const HPolyhedron& X, const HPolyhedron& Uc,
                                      const Matrix& K) {
    if (K.rows() != Uc.dim() || K.cols() != X.dim()) {
        fail(ErrorCode::DimensionMismatch, "closed_loop_constraints_h: K must be m x n");
    }
    Matrix F(X.rows() + Uc.rows(), X.dim());
    Vector theta(X.rows() + Uc.rows());
    F.topRows(X.rows()) = X.F();
    F.bottomRows(Uc.rows()) = Uc.F() * K;
    theta.head(X.rows()) = X.theta();
    theta.tail(Uc.rows()) = Uc.theta();
    return HPolyhedron(std::move(F), std::move(theta));
}

HPolyhedron preimage_linear_h(const HPolyhedron& P, const Matrix& M) {
    if (M.rows() != P.dim()) {
        fail(ErrorCode::DimensionMismatch, "preimage_linear_h: map rows must match set dimension");
    }
    return HPolyhedron(P.F() * M, P.theta());
}

HPolyhedron intersect_h(const HPolyhedron& P, const HPolyhedron& Q) {
    if (P.dim() != Q.dim()) {
        fail(ErrorCode::DimensionMismatch, "intersect_h: dimension mismatch");
    }
    Matrix F(P.rows() + Q.rows(), P.dim());
    Vector theta(P.rows() + Q.rows());
    F.topRows(P.rows()) = P.F();
    F.bottomRows(Q.rows()) = Q.F();
    theta.head(P.rows()) = P.theta();
    theta.tail(Q.rows()) = Q.theta();
    HPolyhedron out(std::move(F), std::move(theta));
    return out;
}

HPolyhedron remove_redundant(const HPolyhedron& P, double tol) {
    if (P.flagged_empty() || hpoly_is_empty(P, tol)) {
        fail(ErrorCode::EmptySet, "remove_redundant: polyhedron is empty");
    }
    const Eigen::Index q = P.rows();
    if (q == 0) return P;
    const Matrix& F = P.F();
    const Vector& theta = P.theta();
    const Eigen::Index n = P.dim();

    // cheap pre-pass: drop duplicates (same normalized direction, larger offset)
    std::vector<bool> alive(static_cast<size_t>(q), true);
    Matrix Fn(q, n);
    Vector tn(q);
    for (Eigen::Index i = 0; i < q; ++i) {
        const double s = F.row(i).norm();
        Fn.row(i) = F.row(i) / s;
        tn(i) = theta(i) / s;
    }
    for (Eigen::Index i = 0; i < q; ++i) {
        if (!alive[static_cast<size_t>(i)]) continue;
        for (Eigen::Index j = i + 1; j < q; ++j) {
            if (!alive[static_cast<size_t>(j)]) continue;
            if ((Fn.row(i) - Fn.row(j)).norm() <= 1e-12) {
                if (tn(j) >= tn(i)) {
                    alive[static_cast<size_t>(j)] = false;
                } else {
                    alive[static_cast<size_t>(i)] = false;
                    break;
                }
            }
        }
    }

    // LP pass: row i is redundant iff maximizing it over the others (with a
    // relaxed copy of itself to stay bounded) cannot exceed theta_i
    for (Eigen::Index i = 0; i < q; ++i) {
        if (!alive[static_cast<size_t>(i)]) continue;
        std::vector<Eigen::Index> rest;
        rest.reserve(static_cast<size_t>(q));
        for (Eigen::Index j = 0; j < q; ++j) {
            if (j != i && alive[static_cast<size_t>(j)]) rest.push_back(j);
        }
        if (rest.empty()) continue;
        Matrix Fr(static_cast<Eigen::Index>(rest.size()) + 1, n);
        Vector tr(static_cast<Eigen::Index>(rest.size()) + 1);
        for (size_t r = 0; r < rest.size(); ++r) {
            Fr.row(static_cast<Eigen::Index>(r)) = F.row(rest[r]);
            tr(static_cast<Eigen::Index>(r)) = theta(rest[r]);
        }
        Fr.row(static_cast<Eigen::Index>(rest.size())) = F.row(i);
        tr(static_cast<Eigen::Index>(rest.size())) = theta(i) + 1.0 + std::abs(theta(i));
        const HPolyhedron relaxed(std::move(Fr), std::move(tr));
        const double v = support_hpoly(relaxed, F.row(i).transpose(), tol);
        if (v <= theta(i) + tol) alive[static_cast<size_t>(i)] = false;
    }

    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < q; ++i) kept += alive[static_cast<size_t>(i)] ? 1 : 0;
    Matrix Fo(kept, n);
    Vector to(kept);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < q; ++i) {
        if (!alive[static_cast<size_t>(i)]) continue;
        Fo.row(r) = F.row(i);
        to(r) = theta(i);
        ++r;
    }
    return HPolyhedron(std::move(Fo), std::move(to));
}

bool contains_h(const HPolyhedron& P, const HPolyhedron& Q, double tol) {
    if (P.dim() != Q.dim()) {
        fail(ErrorCode::DimensionMismatch, "contains_h: dimension mismatch");
    }
    if (Q.flagged_empty() || hpoly_is_empty(Q, tol)) {
        fail(ErrorCode::EmptySet, "contains_h: inner set is empty");
    }
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        const double v = support_hpoly(Q, P.F().row(i).transpose(), tol);
        if (v > P.theta()(i) + tol) return false;
    }
    return true;
}

bool equals_h(const HPolyhedron& P, const HPolyhedron& Q, double tol) {
    return contains_h(P, Q, tol) && contains_h(Q, P, tol);
}

namespace {

std::vector<Vector> dedupe_points(std::vector<Vector> pts, double tol) {
    std::vector<Vector> out;
    for (auto& p : pts) {
        bool dup = false;
        for (const auto& o : out) {
            if ((p - o).norm() <= tol) {
                dup = true;
                break;
            }
        }
        if (!dup) out.push_back(std::move(p));
    }
    return out;
}

}  // namespace

std::vector<Vector> vertices_lowdim(const HPolyhedron& P, double tol) {
    const Eigen::Index n = P.dim();
    if (n > 3) fail(ErrorCode::DimensionTooHigh, "vertices_lowdim supports n <= 3 only");
    if (P.flagged_empty() || hpoly_is_empty(P)) {
        fail(ErrorCode::EmptySet, "vertices_lowdim: polyhedron is empty");
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector d = Vector::Zero(n);
        d(i) = 1.0;
        if (!std::isfinite(support_hpoly(P, d)) || !std::isfinite(support_hpoly(P, -d))) {
            fail(ErrorCode::Unbounded, "vertices_lowdim: polyhedron is unbounded");
        }
    }
    const Matrix& F = P.F();
    const Vector& theta = P.theta();
    const Eigen::Index q = P.rows();

    std::vector<Vector> pts;
    const double feas_tol = tol * 10.0;
    if (n == 1) {
        pts.push_back(Vector::Constant(1, support_hpoly(P, Vector::Constant(1, 1.0))));
        pts.push_back(Vector::Constant(1, -support_hpoly(P, Vector::Constant(1, -1.0))));
        return dedupe_points(std::move(pts), tol);
    }

    // enumerate active-row combinations
    std::vector<Eigen::Index> idx(static_cast<size_t>(n));
    auto try_combo = [&](const std::vector<Eigen::Index>& rows) {
        Matrix A(n, n);
        Vector b(n);
        for (Eigen::Index r = 0; r < n; ++r) {
            A.row(r) = F.row(rows[static_cast<size_t>(r)]);
            b(r) = theta(rows[static_cast<size_t>(r)]);
        }
        Eigen::FullPivLU<Matrix> lu(A);
        lu.setThreshold(1e-10);
        if (lu.rank() < n) return;
        const Vector x = lu.solve(b);
        if (((F * x - theta).array() <= feas_tol * (1.0 + x.norm())).all()) {
            pts.push_back(x);
        }
    };
    if (n == 2) {
        for (Eigen::Index i = 0; i < q; ++i) {
            for (Eigen::Index j = i + 1; j < q; ++j) {
                try_combo({i, j});
            }
        }
    } else {
        for (Eigen::Index i = 0; i < q; ++i) {
            for (Eigen::Index j = i + 1; j < q; ++j) {
                for (Eigen::Index k = j + 1; k < q; ++k) {
                    try_combo({i, j, k});
                }
            }
        }
    }
    pts = dedupe_points(std::move(pts), 1e-7);

    if (n == 2 && pts.size() > 2) {
        Vector centroid = Vector::Zero(2);
        for (const auto& p : pts) centroid += p;
        centroid /= static_cast<double>(pts.size());
        std::sort(pts.begin(), pts.end(), [&](const Vector& a, const Vector& b) {
            return std::atan2(a(1) - centroid(1), a(0) - centroid(0)) <
                   std::atan2(b(1) - centroid(1), b(0) - centroid(0));
        });
    }
    return pts;
}

}  // namespace invset
