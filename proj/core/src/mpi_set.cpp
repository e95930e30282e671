#include "invset/mpi_set.hpp"

#include <chrono>
#include <cmath>

#include "invset/linprog.hpp"

namespace invset {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// all rows r_i x <= th_i redundant w.r.t. Omega (bounded, nonempty)
bool rows_all_redundant_h(const HPolyhedron& Omega, const Matrix& R, const Vector& th,
                          double tol) {
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
        if (support_hpoly(Omega, R.row(i).transpose(), tol) > th(i) + tol) return false;
    }
    return true;
}

bool rows_all_redundant_cz(const ConstrainedZonotope& Omega, const Matrix& R, const Vector& th,
                           double tol) {
    for (Eigen::Index i = 0; i < R.rows(); ++i) {
        if (support_cz(Omega, R.row(i).transpose(), tol) > th(i) + tol) return false;
    }
    return true;
}

HPolyhedron stack_rows(const HPolyhedron& P, const Matrix& R, const Vector& th) {
    Matrix F(P.rows() + R.rows(), P.dim());
    Vector theta(P.rows() + R.rows());
    F.topRows(P.rows()) = P.F();
    F.bottomRows(R.rows()) = R;
    theta.head(P.rows()) = P.theta();
    theta.tail(R.rows()) = th;
    return HPolyhedron(std::move(F), std::move(theta));
}

void check_square_dynamics(const Matrix& A_cl, const Eigen::Index n) {
    if (A_cl.rows() != A_cl.cols()) {
        fail(ErrorCode::NonSquare, "closed-loop matrix must be square");
    }
    if (A_cl.rows() != n) {
        fail(ErrorCode::DimensionMismatch, "closed-loop matrix does not match set dimension");
    }
    require_finite(A_cl, "closed-loop matrix");
}

}  // namespace

ConstraintSet ConstraintSet::box(const Vector& radii) {
    ConstraintSet s;
    s.h = HPolyhedron::box(radii);
    s.z = ConstrainedZonotope::box(radii);
    return s;
}

ConstraintSet ConstraintSet::from_h(HPolyhedron P) {
    ConstraintSet s;
    s.h = std::move(P);
    return s;
}

ConstraintSet ConstraintSet::from_cz(ConstrainedZonotope Z) {
    ConstraintSet s;
    s.z = std::move(Z);
    return s;
}

Eigen::Index ConstraintSet::dim() const {
    if (h) return h->dim();
    if (z) return z->dim();
    fail(ErrorCode::InvalidParams, "ConstraintSet: no representation present");
}

const HPolyhedron& ConstraintSet::require_h() const {
    if (h) return *h;
    if (z && z->constraints() == 0) {
        // diagonal zonotopes are boxes; anything else has no cheap H-form
        const Matrix& G = z->G();
        if (G.rows() == G.cols() && G.isDiagonal(1e-14)) {
            Matrix F(2 * z->dim(), z->dim());
            F.topRows(z->dim()).setIdentity();
            F.bottomRows(z->dim()) = -Matrix::Identity(z->dim(), z->dim());
            Vector theta(2 * z->dim());
            theta.head(z->dim()) = G.diagonal().cwiseAbs() + z->center();
            theta.tail(z->dim()) = G.diagonal().cwiseAbs() - z->center();
            const_cast<ConstraintSet*>(this)->h = HPolyhedron(std::move(F), std::move(theta));
            return *h;
        }
    }
    fail(ErrorCode::InvalidParams,
         "this operation needs an H-representation; provide box radii or half-spaces");
}

ConstrainedZonotope ConstraintSet::require_cz() const {
    if (z) return *z;
    if (h) return cz_from_hpoly(*h);
    fail(ErrorCode::InvalidParams, "ConstraintSet: no representation present");
}

void validate_constraint_set(const HPolyhedron& Xbar, double tol_feas) {
    if (Xbar.flagged_empty()) {
        fail(ErrorCode::InvalidConstraintSet, "constraint set is empty");
    }
    if (Xbar.rows() == 0) {
        fail(ErrorCode::InvalidConstraintSet, "constraint set is the whole space (unbounded)");
    }
    for (Eigen::Index i = 0; i < Xbar.rows(); ++i) {
        if (Xbar.theta()(i) <= 0.0) {
            fail(ErrorCode::InvalidConstraintSet,
                 "the origin must lie in the interior of the constraint set");
        }
    }
    const Eigen::Index n = Xbar.dim();
    for (Eigen::Index i = 0; i < n; ++i) {
        Vector d = Vector::Zero(n);
        d(i) = 1.0;
        if (!std::isfinite(support_hpoly(Xbar, d, tol_feas)) ||
            !std::isfinite(support_hpoly(Xbar, -d, tol_feas))) {
            fail(ErrorCode::InvalidConstraintSet, "constraint set is unbounded");
        }
    }
}

MPIResult mpi_standard_h(const Matrix& A_cl, const HPolyhedron& Xbar, const MpiOptions& opts) {
    const auto t0 = Clock::now();
    check_square_dynamics(A_cl, Xbar.dim());
    validate_constraint_set(Xbar, opts.tol_feas);
    if (try_schur_split(A_cl, opts.eps_zero, opts.tol_nil)) {
        fail(ErrorCode::SingularDynamics,
             "closed loop has a zero eigenvalue; use the singular pipeline");
    }

    HPolyhedron Omega = remove_redundant(Xbar, opts.tol_feas);
    for (int k = 1; k <= opts.k_max; ++k) {
        const Matrix R = Omega.F() * A_cl;  // rows of A^{-1} Omega
        if (rows_all_redundant_h(Omega, R, Omega.theta(), opts.tol_feas)) {
            MPIResult res{Omega, k - 1, Branch::Standard, elapsed_seconds(t0)};
            return res;
        }
        HPolyhedron pre(R, Omega.theta());
        Omega = remove_redundant(intersect_h(pre, Xbar), opts.tol_feas);
    }
    fail(ErrorCode::IterationCapExceeded, "standard recurrence hit the iteration cap");
}

MPIResult mpi_standard_cz(const Matrix& A_cl, const ConstrainedZonotope& Xbar_cz,
                          const HPolyhedron& Xbar_h, const MpiOptions& opts) {
    const auto t0 = Clock::now();
    check_square_dynamics(A_cl, Xbar_cz.dim());
    if (Xbar_h.dim() != Xbar_cz.dim()) {
        fail(ErrorCode::DimensionMismatch, "mpi_standard_cz: H-rep dimension mismatch");
    }
    validate_constraint_set(Xbar_h, opts.tol_feas);
    if (try_schur_split(A_cl, opts.eps_zero, opts.tol_nil)) {
        fail(ErrorCode::SingularDynamics,
             "closed loop has a zero eigenvalue; use the singular pipeline");
    }
    const Matrix A_inv = solve_linear(A_cl, Matrix::Identity(A_cl.rows(), A_cl.cols()));

    ConstrainedZonotope Omega = Xbar_cz;
    Matrix Ak = A_cl;  // A^{k+1} while testing step k+1
    for (int k = 0; k <= opts.k_max; ++k) {
        const Matrix R = Xbar_h.F() * Ak;
        if (rows_all_redundant_cz(Omega, R, Xbar_h.theta(), opts.tol_feas)) {
            MPIResult res{Omega, k, Branch::Standard, elapsed_seconds(t0)};
            return res;
        }
        Omega = cz_recurrence_step(Omega, A_inv, Xbar_cz);
        Ak = Ak * A_cl;
    }
    fail(ErrorCode::IterationCapExceeded, "constrained-zonotope recurrence hit the iteration cap");
}

std::optional<SchurSplit> try_schur_split(const Matrix& A_cl, double eps_zero, double tol_nil) {
    if (A_cl.rows() != A_cl.cols()) {
        fail(ErrorCode::NonSquare, "schur_split requires a square matrix");
    }
    require_finite(A_cl, "schur_split input");
    const Eigen::Index n = A_cl.rows();
    const double scale = std::max(A_cl.norm(), 1e-300);
    const SchurFactorization base = real_schur(A_cl);

    // threshold ladder: the base eps_zero plus rungs sized for defective
    // clusters of index 2..4; each candidate must pass the nilpotency gate
    double rungs[4] = {eps_zero, 1.5e-8, 6.0e-6, 1.0e-4};
    std::optional<SchurSplit> best;
    for (double tau : rungs) {
        if (tau < eps_zero) continue;
        SchurFactorization f = order_schur_zeros_last(base, tau);
        const auto eigs = eig_block_diag(f.S);
        Eigen::Index d2 = 0;
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            if (std::abs(eigs[static_cast<size_t>(i)]) <= tau * scale) ++d2;
            else break;
        }
        if (d2 == 0 || (best && d2 <= best->d2)) continue;

        SchurSplit split;
        split.U = f.U;
        split.d1 = n - d2;
        split.d2 = d2;
        split.S11 = f.S.topLeftCorner(split.d1, split.d1);
        split.S12 = f.S.topRightCorner(split.d1, d2);
        split.S22 = f.S.bottomRightCorner(d2, d2);

        // nilpotency index: smallest p with S22^p = 0 (to tolerance)
        Matrix power = Matrix::Identity(d2, d2);
        int p = 0;
        bool nilpotent = true;
        while (power.norm() > tol_nil * scale) {
            if (p >= d2) {
                nilpotent = false;
                break;
            }
            power = power * split.S22;
            ++p;
        }
        if (!nilpotent) continue;
        split.p = p;
        try {
            // a candidate whose leading block cannot be inverted stably is
            // unusable (part of the zero cluster is still sitting in S11)
            split.T = compute_T(split);
        } catch (const Error&) {
            continue;
        }
        best = std::move(split);
    }
    return best;
}

SchurSplit schur_split(const Matrix& A_cl, double eps_zero, double tol_nil) {
    auto split = try_schur_split(A_cl, eps_zero, tol_nil);
    if (!split) {
        fail(ErrorCode::NoZeroEigenvalues,
             "closed loop has no zero eigenvalues; use the standard pipeline");
    }
    return std::move(*split);
}

Matrix compute_T(const SchurSplit& split) {
    if (split.d1 == 0) return Matrix(0, split.d2);
    Matrix term = split.S12;
    Matrix T = term;
    for (int i = 1; i <= split.p; ++i) {
        term = solve_linear(split.S11, term * split.S22);
        T += term;
    }
    return T;
}

HPolyhedron reduced_constraints_h(const SchurSplit& split, const HPolyhedron& Xbar) {
    if (Xbar.dim() != split.U.rows()) {
        fail(ErrorCode::DimensionMismatch, "reduced_constraints_h: dimension mismatch");
    }
    return HPolyhedron(Xbar.F() * split.U1(), Xbar.theta());
}

ConstrainedZonotope reduced_constraints_cz(const SchurSplit& split,
                                           const ConstrainedZonotope& Xbar) {
    if (Xbar.dim() != split.U.rows()) {
        fail(ErrorCode::DimensionMismatch, "reduced_constraints_cz: dimension mismatch");
    }
    const Matrix U1t = split.U1().transpose();
    const Matrix U2t = split.U2().transpose();
    const Eigen::Index nc = Xbar.constraints();
    Matrix F(nc + split.d2, Xbar.generators());
    Vector theta(nc + split.d2);
    if (nc > 0) {
        F.topRows(nc) = Xbar.F_eq();
        theta.head(nc) = Xbar.theta_eq();
    }
    F.bottomRows(split.d2) = U2t * Xbar.G();
    theta.tail(split.d2) = -U2t * Xbar.center();
    return ConstrainedZonotope(U1t * Xbar.center(), U1t * Xbar.G(), std::move(F),
                               std::move(theta));
}

Matrix singular_lift_map(const SchurSplit& split, int p_eff) {
    if (split.d1 == 0) {
        fail(ErrorCode::InvalidParams, "singular_lift_map: no nonzero-eigenvalue block");
    }
    if (p_eff < 1) {
        fail(ErrorCode::InvalidParams, "singular_lift_map: p must be at least 1");
    }
    Matrix M(split.d1, split.U.rows());
    M.leftCols(split.d1) = mat_power(split.S11, p_eff);
    M.rightCols(split.d2) = mat_power(split.S11, p_eff - 1) * split.T;
    return M * split.U.transpose();
}

MPIResult mpi_singular_h(const Matrix& A_cl, const HPolyhedron& Xbar, const MpiOptions& opts) {
    const auto t0 = Clock::now();
    check_square_dynamics(A_cl, Xbar.dim());
    validate_constraint_set(Xbar, opts.tol_feas);
    const SchurSplit split = schur_split(A_cl, opts.eps_zero, opts.tol_nil);
    const int p_eff = split.p + std::max(0, opts.p_offset);

    HPolyhedron W = remove_redundant(Xbar, opts.tol_feas);
    Matrix Ak = Matrix::Identity(A_cl.rows(), A_cl.cols());

    if (split.d1 == 0) {
        // dead-beat: A^{p_eff} = 0, the forward accumulation closes by then
        for (int k = 1; k <= p_eff + 1; ++k) {
            Ak = Ak * A_cl;
            const Matrix R = Xbar.F() * Ak;
            if (rows_all_redundant_h(W, R, Xbar.theta(), opts.tol_feas)) {
                return MPIResult{W, k - 1, Branch::Singular, elapsed_seconds(t0)};
            }
            W = remove_redundant(stack_rows(W, R, Xbar.theta()), opts.tol_feas);
        }
        return MPIResult{W, p_eff + 1, Branch::Singular, elapsed_seconds(t0)};
    }

    // Phi^[1]: constraints for k = 0 .. p-1, with the early exit when the
    // accumulation reaches a fixed point before p
    for (int k = 1; k <= p_eff - 1; ++k) {
        Ak = Ak * A_cl;
        const Matrix R = Xbar.F() * Ak;
        if (rows_all_redundant_h(W, R, Xbar.theta(), opts.tol_feas)) {
            return MPIResult{W, k - 1, Branch::Singular, elapsed_seconds(t0)};
        }
        W = remove_redundant(stack_rows(W, R, Xbar.theta()), opts.tol_feas);
    }

    // reduced MPI under z+ = S11 z, then the lift back to full space
    const HPolyhedron Z = remove_redundant(reduced_constraints_h(split, Xbar), opts.tol_feas);
    const MPIResult phi_z = mpi_standard_h(split.S11, Z, opts);
    const Matrix M = singular_lift_map(split, p_eff);
    const HPolyhedron Phi2(phi_z.hpoly().F() * M, phi_z.hpoly().theta());
    HPolyhedron Phi = remove_redundant(intersect_h(W, Phi2), opts.tol_feas);
    return MPIResult{std::move(Phi), phi_z.k_bar, Branch::Singular, elapsed_seconds(t0)};
}

MPIResult mpi_singular_cz(const Matrix& A_cl, const ConstrainedZonotope& Xbar_cz,
                          const HPolyhedron& Xbar_h, const MpiOptions& opts) {
    const auto t0 = Clock::now();
    check_square_dynamics(A_cl, Xbar_cz.dim());
    if (Xbar_h.dim() != Xbar_cz.dim()) {
        fail(ErrorCode::DimensionMismatch, "mpi_singular_cz: H-rep dimension mismatch");
    }
    validate_constraint_set(Xbar_h, opts.tol_feas);
    const SchurSplit split = schur_split(A_cl, opts.eps_zero, opts.tol_nil);
    const int p_eff = split.p + std::max(0, opts.p_offset);

    ConstrainedZonotope W = Xbar_cz;
    Matrix Ak = Matrix::Identity(A_cl.rows(), A_cl.cols());

    if (split.d1 == 0) {
        for (int k = 1; k <= p_eff + 1; ++k) {
            Ak = Ak * A_cl;
            const Matrix R = Xbar_h.F() * Ak;
            if (rows_all_redundant_cz(W, R, Xbar_h.theta(), opts.tol_feas)) {
                return MPIResult{W, k - 1, Branch::Singular, elapsed_seconds(t0)};
            }
            W = cz_intersect_under_map(W, Ak, Xbar_cz);
        }
        return MPIResult{W, p_eff + 1, Branch::Singular, elapsed_seconds(t0)};
    }

    for (int k = 1; k <= p_eff - 1; ++k) {
        Ak = Ak * A_cl;
        const Matrix R = Xbar_h.F() * Ak;
        if (rows_all_redundant_cz(W, R, Xbar_h.theta(), opts.tol_feas)) {
            return MPIResult{W, k - 1, Branch::Singular, elapsed_seconds(t0)};
        }
        W = cz_intersect_under_map(W, Ak, Xbar_cz);
    }

    const ConstrainedZonotope Z_cz = reduced_constraints_cz(split, Xbar_cz);
    const HPolyhedron Z_h =
        remove_redundant(reduced_constraints_h(split, Xbar_h), opts.tol_feas);
    const MPIResult phi_z = mpi_standard_cz(split.S11, Z_cz, Z_h, opts);
    const Matrix M = singular_lift_map(split, p_eff);
    ConstrainedZonotope Phi = cz_intersect_under_map(W, M, phi_z.czono());
    return MPIResult{std::move(Phi), phi_z.k_bar, Branch::Singular, elapsed_seconds(t0)};
}

MPIResult mpi_oracle_forward(const Matrix& A_cl, const HPolyhedron& Xbar, int k_max,
                             double tol_feas) {
    const auto t0 = Clock::now();
    check_square_dynamics(A_cl, Xbar.dim());
    validate_constraint_set(Xbar, tol_feas);

    HPolyhedron Omega = remove_redundant(Xbar, tol_feas);
    Matrix Ak = Matrix::Identity(A_cl.rows(), A_cl.cols());
    for (int k = 1; k <= k_max; ++k) {
        Ak = Ak * A_cl;
        const Matrix R = Xbar.F() * Ak;
        if (rows_all_redundant_h(Omega, R, Xbar.theta(), tol_feas)) {
            return MPIResult{Omega, k - 1, Branch::Standard, elapsed_seconds(t0)};
        }
        Omega = remove_redundant(stack_rows(Omega, R, Xbar.theta()), tol_feas);
    }
    fail(ErrorCode::IterationCapExceeded, "forward-power accumulation hit the iteration cap");
}

MPIResult mpi_compute(const Matrix& A, const Matrix& B, const Matrix& K,
                      const ConstraintSet& X, const ConstraintSet& Uc, Backend backend,
                      const MpiOptions& opts) {
    LTISystem sys{A, B, K};
    sys.validate();
    if (X.dim() != A.rows() || Uc.dim() != B.cols()) {
        fail(ErrorCode::DimensionMismatch, "mpi_compute: constraint set dimensions mismatch");
    }
    const Matrix K_cl = static_cast<double>(opts.sign_convention) * K;
    const Matrix A_cl = A + B * K_cl;

    const bool singular = try_schur_split(A_cl, opts.eps_zero, opts.tol_nil).has_value();

    if (backend == Backend::HPoly) {
        const HPolyhedron Xbar = closed_loop_constraints_h(X.require_h(), Uc.require_h(), K_cl);
        return singular ? mpi_singular_h(A_cl, Xbar, opts) : mpi_standard_h(A_cl, Xbar, opts);
    }
    const ConstrainedZonotope Xbar_cz =
        closed_loop_constraints_cz(X.require_cz(), Uc.require_cz(), K_cl);
    const HPolyhedron Xbar_h = closed_loop_constraints_h(X.require_h(), Uc.require_h(), K_cl);
    return singular ? mpi_singular_cz(A_cl, Xbar_cz, Xbar_h, opts)
                    : mpi_standard_cz(A_cl, Xbar_cz, Xbar_h, opts);
}

}  // namespace invset
