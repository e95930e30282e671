#include "invset/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "invset/czono.hpp"
#include "invset/hpolyhedron.hpp"

namespace invset {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarState : unsigned char { Basic, AtLower, AtUpper, FreeZero, Fixed };

struct CoreResult {
    LPStatus status = LPStatus::Infeasible;
    Vector v;
    double value = 0.0;
    int iterations = 0;
};

// Revised bounded-variable simplex on the standard form
//   max c^T v   s.t.  M v = b,  lower <= v <= upper.
// Phase 1 appends signed artificial columns and minimizes their sum.
class Simplex {
  public:
    Simplex(const Matrix& M, const Vector& b, const Vector& c, const Vector& lower,
            const Vector& upper, double tol_feas)
        : m_(M.rows()),
          n_struct_(M.cols()),
          n_(M.cols() + M.rows()),
          tol_feas_(tol_feas),
          b_(b),
          cost_(Vector::Zero(M.cols() + M.rows())),
          lower_(M.cols() + M.rows()),
          upper_(M.cols() + M.rows()),
          val_(Vector::Zero(M.cols() + M.rows())),
          state_(static_cast<size_t>(M.cols() + M.rows()), VarState::AtLower),
          basis_(static_cast<size_t>(M.rows()), -1) {
        cols_.resize(m_, n_);
        cols_.leftCols(n_struct_) = M;
        cols_.rightCols(m_).setZero();
        lower_.head(n_struct_) = lower;
        upper_.head(n_struct_) = upper;
        cost_.head(n_struct_) = c;
    }

    CoreResult run() {
        initialize();
        CoreResult phase1 = iterate(/*phase1=*/true);
        if (phase1.status == LPStatus::Unbounded) {
            fail(ErrorCode::NumericalStall, "phase-1 objective unbounded");
        }
        double infeas = 0.0;
        for (Eigen::Index j = n_struct_; j < n_; ++j) infeas += std::abs(val_(j));
        if (infeas > tol_feas_ * (1.0 + b_.cwiseAbs().maxCoeff())) {
            CoreResult r;
            r.status = LPStatus::Infeasible;
            r.iterations = iterations_;
            return r;
        }
        expel_artificials();
        for (Eigen::Index j = n_struct_; j < n_; ++j) {
            lower_(j) = 0.0;
            upper_(j) = 0.0;
            if (state_[static_cast<size_t>(j)] != VarState::Basic) {
                state_[static_cast<size_t>(j)] = VarState::Fixed;
                val_(j) = 0.0;
            }
        }
        CoreResult r = iterate(/*phase1=*/false);
        r.v = val_.head(n_struct_);
        r.value = cost_.head(n_struct_).dot(r.v);
        r.iterations = iterations_;
        return r;
    }

  private:
    void initialize() {
        for (Eigen::Index j = 0; j < n_struct_; ++j) {
            const double lo = lower_(j), up = upper_(j);
            if (lo == up) {
                state_[static_cast<size_t>(j)] = VarState::Fixed;
                val_(j) = lo;
            } else if (std::isfinite(lo) && (!std::isfinite(up) || std::abs(lo) <= std::abs(up))) {
                state_[static_cast<size_t>(j)] = VarState::AtLower;
                val_(j) = lo;
            } else if (std::isfinite(up)) {
                state_[static_cast<size_t>(j)] = VarState::AtUpper;
                val_(j) = up;
            } else {
                state_[static_cast<size_t>(j)] = VarState::FreeZero;
                val_(j) = 0.0;
            }
        }
        Vector resid = b_ - cols_.leftCols(n_struct_) * val_.head(n_struct_);
        for (Eigen::Index i = 0; i < m_; ++i) {
            const Eigen::Index j = n_struct_ + i;
            cols_(i, j) = resid(i) >= 0.0 ? 1.0 : -1.0;
            lower_(j) = 0.0;
            upper_(j) = kInf;
            val_(j) = std::abs(resid(i));
            state_[static_cast<size_t>(j)] = VarState::Basic;
            basis_[static_cast<size_t>(i)] = j;
        }
    }

    Matrix basis_matrix() const {
        Matrix B(m_, m_);
        for (Eigen::Index i = 0; i < m_; ++i) B.col(i) = cols_.col(basis_[static_cast<size_t>(i)]);
        return B;
    }

    void refresh_basic_values(const Eigen::FullPivLU<Matrix>& lu) {
        Vector rhs = b_;
        for (Eigen::Index j = 0; j < n_; ++j) {
            if (state_[static_cast<size_t>(j)] != VarState::Basic && val_(j) != 0.0) {
                rhs -= cols_.col(j) * val_(j);
            }
        }
        const Vector xb = lu.solve(rhs);
        for (Eigen::Index i = 0; i < m_; ++i) val_(basis_[static_cast<size_t>(i)]) = xb(i);
    }

    // phase objective: phase 1 minimizes the artificial sum
    Vector phase_cost(bool phase1) const {
        if (!phase1) return cost_;
        Vector c = Vector::Zero(n_);
        c.tail(m_).setConstant(-1.0);
        return c;
    }

    CoreResult iterate(bool phase1) {
        const Vector c = phase_cost(phase1);
        const double cscale = 1.0 + c.cwiseAbs().maxCoeff();
        const double tol_d = 1e-9 * cscale;
        const double tol_piv = 1e-10;
        const long cap = 500 + 40L * (m_ + n_);
        int stall = 0;
        double last_obj = -kInf;

        CoreResult result;
        for (long it = 0;; ++it) {
            if (it > cap) {
                fail(ErrorCode::NumericalStall, "simplex iteration cap exceeded");
            }
            Eigen::FullPivLU<Matrix> lu(basis_matrix());
            if ((it & 31) == 0) refresh_basic_values(lu);

            Vector cb(m_);
            for (Eigen::Index i = 0; i < m_; ++i) cb(i) = c(basis_[static_cast<size_t>(i)]);
            const Vector y = lu.transpose().solve(cb);
            const Vector d = c - cols_.transpose() * y;

            const bool bland = stall > 64;
            Eigen::Index enter = -1;
            double best = tol_d;
            int enter_dir = 0;
            for (Eigen::Index j = 0; j < n_; ++j) {
                const VarState st = state_[static_cast<size_t>(j)];
                if (st == VarState::Basic || st == VarState::Fixed) continue;
                int dir = 0;
                if (st == VarState::AtLower && d(j) > tol_d) dir = +1;
                else if (st == VarState::AtUpper && d(j) < -tol_d) dir = -1;
                else if (st == VarState::FreeZero && std::abs(d(j)) > tol_d) dir = d(j) > 0 ? +1 : -1;
                if (dir == 0) continue;
                if (bland) {
                    enter = j;
                    enter_dir = dir;
                    break;
                }
                if (std::abs(d(j)) > best) {
                    best = std::abs(d(j));
                    enter = j;
                    enter_dir = dir;
                }
            }
            if (enter < 0) {
                result.status = LPStatus::Optimal;
                result.iterations = iterations_;
                refresh_basic_values(lu);
                return result;
            }

            const Vector u = lu.solve(cols_.col(enter));
            const double s = static_cast<double>(enter_dir);

            // ratio test: basic variables hitting a bound, plus the entering
            // variable reaching its opposite bound (bound flip)
            double t_max = kInf;
            Eigen::Index leave_row = -1;
            bool leave_to_upper = false;
            double best_piv = 0.0;
            for (Eigen::Index i = 0; i < m_; ++i) {
                const double w = s * u(i);
                const Eigen::Index bj = basis_[static_cast<size_t>(i)];
                if (w > tol_piv) {
                    if (!std::isfinite(lower_(bj))) continue;
                    const double t = std::max(0.0, (val_(bj) - lower_(bj)) / w);
                    if (t < t_max - 1e-12 || (t <= t_max + 1e-12 && std::abs(u(i)) > best_piv)) {
                        t_max = t;
                        leave_row = i;
                        leave_to_upper = false;
                        best_piv = std::abs(u(i));
                    }
                } else if (w < -tol_piv) {
                    if (!std::isfinite(upper_(bj))) continue;
                    const double t = std::max(0.0, (val_(bj) - upper_(bj)) / w);
                    if (t < t_max - 1e-12 || (t <= t_max + 1e-12 && std::abs(u(i)) > best_piv)) {
                        t_max = t;
                        leave_row = i;
                        leave_to_upper = true;
                        best_piv = std::abs(u(i));
                    }
                }
            }
            double t_flip = kInf;
            if (state_[static_cast<size_t>(enter)] == VarState::AtLower && std::isfinite(upper_(enter))) {
                t_flip = upper_(enter) - lower_(enter);
            } else if (state_[static_cast<size_t>(enter)] == VarState::AtUpper &&
                       std::isfinite(lower_(enter))) {
                t_flip = upper_(enter) - lower_(enter);
            }

            if (!std::isfinite(t_max) && !std::isfinite(t_flip)) {
                result.status = LPStatus::Unbounded;
                result.iterations = iterations_;
                return result;
            }
            ++iterations_;

            const double obj_now = [&] {
                double o = 0.0;
                for (Eigen::Index j = 0; j < n_; ++j) o += c(j) * val_(j);
                return o;
            }();
            if (obj_now <= last_obj + 1e-13 * (1.0 + std::abs(obj_now))) ++stall;
            else stall = 0;
            last_obj = obj_now;

            if (t_flip <= t_max) {
                // entering variable jumps to its other bound
                for (Eigen::Index i = 0; i < m_; ++i) {
                    val_(basis_[static_cast<size_t>(i)]) -= s * t_flip * u(i);
                }
                if (state_[static_cast<size_t>(enter)] == VarState::AtLower) {
                    state_[static_cast<size_t>(enter)] = VarState::AtUpper;
                    val_(enter) = upper_(enter);
                } else {
                    state_[static_cast<size_t>(enter)] = VarState::AtLower;
                    val_(enter) = lower_(enter);
                }
                continue;
            }

            for (Eigen::Index i = 0; i < m_; ++i) {
                val_(basis_[static_cast<size_t>(i)]) -= s * t_max * u(i);
            }
            val_(enter) += s * t_max;
            const Eigen::Index leaving = basis_[static_cast<size_t>(leave_row)];
            state_[static_cast<size_t>(leaving)] =
                leave_to_upper ? VarState::AtUpper : VarState::AtLower;
            val_(leaving) = leave_to_upper ? upper_(leaving) : lower_(leaving);
            if (lower_(leaving) == upper_(leaving)) {
                state_[static_cast<size_t>(leaving)] = VarState::Fixed;
            }
            state_[static_cast<size_t>(enter)] = VarState::Basic;
            basis_[static_cast<size_t>(leave_row)] = enter;
        }
    }

    // pivot still-basic artificials out of the basis (degenerate pivots);
    // rows with no eligible pivot are redundant and keep a fixed artificial
    void expel_artificials() {
        for (Eigen::Index i = 0; i < m_; ++i) {
            const Eigen::Index bj = basis_[static_cast<size_t>(i)];
            if (bj < n_struct_) continue;
            Eigen::FullPivLU<Matrix> lu(basis_matrix());
            Eigen::Index found = -1;
            for (Eigen::Index j = 0; j < n_struct_; ++j) {
                const VarState st = state_[static_cast<size_t>(j)];
                if (st == VarState::Basic || st == VarState::Fixed) continue;
                const Vector u = lu.solve(cols_.col(j));
                if (std::abs(u(i)) > 1e-8) {
                    found = j;
                    break;
                }
            }
            if (found >= 0) {
                state_[static_cast<size_t>(bj)] = VarState::Fixed;
                val_(bj) = 0.0;
                state_[static_cast<size_t>(found)] = VarState::Basic;
                basis_[static_cast<size_t>(i)] = found;
                Eigen::FullPivLU<Matrix> lu2(basis_matrix());
                refresh_basic_values(lu2);
            }
        }
    }

    Eigen::Index m_, n_struct_, n_;
    double tol_feas_;
    Matrix cols_;
    Vector b_, cost_, lower_, upper_, val_;
    std::vector<VarState> state_;
    std::vector<Eigen::Index> basis_;
    int iterations_ = 0;
};

CoreResult simplex_core(const Matrix& M, const Vector& b, const Vector& c, const Vector& lower,
                        const Vector& upper, double tol_feas) {
    if (M.rows() != b.size() || M.cols() != c.size() || lower.size() != c.size() ||
        upper.size() != c.size()) {
        fail(ErrorCode::DimensionMismatch, "simplex_core: inconsistent dimensions");
    }
    if (M.rows() == 0) {
        // pure box problem
        CoreResult r;
        r.v = Vector::Zero(c.size());
        for (Eigen::Index j = 0; j < c.size(); ++j) {
            if (c(j) > 0.0) {
                if (!std::isfinite(upper(j))) {
                    r.status = LPStatus::Unbounded;
                    return r;
                }
                r.v(j) = upper(j);
            } else if (c(j) < 0.0) {
                if (!std::isfinite(lower(j))) {
                    r.status = LPStatus::Unbounded;
                    return r;
                }
                r.v(j) = lower(j);
            } else {
                r.v(j) = std::isfinite(lower(j)) ? lower(j)
                         : (std::isfinite(upper(j)) ? upper(j) : 0.0);
            }
            if (lower(j) > upper(j)) {
                r.status = LPStatus::Infeasible;
                return r;
            }
        }
        r.status = LPStatus::Optimal;
        r.value = c.dot(r.v);
        return r;
    }
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        if (lower(j) > upper(j)) {
            CoreResult r;
            r.status = LPStatus::Infeasible;
            return r;
        }
    }
    Simplex s(M, b, c, lower, upper, tol_feas);
    return s.run();
}

}  // namespace

LPOutcome lp_solve(const LinearProgram& lp, double tol_feas) {
    const Eigen::Index n = lp.objective.size();
    const Eigen::Index me = lp.eq_A.rows();
    const Eigen::Index mi = lp.in_A.rows();
    if ((me > 0 && lp.eq_A.cols() != n) || (mi > 0 && lp.in_A.cols() != n) ||
        lp.eq_b.size() != me || lp.in_b.size() != mi) {
        fail(ErrorCode::DimensionMismatch, "lp_solve: inconsistent dimensions");
    }
    Vector lower = lp.lower.size() == n ? lp.lower : Vector::Constant(n, -kInf);
    Vector upper = lp.upper.size() == n ? lp.upper : Vector::Constant(n, kInf);

    const Eigen::Index m = me + mi;
    const Eigen::Index nv = n + mi;  // slacks for inequality rows
    Matrix M = Matrix::Zero(m, nv);
    Vector b(m), c = Vector::Zero(nv), lo(nv), hi(nv);
    if (me > 0) {
        M.topLeftCorner(me, n) = lp.eq_A;
        b.head(me) = lp.eq_b;
    }
    if (mi > 0) {
        M.bottomLeftCorner(mi, n) = lp.in_A;
        M.bottomRightCorner(mi, mi).setIdentity();
        b.tail(mi) = lp.in_b;
    }
    c.head(n) = lp.objective;
    lo.head(n) = lower;
    hi.head(n) = upper;
    lo.tail(mi).setZero();
    hi.tail(mi).setConstant(kInf);

    const CoreResult r = simplex_core(M, b, c, lo, hi, tol_feas);
    LPOutcome out;
    out.status = r.status;
    out.iterations = r.iterations;
    if (r.status == LPStatus::Optimal) {
        out.x = r.v.head(n);
        out.value = lp.objective.dot(out.x);
    }
    return out;
}

bool hpoly_is_empty(const HPolyhedron& P, double tol_feas) {
    if (P.flagged_empty()) return true;
    const Eigen::Index q = P.rows();
    if (q == 0) return false;
    const Matrix& F = P.F();
    const Eigen::Index n = P.dim();
    Vector rho(q);
    for (Eigen::Index i = 0; i < q; ++i) rho(i) = F.row(i).norm();

    // dual of the Chebyshev-depth LP: min theta^T y, F^T y = 0, rho^T y = 1,
    // y >= 0. The primal is always feasible, so the dual is either optimal
    // (optimum = signed depth) or infeasible (depth unbounded above).
    Matrix M(n + 1, q);
    M.topRows(n) = F.transpose();
    M.bottomRows(1) = rho.transpose();
    Vector b = Vector::Zero(n + 1);
    b(n) = 1.0;
    const CoreResult r = simplex_core(M, b, -P.theta(), Vector::Zero(q),
                                      Vector::Constant(q, kInf), tol_feas);
    if (r.status == LPStatus::Infeasible) return false;
    if (r.status == LPStatus::Optimal) return -r.value < -tol_feas;
    fail(ErrorCode::NumericalStall, "hpoly_is_empty: unexpected unbounded dual");
}

double support_hpoly(const HPolyhedron& P, const Vector& d, double tol_feas) {
    if (d.size() != P.dim()) {
        fail(ErrorCode::DimensionMismatch, "support_hpoly: direction dimension mismatch");
    }
    if (P.flagged_empty()) fail(ErrorCode::EmptySet, "support_hpoly: polyhedron is empty");
    const Eigen::Index q = P.rows();
    if (q == 0) return d.norm() == 0.0 ? 0.0 : kInf;

    // dual form: min theta^T y s.t. F^T y = d, y >= 0 (basis size = dim)
    const CoreResult r = simplex_core(P.F().transpose(), d, -P.theta(), Vector::Zero(q),
                                      Vector::Constant(q, kInf), tol_feas);
    switch (r.status) {
        case LPStatus::Optimal:
            return -r.value;
        case LPStatus::Unbounded:
            fail(ErrorCode::EmptySet, "support_hpoly: polyhedron is empty");
        case LPStatus::Infeasible:
            if (hpoly_is_empty(P, tol_feas)) {
                fail(ErrorCode::EmptySet, "support_hpoly: polyhedron is empty");
            }
            return kInf;
    }
    fail(ErrorCode::NumericalStall, "support_hpoly: unreachable");
}

std::pair<double, Vector> support_hpoly_point(const HPolyhedron& P, const Vector& d,
                                              double tol_feas) {
    if (d.size() != P.dim()) {
        fail(ErrorCode::DimensionMismatch, "support_hpoly_point: direction dimension mismatch");
    }
    if (P.flagged_empty()) fail(ErrorCode::EmptySet, "support_hpoly_point: polyhedron is empty");
    const Eigen::Index q = P.rows();
    if (q == 0) fail(ErrorCode::Unbounded, "support_hpoly_point: support is unbounded");

    const CoreResult r = simplex_core(P.F().transpose(), d, -P.theta(), Vector::Zero(q),
                                      Vector::Constant(q, kInf), tol_feas);
    if (r.status == LPStatus::Unbounded) {
        fail(ErrorCode::EmptySet, "support_hpoly_point: polyhedron is empty");
    }
    if (r.status == LPStatus::Infeasible) {
        if (hpoly_is_empty(P, tol_feas)) {
            fail(ErrorCode::EmptySet, "support_hpoly_point: polyhedron is empty");
        }
        fail(ErrorCode::Unbounded, "support_hpoly_point: support is unbounded");
    }
    // complementary slackness: rows with positive multipliers are active
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < q; ++i) {
        if (r.v(i) > 1e-10) active.push_back(i);
    }
    if (active.empty()) {
        fail(ErrorCode::NumericalStall, "support_hpoly_point: no active rows at optimum");
    }
    Matrix Fa(static_cast<Eigen::Index>(active.size()), P.dim());
    Vector ta(static_cast<Eigen::Index>(active.size()));
    for (size_t i = 0; i < active.size(); ++i) {
        Fa.row(static_cast<Eigen::Index>(i)) = P.F().row(active[i]);
        ta(static_cast<Eigen::Index>(i)) = P.theta()(active[i]);
    }
    const Vector x = Fa.colPivHouseholderQr().solve(ta);
    const double val = -r.value;
    if (((P.F() * x - P.theta()).array() <= 1e-6).all() && std::abs(d.dot(x) - val) <= 1e-6 * (1.0 + std::abs(val))) {
        return {val, x};
    }
    // degenerate active set: fall back to the primal formulation
    LinearProgram lp;
    lp.objective = d;
    lp.eq_A = Matrix(0, P.dim());
    lp.eq_b = Vector(0);
    lp.in_A = P.F();
    lp.in_b = P.theta();
    const LPOutcome out = lp_solve(lp, tol_feas);
    if (out.status != LPStatus::Optimal) {
        fail(ErrorCode::NumericalStall, "support_hpoly_point: primal fallback failed");
    }
    return {out.value, out.x};
}

double support_cz(const ConstrainedZonotope& Z, const Vector& d, double tol_feas) {
    if (d.size() != Z.dim()) {
        fail(ErrorCode::DimensionMismatch, "support_cz: direction dimension mismatch");
    }
    const Eigen::Index D = Z.generators();
    const Vector c = Z.G().transpose() * d;
    const CoreResult r = simplex_core(Z.F_eq(), Z.theta_eq(), c, Vector::Constant(D, -1.0),
                                      Vector::Constant(D, 1.0), tol_feas);
    if (r.status == LPStatus::Infeasible) {
        fail(ErrorCode::EmptySet, "support_cz: constrained zonotope is empty");
    }
    if (r.status != LPStatus::Optimal) {
        fail(ErrorCode::NumericalStall, "support_cz: unexpected LP status");
    }
    return d.dot(Z.center()) + r.value;
}

bool member_cz(const ConstrainedZonotope& Z, const Vector& x, double tol_feas) {
    if (x.size() != Z.dim()) {
        fail(ErrorCode::DimensionMismatch, "member_cz: point dimension mismatch");
    }
    const Eigen::Index D = Z.generators();
    const Eigen::Index nc = Z.constraints();
    Matrix M(nc + Z.dim(), D);
    if (nc > 0) M.topRows(nc) = Z.F_eq();
    M.bottomRows(Z.dim()) = Z.G();
    Vector b(nc + Z.dim());
    if (nc > 0) b.head(nc) = Z.theta_eq();
    b.tail(Z.dim()) = x - Z.center();
    const CoreResult r = simplex_core(M, b, Vector::Zero(D), Vector::Constant(D, -1.0),
                                      Vector::Constant(D, 1.0), tol_feas);
    return r.status == LPStatus::Optimal;
}

bool cz_is_empty(const ConstrainedZonotope& Z, double tol_feas) {
    const Eigen::Index D = Z.generators();
    if (Z.constraints() == 0) return false;
    const CoreResult r = simplex_core(Z.F_eq(), Z.theta_eq(), Vector::Zero(D),
                                      Vector::Constant(D, -1.0), Vector::Constant(D, 1.0),
                                      tol_feas);
    return r.status != LPStatus::Optimal;
}

}  // namespace invset
