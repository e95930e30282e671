#include "invset/dare.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace invset {

namespace {

void validate_weights(const Matrix& A, const Matrix& B, const DareSpec& spec) {
    const Eigen::Index n = A.rows();
    const Eigen::Index m = B.cols();
    if (A.rows() != A.cols()) fail(ErrorCode::NonSquare, "dare_gain: A must be square");
    if (B.rows() != n) fail(ErrorCode::DimensionMismatch, "dare_gain: B rows must match A");
    if (spec.Q.rows() != n || spec.Q.cols() != n) {
        fail(ErrorCode::DimensionMismatch, "dare_gain: Q must be n x n");
    }
    if (spec.R.rows() != m || spec.R.cols() != m) {
        fail(ErrorCode::DimensionMismatch, "dare_gain: R must be m x m");
    }
    require_finite(A, "dare A");
    require_finite(B, "dare B");
    require_finite(spec.Q, "dare Q");
    require_finite(spec.R, "dare R");
    const double qs = std::max(spec.Q.norm(), 1.0);
    if ((spec.Q - spec.Q.transpose()).norm() > 1e-10 * qs) {
        fail(ErrorCode::InvalidParams, "dare_gain: Q must be symmetric");
    }
    const double rs = std::max(spec.R.norm(), 1.0);
    if ((spec.R - spec.R.transpose()).norm() > 1e-10 * rs) {
        fail(ErrorCode::InvalidParams, "dare_gain: R must be symmetric");
    }
    Eigen::LLT<Matrix> llt(spec.R);
    if (llt.info() != Eigen::Success) {
        fail(ErrorCode::InvalidParams, "dare_gain: R must be positive definite");
    }
}

}  // namespace

double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                     const Matrix& P) {
    const Matrix BtPA = B.transpose() * P * A;
    const Matrix S = R + B.transpose() * P * B;
    const Matrix res = A.transpose() * P * A - P - BtPA.transpose() * S.ldlt().solve(BtPA) + Q;
    return res.norm();
}

DareResult dare_gain(const Matrix& A, const Matrix& B, const DareSpec& spec) {
    validate_weights(A, B, spec);

    Matrix P = spec.Q;
    int it = 0;
    bool converged = false;
    double best_delta = std::numeric_limits<double>::infinity();
    int since_improved = 0;
    for (; it < spec.max_iter; ++it) {
        const Matrix BtPA = B.transpose() * P * A;
        const Matrix S = spec.R + B.transpose() * P * B;
        const Matrix Pn =
            A.transpose() * P * A - BtPA.transpose() * S.ldlt().solve(BtPA) + spec.Q;
        const double delta = (Pn - P).norm();
        P = 0.5 * (Pn + Pn.transpose());  // keep symmetric against drift
        const double rel = delta / std::max(P.norm(), 1.0);
        if (rel <= spec.tol) {
            converged = true;
            break;
        }
        // large fixed points can leave the requested tolerance below the
        // rounding floor of the iteration; accept a stalled small residual
        if (delta < best_delta * (1.0 - 1e-3)) {
            best_delta = delta;
            since_improved = 0;
        } else if (++since_improved > 50 && rel <= 1e-6) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        fail(ErrorCode::NoConvergence, "dare_gain: fixed-point iteration did not converge");
    }

    DareResult out;
    const Matrix S = spec.R + B.transpose() * P * B;
    out.K = -S.ldlt().solve(B.transpose() * P * A);
    out.P = P;
    out.iterations = it + 1;

    const double rho = spectral_radius(A + B * out.K);
    if (!(rho < 1.0 + 1e-9)) {
        fail(ErrorCode::NotStabilizable, "dare_gain: closed loop is not contractive");
    }
    return out;
}

}  // namespace invset
