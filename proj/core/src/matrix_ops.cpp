#include "invset/matrix_ops.hpp"

#include <cmath>
#include <string>

namespace invset {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonSquare: return "NonSquare";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::SingularMatrix: return "SingularMatrix";
        case ErrorCode::NoConvergence: return "NoConvergence";
        case ErrorCode::SwapIllConditioned: return "SwapIllConditioned";
        case ErrorCode::NumericalStall: return "NumericalStall";
        case ErrorCode::EmptySet: return "EmptySet";
        case ErrorCode::Unbounded: return "Unbounded";
        case ErrorCode::DimensionTooHigh: return "DimensionTooHigh";
        case ErrorCode::SingularDynamics: return "SingularDynamics";
        case ErrorCode::NoZeroEigenvalues: return "NoZeroEigenvalues";
        case ErrorCode::IterationCapExceeded: return "IterationCapExceeded";
        case ErrorCode::InvalidConstraintSet: return "InvalidConstraintSet";
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::NotStabilizable: return "NotStabilizable";
        case ErrorCode::IoError: return "IoError";
    }
    return "UnknownError";
}

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
    if (!m.allFinite()) {
        fail(ErrorCode::InvalidParams, std::string(what) + " contains NaN or Inf entries");
    }
}

Matrix mat_power(const Eigen::Ref<const Matrix>& A, int k) {
    if (A.rows() != A.cols()) {
        fail(ErrorCode::NonSquare, "mat_power requires a square matrix");
    }
    if (k < 0) {
        fail(ErrorCode::InvalidParams, "mat_power requires k >= 0");
    }
    Matrix result = Matrix::Identity(A.rows(), A.cols());
    Matrix base = A;
    while (k > 0) {
        if (k & 1) result = result * base;
        k >>= 1;
        if (k > 0) base = base * base;
    }
    return result;
}

Matrix solve_linear(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& B,
                    double tol) {
    if (A.rows() != A.cols()) {
        fail(ErrorCode::NonSquare, "solve_linear requires a square matrix");
    }
    if (A.rows() != B.rows()) {
        fail(ErrorCode::DimensionMismatch, "solve_linear: A and B row counts differ");
    }
    Eigen::FullPivLU<Matrix> lu(A);
    const double scale = lu.maxPivot();
    lu.setThreshold(tol);
    if (A.rows() > 0 && (scale <= 0.0 || lu.rank() < A.rows())) {
        fail(ErrorCode::SingularMatrix, "solve_linear: matrix is singular to working precision");
    }
    return lu.solve(B);
}

std::vector<std::complex<double>> eig_block_diag(const Eigen::Ref<const Matrix>& S,
                                                 double subdiag_tol) {
    if (S.rows() != S.cols()) {
        fail(ErrorCode::NonSquare, "eig_block_diag requires a square matrix");
    }
    const Eigen::Index n = S.rows();
    const double scale = std::max(S.cwiseAbs().maxCoeff(), 1.0);
    const double tol = subdiag_tol > 0.0 ? subdiag_tol : 1e-14 * scale;
    std::vector<std::complex<double>> eig;
    eig.reserve(static_cast<size_t>(n));
    Eigen::Index i = 0;
    while (i < n) {
        if (i + 1 < n && std::abs(S(i + 1, i)) > tol) {
            const double a = S(i, i), b = S(i, i + 1);
            const double c = S(i + 1, i), d = S(i + 1, i + 1);
            const double mean = 0.5 * (a + d);
            const double disc = 0.25 * (a - d) * (a - d) + b * c;
            if (disc >= 0.0) {
                const double root = std::sqrt(disc);
                eig.emplace_back(mean + root, 0.0);
                eig.emplace_back(mean - root, 0.0);
            } else {
                const double imag = std::sqrt(-disc);
                eig.emplace_back(mean, imag);
                eig.emplace_back(mean, -imag);
            }
            i += 2;
        } else {
            eig.emplace_back(S(i, i), 0.0);
            ++i;
        }
    }
    return eig;
}

std::vector<std::complex<double>> eigenvalues(const Eigen::Ref<const Matrix>& A) {
    return eig_block_diag(real_schur(A).S);
}

double spectral_radius(const Eigen::Ref<const Matrix>& A) {
    double rho = 0.0;
    for (const auto& lambda : eigenvalues(A)) {
        rho = std::max(rho, std::abs(lambda));
    }
    return rho;
}

}  // namespace invset
