#pragma once

#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "invset/errors.hpp"

namespace invset {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws InvalidParams if any entry is NaN or infinite. Domain-type
// constructors call this so non-finite data never enters a computation.
void require_finite(const Eigen::Ref<const Matrix>& m, const char* what);

// A^k by repeated squaring; mat_power(A, 0) == I.
Matrix mat_power(const Eigen::Ref<const Matrix>& A, int k);

// Solves A X = B for square invertible A.
// Throws SingularMatrix when the smallest pivot falls below tol * scale.
Matrix solve_linear(const Eigen::Ref<const Matrix>& A, const Eigen::Ref<const Matrix>& B,
                    double tol = 1e-12);

// Real Schur factorization A = U S U^T with U orthogonal and S
// quasi-upper-triangular (1x1 blocks and 2x2 blocks with complex-conjugate
// eigenvalue pairs; 2x2 blocks with real eigenvalues are always split).
struct SchurFactorization {
    Matrix U;
    Matrix S;
};

// Householder reduction to upper-Hessenberg form: Q^T A Q = H.
// Returns (Q, H). Throws NonSquare.
std::pair<Matrix, Matrix> hessenberg(const Eigen::Ref<const Matrix>& A);

// Francis implicit double-shift QR on the Hessenberg form.
// Throws NonSquare / NoConvergence.
SchurFactorization real_schur(const Eigen::Ref<const Matrix>& A, double tol = 1e-12);

// Reorders the diagonal blocks of a real Schur factorization by descending
// eigenvalue magnitude. Eigenvalues with |lambda| <= eps_zero * ||S||_F are
// treated as zero and collect in the trailing principal submatrix. Blocks of
// equal magnitude keep their relative order. Adjacent blocks are exchanged
// through a small Sylvester solve followed by re-orthogonalization; throws
// SwapIllConditioned if the solve is numerically singular.
SchurFactorization order_schur_zeros_last(SchurFactorization f, double eps_zero = 1e-9);

// Eigenvalues of a quasi-upper-triangular matrix, read off the diagonal
// blocks (2x2 blocks contribute a conjugate pair). Order follows the blocks.
std::vector<std::complex<double>> eig_block_diag(const Eigen::Ref<const Matrix>& S,
                                                 double subdiag_tol = 0.0);

// Convenience: eig_block_diag applied to the ordered Schur form of A.
std::vector<std::complex<double>> eigenvalues(const Eigen::Ref<const Matrix>& A);

double spectral_radius(const Eigen::Ref<const Matrix>& A);

}  // namespace invset
