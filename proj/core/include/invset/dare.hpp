#pragma once

#include <utility>

#include "invset/errors.hpp"
#include "invset/matrix_ops.hpp"

namespace invset {

// Weights for the discrete-time algebraic Riccati iteration. Q symmetric
// positive semidefinite, R symmetric positive definite.
struct DareSpec {
    Matrix Q;
    Matrix R;
    int max_iter = 10000;
    double tol = 1e-12;
};

struct DareResult {
    Matrix K;  // u = K x, closed loop A + B K
    Matrix P;  // fixed point of the Riccati backward iteration
    int iterations = 0;
};

// Fixed-point iteration P <- A'PA - A'PB (R + B'PB)^{-1} B'PA + Q from
// P0 = Q; K = -(R + B'PB)^{-1} B'PA. Throws NoConvergence when max_iter is
// exhausted and NotStabilizable when the converged closed loop is not
// contractive.
DareResult dare_gain(const Matrix& A, const Matrix& B, const DareSpec& spec);

// Frobenius norm of the DARE residual at P (used by tests and callers that
// want a certificate).
double dare_residual(const Matrix& A, const Matrix& B, const Matrix& Q, const Matrix& R,
                     const Matrix& P);

}  // namespace invset
