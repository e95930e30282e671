#pragma once

#include <optional>

#include "invset/errors.hpp"
#include "invset/matrix_ops.hpp"

namespace invset {

// Discrete-time pair x+ = A x + B u with an optional static feedback gain.
struct LTISystem {
    Matrix A;
    Matrix B;
    std::optional<Matrix> K;

    Eigen::Index state_dim() const { return A.rows(); }
    Eigen::Index input_dim() const { return B.cols(); }

    // A + sigma B K for sigma in {+1, -1}
    Matrix closed_loop(int sigma = +1) const {
        if (!K) fail(ErrorCode::InvalidParams, "closed_loop: no feedback gain set");
        if (sigma != 1 && sigma != -1) {
            fail(ErrorCode::InvalidParams, "closed_loop: sign convention must be +1 or -1");
        }
        return A + static_cast<double>(sigma) * B * (*K);
    }

    void validate() const {
        if (A.rows() != A.cols()) fail(ErrorCode::NonSquare, "LTISystem: A must be square");
        if (B.rows() != A.rows()) {
            fail(ErrorCode::DimensionMismatch, "LTISystem: B rows must match A");
        }
        if (K && (K->rows() != B.cols() || K->cols() != A.cols())) {
            fail(ErrorCode::DimensionMismatch, "LTISystem: K must be m x n");
        }
        require_finite(A, "LTISystem A");
        require_finite(B, "LTISystem B");
        if (K) require_finite(*K, "LTISystem K");
    }
};

}  // namespace invset
