#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "invset/dare.hpp"
#include "invset/matrix_ops.hpp"
#include "testutil.hpp"

using namespace invset;

TEST_CASE("scalar problem against the closed-form fixed point") {
    // a = 0.5, b = 1, q = r = 1: the fixed point solves p^2 - 0.25 p - 1 = 0
    DareSpec spec;
    spec.Q = Matrix::Constant(1, 1, 1.0);
    spec.R = Matrix::Constant(1, 1, 1.0);
    const Matrix A = Matrix::Constant(1, 1, 0.5);
    const Matrix B = Matrix::Constant(1, 1, 1.0);
    const auto res = dare_gain(A, B, spec);

    const double root = (0.25 + std::sqrt(0.0625 + 4.0)) / 2.0;
    CHECK(res.P(0, 0) == doctest::Approx(root).epsilon(1e-9));
    CHECK(dare_residual(A, B, spec.Q, spec.R, res.P) < 1e-10);
    CHECK(std::abs(A(0, 0) + B(0, 0) * res.K(0, 0)) < 1.0);
}

TEST_CASE("no-input case reduces to a Lyapunov sum") {
    auto rng = testutil::make_rng(71);
    const Matrix A = testutil::random_stable(rng, 3, 0.3, 0.7);
    const Matrix B = Matrix::Zero(3, 1);
    DareSpec spec;
    spec.Q = Matrix::Identity(3, 3);
    spec.R = Matrix::Identity(1, 1);
    const auto res = dare_gain(A, B, spec);
    CHECK(res.K.norm() == doctest::Approx(0.0));

    // P = sum_k (A^T)^k Q A^k, truncated well past convergence
    Matrix P_ref = Matrix::Zero(3, 3);
    Matrix Ak = Matrix::Identity(3, 3);
    for (int k = 0; k < 200; ++k) {
        P_ref += Ak.transpose() * spec.Q * Ak;
        Ak = Ak * A;
    }
    CHECK((res.P - P_ref).norm() <= 1e-8 * P_ref.norm());
}

TEST_CASE("2D benchmark system: stabilizing gain with identity weights") {
    DareSpec spec;
    spec.Q = Matrix::Identity(2, 2);
    spec.R = Matrix::Identity(1, 1);
    const auto res = dare_gain(testutil::lti2d_A(), testutil::lti2d_B(), spec);
    const Matrix A_cl = testutil::lti2d_A() + testutil::lti2d_B() * res.K;
    CHECK(spectral_radius(A_cl) < 1.0);
    CHECK(dare_residual(testutil::lti2d_A(), testutil::lti2d_B(), spec.Q, spec.R, res.P) <=
          10.0 * spec.tol * std::max(res.P.norm(), 1.0));
}

TEST_CASE("residual certificate holds on random stabilizable systems") {
    auto rng = testutil::make_rng(72);
    for (int t = 0; t < 10; ++t) {
        const Eigen::Index n = 2 + (t % 4);
        const Matrix A = testutil::random_matrix(rng, n, n, -1.2, 1.2);
        const Matrix B = testutil::random_matrix(rng, n, 2, -1.0, 1.0);
        DareSpec spec;
        spec.Q = Matrix::Identity(n, n);
        spec.R = Matrix::Identity(2, 2);
        DareResult res;
        try {
            res = dare_gain(A, B, spec);
        } catch (const Error&) {
            continue;  // not stabilizable draws are legal
        }
        CHECK(dare_residual(A, B, spec.Q, spec.R, res.P) <=
              10.0 * spec.tol * std::max(res.P.norm(), 1.0));
        CHECK(spectral_radius(A + B * res.K) < 1.0 + 1e-9);
    }
}

TEST_CASE("validation and failure modes") {
    DareSpec spec;
    spec.Q = Matrix::Identity(2, 2);
    spec.R = -Matrix::Identity(1, 1);  // not positive definite
    CHECK_THROWS_AS(dare_gain(Matrix::Identity(2, 2), Matrix::Ones(2, 1), spec), Error);

    // uncontrollable unstable mode: the iteration cannot settle
    spec.R = Matrix::Identity(1, 1);
    const Matrix A = 2.0 * Matrix::Identity(2, 2);
    const Matrix B = Matrix::Zero(2, 1);
    spec.max_iter = 200;
    CHECK_THROWS_AS(dare_gain(A, B, spec), Error);

    // converged but not contractive: unit-circle mode with zero weight
    DareSpec spec2;
    spec2.Q = Matrix::Zero(1, 1);
    spec2.R = Matrix::Identity(1, 1);
    bool not_stabilizable = false;
    try {
        dare_gain(Matrix::Constant(1, 1, 1.5), Matrix::Zero(1, 1), spec2);
    } catch (const Error& e) {
        not_stabilizable = e.code() == ErrorCode::NotStabilizable;
    }
    CHECK(not_stabilizable);
}
