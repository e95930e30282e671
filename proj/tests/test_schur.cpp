#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>

#include "invset/matrix_ops.hpp"
#include "testutil.hpp"

using namespace invset;

namespace {

void check_factorization(const Matrix& A, const SchurFactorization& f, double tol_orth = 1e-10,
                         double tol_recon = 1e-9) {
    const Eigen::Index n = A.rows();
    CHECK((f.U.transpose() * f.U - Matrix::Identity(n, n)).norm() <= tol_orth);
    CHECK((f.U * f.S * f.U.transpose() - A).norm() <= tol_recon * std::max(A.norm(), 1.0));
    // quasi-triangular: nothing below the first subdiagonal, no adjacent
    // 2x2 blocks, and every 2x2 block carries a complex pair
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 2; i < n; ++i) CHECK(f.S(i, j) == 0.0);
    }
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (f.S(i + 1, i) != 0.0) {
            if (i + 2 < n) CHECK(f.S(i + 2, i + 1) == 0.0);
            const double a = f.S(i, i), b = f.S(i, i + 1);
            const double c = f.S(i + 1, i), d = f.S(i + 1, i + 1);
            CHECK(0.25 * (a - d) * (a - d) + b * c < 0.0);
        }
    }
}

std::vector<std::complex<double>> sorted_eigs(std::vector<std::complex<double>> v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

void check_same_spectrum(const Matrix& A, const Matrix& S, double tol = 1e-8) {
    Eigen::EigenSolver<Matrix> es(A);  // independent reference
    std::vector<std::complex<double>> ref;
    for (Eigen::Index i = 0; i < A.rows(); ++i) ref.push_back(es.eigenvalues()(i));
    auto mine = sorted_eigs(eig_block_diag(S));
    ref = sorted_eigs(ref);
    REQUIRE(mine.size() == ref.size());
    for (size_t i = 0; i < mine.size(); ++i) {
        CHECK(std::abs(mine[i] - ref[i]) <= tol * std::max(1.0, A.norm()));
    }
}

}  // namespace

TEST_CASE("real_schur on a diagonal matrix") {
    Matrix A = Matrix::Zero(3, 3);
    A(0, 0) = 2.0;
    A(1, 1) = -1.0;
    A(2, 2) = 0.5;
    const auto f = real_schur(A);
    check_factorization(A, f);
    auto eigs = sorted_eigs(eig_block_diag(f.S));
    CHECK(eigs[0].real() == doctest::Approx(-1.0));
    CHECK(eigs[1].real() == doctest::Approx(0.5));
    CHECK(eigs[2].real() == doctest::Approx(2.0));
    // U is a signed permutation for diagonal input
    for (Eigen::Index j = 0; j < 3; ++j) {
        CHECK(f.U.col(j).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
    }
}

TEST_CASE("real_schur rotation block keeps the complex pair") {
    Matrix A(2, 2);
    A << 0, 1, -1, 0;
    const auto f = real_schur(A);
    check_factorization(A, f);
    const auto eigs = eig_block_diag(f.S);
    REQUIRE(eigs.size() == 2);
    CHECK(std::abs(eigs[0].imag()) == doctest::Approx(1.0));
    CHECK(eigs[0].real() == doctest::Approx(0.0));
}

TEST_CASE("real_schur property suite: 100 random matrices up to n = 12") {
    auto rng = testutil::make_rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(trial % 11);
        const Matrix A = testutil::random_matrix(rng, n, n, -2.0, 2.0);
        const auto f = real_schur(A);
        check_factorization(A, f);
        check_same_spectrum(A, f.S);
    }
}

TEST_CASE("real_schur handles nilpotent and defective matrices") {
    auto rng = testutil::make_rng(102);
    for (int trial = 0; trial < 30; ++trial) {
        const Matrix A = testutil::random_singular_system(rng, 5, {1, 2});
        const auto f = real_schur(A);
        check_factorization(A, f);
        check_same_spectrum(A, f.S, 1e-6);
    }
    // pure Jordan chain
    Matrix J = Matrix::Zero(4, 4);
    J(0, 1) = 1.0;
    J(1, 2) = 1.0;
    J(2, 3) = 1.0;
    const Matrix Q = testutil::random_orthogonal(rng, 4);
    const Matrix A = Q * J * Q.transpose();
    const auto f = real_schur(A);
    check_factorization(A, f);
    // defective zeros scatter like eps^(1/4) for a length-4 Jordan chain
    for (const auto& lambda : eig_block_diag(f.S)) {
        CHECK(std::abs(lambda) <= 5e-3);
    }
}

TEST_CASE("paper 6D closed loop: eigenvalues {0,0,0,0.2,0.5,0.7}") {
    const Matrix A_cl = testutil::lti6d_A() + testutil::lti6d_B() * testutil::lti6d_K();
    const auto f = real_schur(A_cl);
    check_factorization(A_cl, f, 1e-10, 1e-9);
    const double expected[6] = {0.0, 0.0, 0.0, 0.2, 0.5, 0.7};
    std::vector<double> mags;
    for (const auto& e : eig_block_diag(f.S)) mags.push_back(std::abs(e));
    std::sort(mags.begin(), mags.end());
    for (int i = 0; i < 6; ++i) CHECK(std::abs(mags[static_cast<size_t>(i)] - expected[i]) <= 1e-6);
}

TEST_CASE("order_schur_zeros_last keeps an already-ordered form unchanged") {
    Matrix S = Matrix::Zero(3, 3);
    S(0, 0) = 0.9;
    S(0, 1) = 0.3;
    S(1, 1) = 0.4;
    S(2, 2) = 0.0;
    SchurFactorization f{Matrix::Identity(3, 3), S};
    const auto g = order_schur_zeros_last(f, 1e-9);
    CHECK((g.S - S).norm() == doctest::Approx(0.0));
    CHECK((g.U - Matrix::Identity(3, 3)).norm() == doctest::Approx(0.0));
}

TEST_CASE("order_schur_zeros_last sorts interleaved magnitudes") {
    auto rng = testutil::make_rng(103);
    Matrix T = Matrix::Zero(4, 4);
    T(0, 0) = 0.0;
    T(1, 1) = 0.9;
    T(2, 2) = 0.0;
    T(3, 3) = 0.3;
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = i + 1; j < 4; ++j) T(i, j) = testutil::uniform(rng, -1.0, 1.0);
    }
    const Matrix Q = testutil::random_orthogonal(rng, 4);
    const Matrix A = Q * T * Q.transpose();
    auto f = real_schur(A);
    f = order_schur_zeros_last(f, 1e-9);
    check_factorization(A, f, 1e-9, 1e-8);
    const auto eigs = eig_block_diag(f.S);
    CHECK(std::abs(eigs[0]) == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(std::abs(eigs[1]) == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(std::abs(eigs[2]) <= 1e-8);
    CHECK(std::abs(eigs[3]) <= 1e-8);
}

TEST_CASE("ordering is spectrum-preserving and pushes zeros to the tail") {
    auto rng = testutil::make_rng(104);
    for (int trial = 0; trial < 40; ++trial) {
        const Eigen::Index n = 3 + static_cast<Eigen::Index>(trial % 5);
        Matrix A;
        if (trial % 3 == 0) {
            A = testutil::random_singular_system(rng, n, {static_cast<int>(n) / 2});
        } else {
            A = testutil::random_matrix(rng, n, n, -1.5, 1.5);
        }
        const auto base = real_schur(A);
        const auto ordered = order_schur_zeros_last(base, 1e-9);
        check_factorization(A, ordered, 1e-9, 1e-8);

        auto before = sorted_eigs(eig_block_diag(base.S));
        auto after = sorted_eigs(eig_block_diag(ordered.S));
        for (size_t i = 0; i < before.size(); ++i) {
            CHECK(std::abs(before[i] - after[i]) <= 1e-8 * std::max(1.0, A.norm()));
        }
        // descending magnitudes with the zero class last
        const auto eigs = eig_block_diag(ordered.S);
        const double zt = 1e-9 * std::max(A.norm(), 1.0);
        double prev = std::numeric_limits<double>::infinity();
        for (const auto& e : eigs) {
            const double mag = std::abs(e) <= zt ? 0.0 : std::abs(e);
            CHECK(mag <= prev + 1e-9);
            prev = mag;
        }
    }
}

TEST_CASE("ordered trailing block is nilpotent for forced zero spectra") {
    auto rng = testutil::make_rng(105);
    for (int trial = 0; trial < 25; ++trial) {
        const std::vector<std::vector<int>> structures = {{1}, {2}, {1, 1}, {1, 2}, {3}};
        const auto& cells = structures[static_cast<size_t>(trial) % structures.size()];
        int d2 = 0;
        for (int c : cells) d2 += c;
        const Eigen::Index n = d2 + 3;
        const Matrix A = testutil::random_singular_system(rng, n, cells);
        auto f = order_schur_zeros_last(real_schur(A), 1e-9);
        const Matrix S22 = f.S.bottomRightCorner(d2, d2);
        CHECK(mat_power(S22, d2).norm() <= 1e-8 * std::max(A.norm(), 1.0));
    }
}
