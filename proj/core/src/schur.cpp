#include <algorithm>
#include <cmath>
#include <vector>

#include "invset/matrix_ops.hpp"

namespace invset {

namespace {

// Applies the Householder reflector P = I - 2 w w^T (w unit) on the given
// row/column windows of H and accumulates into Q.
void apply_reflector_rows(Matrix& H, const Vector& w, Eigen::Index row0, Eigen::Index col0) {
    const Eigen::Index k = w.size();
    const Eigen::Index nc = H.cols() - col0;
    Eigen::RowVectorXd t = w.transpose() * H.block(row0, col0, k, nc);
    H.block(row0, col0, k, nc).noalias() -= 2.0 * w * t;
}

void apply_reflector_cols(Matrix& H, const Vector& w, Eigen::Index col0, Eigen::Index row_end) {
    const Eigen::Index k = w.size();
    Vector t = H.block(0, col0, row_end, k) * w;
    H.block(0, col0, row_end, k).noalias() -= 2.0 * t * w.transpose();
}

// Householder vector annihilating x(1..end); returns false when the tail is
// already exactly zero (no-op, keeps fixed points exact).
bool householder_unit(const Vector& x, Vector& w) {
    const Eigen::Index k = x.size();
    const double tail = k > 1 ? x.tail(k - 1).norm() : 0.0;
    if (tail == 0.0) return false;
    const double mu = std::hypot(x(0), tail);
    Vector v = x;
    // v = x - alpha e1 with alpha = -sign(x0)*mu avoids cancellation
    const double alpha = x(0) >= 0.0 ? -mu : mu;
    v(0) -= alpha;
    const double vn = v.norm();
    if (vn == 0.0) return false;
    w = v / vn;
    return true;
}

// Orthogonal similarity G (2x2) splitting a real-eigenvalue 2x2 block into
// two 1x1 blocks; returns false when the pair is complex.
bool split_real_block(const Matrix& B, Matrix& G) {
    const double a = B(0, 0), b = B(0, 1), c = B(1, 0), d = B(1, 1);
    const double mean = 0.5 * (a + d);
    const double disc = 0.25 * (a - d) * (a - d) + b * c;
    if (disc < 0.0) return false;
    const double root = std::sqrt(disc);
    // eigenvector of the larger-magnitude eigenvalue for stability
    const double l1 = mean >= 0.0 ? mean + root : mean - root;
    double v1, v2;
    if (std::abs(b) + std::abs(l1 - a) >= std::abs(l1 - d) + std::abs(c)) {
        v1 = b;
        v2 = l1 - a;
    } else {
        v1 = l1 - d;
        v2 = c;
    }
    double nv = std::hypot(v1, v2);
    if (nv == 0.0) {  // already diagonal-ish
        v1 = 1.0;
        v2 = 0.0;
        nv = 1.0;
    }
    G.resize(2, 2);
    G << v1 / nv, -v2 / nv, v2 / nv, v1 / nv;
    return true;
}

void similarity_2x2(Matrix& H, Matrix& Q, const Matrix& G, Eigen::Index i) {
    const Eigen::Index n = H.rows();
    H.block(i, 0, 2, n) = G.transpose() * H.block(i, 0, 2, n);
    H.block(0, i, n, 2) = H.block(0, i, n, 2) * G;
    Q.block(0, i, n, 2) = Q.block(0, i, n, 2) * G;
}

struct Block {
    Eigen::Index start;
    Eigen::Index size;
};

std::vector<Block> diagonal_blocks(const Matrix& S, double subdiag_tol) {
    std::vector<Block> blocks;
    const Eigen::Index n = S.rows();
    Eigen::Index i = 0;
    while (i < n) {
        if (i + 1 < n && std::abs(S(i + 1, i)) > subdiag_tol) {
            blocks.push_back({i, 2});
            i += 2;
        } else {
            blocks.push_back({i, 1});
            ++i;
        }
    }
    return blocks;
}

double block_magnitude(const Matrix& S, const Block& b) {
    if (b.size == 1) return std::abs(S(b.start, b.start));
    const double det = S(b.start, b.start) * S(b.start + 1, b.start + 1) -
                       S(b.start, b.start + 1) * S(b.start + 1, b.start);
    return std::sqrt(std::abs(det));
}

// Exchanges two adjacent diagonal blocks of S via the direct-swap method:
// solve the small Sylvester equation for the invariant subspace of the
// second block, orthogonalize, and apply the similarity.
void swap_adjacent_blocks(Matrix& S, Matrix& U, const Block& b1, const Block& b2,
                          double scale) {
    const Eigen::Index p = b1.size, q = b2.size;
    const Eigen::Index i = b1.start;
    const Matrix A11 = S.block(i, i, p, p);
    const Matrix A12 = S.block(i, i + p, p, q);
    const Matrix A22 = S.block(i + p, i + p, q, q);

    // A11 W - W A22 = -A12 as a Kronecker system
    Matrix Ksys = Matrix::Zero(p * q, p * q);
    Vector rhs(p * q);
    for (Eigen::Index col = 0; col < q; ++col) {
        for (Eigen::Index row = 0; row < p; ++row) {
            const Eigen::Index r = col * p + row;
            rhs(r) = -A12(row, col);
            for (Eigen::Index k = 0; k < p; ++k) {
                Ksys(r, col * p + k) += A11(row, k);
            }
            for (Eigen::Index k = 0; k < q; ++k) {
                Ksys(r, k * p + row) -= A22(k, col);
            }
        }
    }
    Eigen::FullPivLU<Matrix> lu(Ksys);
    lu.setThreshold(1e-12);
    if (lu.rank() < p * q) {
        fail(ErrorCode::SwapIllConditioned,
             "block exchange: Sylvester system is numerically singular");
    }
    const Vector wvec = lu.solve(rhs);
    Matrix V(p + q, q);
    for (Eigen::Index col = 0; col < q; ++col) {
        for (Eigen::Index row = 0; row < p; ++row) {
            V(row, col) = wvec(col * p + row);
        }
    }
    V.block(p, 0, q, q) = Matrix::Identity(q, q);

    Eigen::HouseholderQR<Matrix> qr(V);
    const Matrix Qw = qr.householderQ();

    const Eigen::Index n = S.rows();
    const Eigen::Index m = p + q;
    S.block(i, 0, m, n) = Qw.transpose() * S.block(i, 0, m, n);
    S.block(0, i, n, m) = S.block(0, i, n, m) * Qw;
    U.block(0, i, n, m) = U.block(0, i, n, m) * Qw;

    // the lower-left q columns below the swapped-in block must vanish; a
    // large residual means the exchange was too ill-conditioned to trust
    double resid = 0.0;
    for (Eigen::Index c = 0; c < q; ++c) {
        for (Eigen::Index r = q; r < m; ++r) {
            resid = std::max(resid, std::abs(S(i + r, i + c)));
        }
    }
    if (resid > 1e-8 * std::max(scale, 1.0)) {
        fail(ErrorCode::SwapIllConditioned, "block exchange lost triangularity");
    }
    for (Eigen::Index c = 0; c < q; ++c) {
        for (Eigen::Index r = q; r < m; ++r) {
            S(i + r, i + c) = 0.0;
        }
    }
}

}  // namespace

std::pair<Matrix, Matrix> hessenberg(const Eigen::Ref<const Matrix>& A) {
    if (A.rows() != A.cols()) {
        fail(ErrorCode::NonSquare, "hessenberg requires a square matrix");
    }
    require_finite(A, "hessenberg input");
    const Eigen::Index n = A.rows();
    Matrix H = A;
    Matrix Q = Matrix::Identity(n, n);
    Vector w;
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        const Vector x = H.block(k + 1, k, n - k - 1, 1);
        if (!householder_unit(x, w)) continue;
        apply_reflector_rows(H, w, k + 1, k);
        apply_reflector_cols(H, w, k + 1, n);
        apply_reflector_cols(Q, w, k + 1, n);
        for (Eigen::Index r = k + 2; r < n; ++r) H(r, k) = 0.0;
    }
    return {Q, H};
}

SchurFactorization real_schur(const Eigen::Ref<const Matrix>& A, double tol) {
    if (A.rows() != A.cols()) {
        fail(ErrorCode::NonSquare, "real_schur requires a square matrix");
    }
    require_finite(A, "real_schur input");
    const Eigen::Index n = A.rows();
    if (n == 0) return {Matrix(0, 0), Matrix(0, 0)};

    auto [Q, H] = hessenberg(A);
    const double hnorm = std::max(H.cwiseAbs().sum(), 1e-300);
    const double eps = std::max(tol, 4.0 * std::numeric_limits<double>::epsilon());

    Eigen::Index hi = n - 1;
    int iter_block = 0;
    long total_iter = 0;
    const long iter_cap = 60 * static_cast<long>(n) + 100;
    Matrix G;
    Vector w;

    while (hi >= 0) {
        // locate the top of the active unreduced window
        Eigen::Index lo = hi;
        while (lo > 0) {
            const double s = std::abs(H(lo - 1, lo - 1)) + std::abs(H(lo, lo));
            const double thresh = s > 0.0 ? eps * s : eps * hnorm;
            if (std::abs(H(lo, lo - 1)) <= thresh) {
                H(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }

        if (lo == hi) {
            hi -= 1;
            iter_block = 0;
            continue;
        }
        if (lo == hi - 1) {
            if (split_real_block(H.block(lo, lo, 2, 2), G)) {
                similarity_2x2(H, Q, G, lo);
                H(hi, lo) = 0.0;
            }
            hi -= 2;
            iter_block = 0;
            continue;
        }

        if (++total_iter > iter_cap) {
            fail(ErrorCode::NoConvergence, "real_schur: QR iteration cap exceeded");
        }
        ++iter_block;

        // implicit double shift from the trailing 2x2; exceptional shift on
        // stagnation (EISPACK-style)
        double sigma, prod;
        if (iter_block % 11 == 10) {
            const double s = std::abs(H(hi, hi - 1)) + std::abs(H(hi - 1, hi - 2));
            sigma = 1.5 * s;
            prod = -0.4375 * s * s;
        } else {
            sigma = H(hi - 1, hi - 1) + H(hi, hi);
            prod = H(hi - 1, hi - 1) * H(hi, hi) - H(hi - 1, hi) * H(hi, hi - 1);
        }

        double x = H(lo, lo) * H(lo, lo) + H(lo, lo + 1) * H(lo + 1, lo) - sigma * H(lo, lo) + prod;
        double y = H(lo + 1, lo) * (H(lo, lo) + H(lo + 1, lo + 1) - sigma);
        double z = H(lo + 2, lo + 1) * H(lo + 1, lo);
        if (std::abs(x) + std::abs(y) + std::abs(z) == 0.0) {
            // fully degenerate first column; nudge with an exceptional shift
            const double s = std::abs(H(hi, hi - 1)) + std::abs(H(hi - 1, hi - 2)) + eps * hnorm;
            x = H(lo, lo) * H(lo, lo) - 1.5 * s * H(lo, lo) - 0.4375 * s * s;
            y = H(lo + 1, lo) * (H(lo, lo) + H(lo + 1, lo + 1) - 1.5 * s);
            z = H(lo + 2, lo + 1) * H(lo + 1, lo);
        }

        for (Eigen::Index k = lo; k <= hi - 2; ++k) {
            Vector v(3);
            if (k == lo) {
                v << x, y, z;
            } else {
                v << H(k, k - 1), H(k + 1, k - 1), H(k + 2, k - 1);
            }
            if (!householder_unit(v, w)) continue;
            const Eigen::Index col0 = k == lo ? lo : k - 1;
            // rows k..k+2 over columns col0..n-1
            {
                const Eigen::Index nc = n - col0;
                Eigen::RowVectorXd t = w.transpose() * H.block(k, col0, 3, nc);
                H.block(k, col0, 3, nc).noalias() -= 2.0 * w * t;
            }
            // columns k..k+2 over rows 0..min(k+3, hi)
            {
                const Eigen::Index rlast = std::min(k + 3, hi);
                Vector t = H.block(0, k, rlast + 1, 3) * w;
                H.block(0, k, rlast + 1, 3).noalias() -= 2.0 * t * w.transpose();
            }
            {
                Vector t = Q.middleCols(k, 3) * w;
                Q.middleCols(k, 3).noalias() -= 2.0 * t * w.transpose();
            }
            if (k > lo) {
                H(k + 1, k - 1) = 0.0;
                H(k + 2, k - 1) = 0.0;
            }
        }
        // final 2x2 reflector at the bottom of the window
        {
            const Eigen::Index k = hi - 1;
            Vector v(2);
            v << H(k, k - 1), H(k + 1, k - 1);
            if (householder_unit(v, w)) {
                const Eigen::Index col0 = k - 1;
                const Eigen::Index nc = n - col0;
                Eigen::RowVectorXd t = w.transpose() * H.block(k, col0, 2, nc);
                H.block(k, col0, 2, nc).noalias() -= 2.0 * w * t;
                Vector tc = H.block(0, k, hi + 1, 2) * w;
                H.block(0, k, hi + 1, 2).noalias() -= 2.0 * tc * w.transpose();
                Vector tq = Q.middleCols(k, 2) * w;
                Q.middleCols(k, 2).noalias() -= 2.0 * tq * w.transpose();
            }
            H(k + 1, k - 1) = 0.0;
        }
    }

    // final pass: make sure every surviving 2x2 block is a complex pair
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (H(i + 1, i) != 0.0) {
            if (split_real_block(H.block(i, i, 2, 2), G)) {
                similarity_2x2(H, Q, G, i);
                H(i + 1, i) = 0.0;
            }
        }
    }
    return {Q, H};
}

SchurFactorization order_schur_zeros_last(SchurFactorization f, double eps_zero) {
    Matrix& S = f.S;
    Matrix& U = f.U;
    if (S.rows() != S.cols() || U.rows() != U.cols() || U.rows() != S.rows()) {
        fail(ErrorCode::DimensionMismatch, "order_schur_zeros_last: inconsistent factorization");
    }
    const Eigen::Index n = S.rows();
    if (n <= 1) return f;
    const double scale = S.norm();
    const double subdiag_tol = 1e-12 * std::max(scale, 1.0);

    // split any real-eigenvalue 2x2 blocks so magnitudes are per-eigenvalue
    Matrix G;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        if (std::abs(S(i + 1, i)) > subdiag_tol &&
            split_real_block(S.block(i, i, 2, 2), G)) {
            similarity_2x2(S, U, G, i);
            S(i + 1, i) = 0.0;
        }
    }

    const double zero_thresh = eps_zero * std::max(scale, 1e-300);
    auto key = [&](const Block& b) {
        const double m = block_magnitude(S, b);
        return m <= zero_thresh ? 0.0 : m;
    };

    bool swapped = true;
    while (swapped) {
        swapped = false;
        auto blocks = diagonal_blocks(S, subdiag_tol);
        for (size_t j = 0; j + 1 < blocks.size(); ++j) {
            if (key(blocks[j]) < key(blocks[j + 1])) {
                swap_adjacent_blocks(S, U, blocks[j], blocks[j + 1], scale);
                swapped = true;
                break;  // re-derive block layout after each exchange
            }
        }
    }
    return f;
}

}  // namespace invset
