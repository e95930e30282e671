#include "invset/cse.hpp"

namespace invset {

LTISystem cse_generate(const CSEParams& params) {
    if (params.ell < 2) fail(ErrorCode::InvalidParams, "cse_generate: ell must be >= 2");
    if (params.mu <= 0.0 || params.Ts < 0.0) {
        fail(ErrorCode::InvalidParams, "cse_generate: mu must be positive and Ts nonnegative");
    }
    const Eigen::Index l = params.ell;

    Matrix Kc = Matrix::Zero(l, l);
    for (Eigen::Index i = 0; i < l; ++i) {
        Kc(i, i) = params.conventional_stiffness ? 2.0 : -2.0;
    }
    Kc(0, 0) = 1.0;
    Kc(l - 1, l - 1) = 1.0;
    for (Eigen::Index i = 0; i + 1 < l; ++i) {
        Kc(i, i + 1) = -1.0;
        Kc(i + 1, i) = -1.0;
    }
    Kc *= params.k;

    Matrix Dc = Matrix::Zero(l, 2);
    Dc(0, 0) = 1.0;
    Dc(l - 1, 1) = -1.0;

    const Eigen::Index n = 2 * l;
    Matrix Ac = Matrix::Zero(n, n);
    Ac.topRightCorner(l, l).setIdentity();
    Ac.bottomLeftCorner(l, l) = -Kc / params.mu;
    Ac.bottomRightCorner(l, l) = -(params.delta / params.mu) * Matrix::Identity(l, l);
    Matrix Bc = Matrix::Zero(n, 2);
    Bc.bottomRows(l) = Dc / params.mu;

    LTISystem sys;
    sys.A = Matrix::Identity(n, n) + params.Ts * Ac;
    sys.B = params.Ts * Bc;
    return sys;
}

}  // namespace invset
