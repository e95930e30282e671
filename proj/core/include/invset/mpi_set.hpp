#pragma once

#include <optional>
#include <variant>

#include "invset/czono.hpp"
#include "invset/errors.hpp"
#include "invset/hpolyhedron.hpp"
#include "invset/lti.hpp"
#include "invset/matrix_ops.hpp"

namespace invset {

enum class Backend { HPoly, CZono };
enum class Branch { Standard, Singular };

struct MpiOptions {
    double eps_zero = 1e-9;  // zero-eigenvalue threshold, relative to ||A||_F
    double tol_nil = 1e-9;   // nilpotency threshold, relative to ||A||_F
    double tol_feas = 1e-8;  // LP feasibility / containment tolerance
    int k_max = 500;         // recurrence iteration cap
    int p_offset = 0;        // conservative extra steps on the nilpotency index
    int sign_convention = +1;  // sigma in A + sigma B K (mpi_compute only)
};

// Ordered-Schur split of a singular closed-loop matrix:
//   A = U [S11 S12; 0 S22] U^T, eig(S11) nonzero, eig(S22) = {0},
// p the nilpotency index of S22 (smallest p with S22^p = 0), and
// T = sum_{i=0..p} S11^{-i} S12 S22^i.
struct SchurSplit {
    Matrix U;
    Matrix S11;
    Matrix S12;
    Matrix S22;
    Eigen::Index d1 = 0;
    Eigen::Index d2 = 0;
    int p = 0;
    Matrix T;

    Matrix U1() const { return U.leftCols(d1); }
    Matrix U2() const { return U.rightCols(d2); }
};

struct MPIResult {
    std::variant<HPolyhedron, ConstrainedZonotope> set;
    int k_bar = 0;
    Branch branch = Branch::Standard;
    double wall_seconds = 0.0;

    bool is_hpoly() const { return std::holds_alternative<HPolyhedron>(set); }
    const HPolyhedron& hpoly() const { return std::get<HPolyhedron>(set); }
    const ConstrainedZonotope& czono() const { return std::get<ConstrainedZonotope>(set); }

    // representation size: inequality count for H-rep sets
    Eigen::Index q_bar() const { return hpoly().rows(); }
};

// Constraint set that can feed either backend. Boxes populate both forms;
// an H-rep form can be folded into a CZ on demand, the reverse direction is
// only available for plain boxes.
struct ConstraintSet {
    std::optional<HPolyhedron> h;
    std::optional<ConstrainedZonotope> z;

    static ConstraintSet box(const Vector& radii);
    static ConstraintSet from_h(HPolyhedron P);
    static ConstraintSet from_cz(ConstrainedZonotope Z);

    Eigen::Index dim() const;
    const HPolyhedron& require_h() const;
    ConstrainedZonotope require_cz() const;  // folds from h when needed
};

// Throws InvalidConstraintSet unless Xbar is bounded with 0 in its interior.
void validate_constraint_set(const HPolyhedron& Xbar, double tol_feas = 1e-8);

// Standard recurrence Omega_{k+1} = A^{-1} Omega_k intersect Xbar from
// Omega_0 = Xbar, with redundancy removal after every step; k_bar is the
// fixed-point index (Omega_{k_bar} = Omega_{k_bar+1}).
// Throws SingularDynamics when A_cl has a zero eigenvalue.
MPIResult mpi_standard_h(const Matrix& A_cl, const HPolyhedron& Xbar,
                         const MpiOptions& opts = {});

// Constrained-zonotope recurrence; Xbar_h is the half-space description of
// the same set, used only for the fixed-point support tests.
MPIResult mpi_standard_cz(const Matrix& A_cl, const ConstrainedZonotope& Xbar_cz,
                          const HPolyhedron& Xbar_h, const MpiOptions& opts = {});

// Ordered-Schur split with the zero eigenvalues trailing.
// Detection escalates from eps_zero through a short ladder of larger
// thresholds (defective zero clusters scatter like eps_machine^(1/nu) under
// any backward-stable QR); a candidate cluster is only accepted when its
// trailing block verifies as nilpotent to tol_nil, so genuinely nonzero
// eigenvalues cannot be absorbed. Throws NoZeroEigenvalues when no verified
// cluster exists.
SchurSplit schur_split(const Matrix& A_cl, double eps_zero = 1e-9, double tol_nil = 1e-9);

// Non-throwing variant of the zero-cluster detection; nullopt means the
// matrix is (numerically) nonsingular.
std::optional<SchurSplit> try_schur_split(const Matrix& A_cl, double eps_zero = 1e-9,
                                          double tol_nil = 1e-9);

Matrix compute_T(const SchurSplit& split);

// Reduced constraint set Z = { z : F U1 z <= theta } for the d1-dimensional
// dynamics z+ = S11 z.
HPolyhedron reduced_constraints_h(const SchurSplit& split, const HPolyhedron& Xbar);

// Reduced set < U1^T c, U1^T G, [F; U2^T G], [theta; -U2^T c] >; the extra
// rows pin the nilpotent coordinates to zero.
ConstrainedZonotope reduced_constraints_cz(const SchurSplit& split,
                                           const ConstrainedZonotope& Xbar);

// The lifted coupling map [S11^p  S11^{p-1} T] U^T used to pull the reduced
// MPI set back into the full space (p already includes any p_offset).
Matrix singular_lift_map(const SchurSplit& split, int p_eff);

MPIResult mpi_singular_h(const Matrix& A_cl, const HPolyhedron& Xbar,
                         const MpiOptions& opts = {});

MPIResult mpi_singular_cz(const Matrix& A_cl, const ConstrainedZonotope& Xbar_cz,
                          const HPolyhedron& Xbar_h, const MpiOptions& opts = {});

// Forward-power reference: accumulates rows F A^k with redundancy removal
// until a whole step is redundant. Well-defined for singular A_cl; serves as
// the independent cross-check for both branch pipelines.
MPIResult mpi_oracle_forward(const Matrix& A_cl, const HPolyhedron& Xbar, int k_max = 500,
                             double tol_feas = 1e-8);

// Dispatcher: builds the closed loop A + sigma B K and Xbar, detects zero
// eigenvalues, and routes to the standard or singular pipeline of the chosen
// backend.
MPIResult mpi_compute(const Matrix& A, const Matrix& B, const Matrix& K,
                      const ConstraintSet& X, const ConstraintSet& Uc, Backend backend,
                      const MpiOptions& opts = {});

}  // namespace invset
