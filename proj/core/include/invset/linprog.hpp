#pragma once

#include <Eigen/Dense>

#include "invset/errors.hpp"
#include "invset/matrix_ops.hpp"

namespace invset {

class HPolyhedron;
class ConstrainedZonotope;

// Maximization LP:  max objective^T x
//   s.t.  eq_A x = eq_b,  in_A x <= in_b,  lower <= x <= upper
// (+/-infinity entries allowed in the bound vectors).
struct LinearProgram {
    Vector objective;
    Matrix eq_A;
    Vector eq_b;
    Matrix in_A;
    Vector in_b;
    Vector lower;
    Vector upper;
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

struct LPOutcome {
    LPStatus status = LPStatus::Infeasible;
    Vector x;            // maximizer (structural variables) when Optimal
    double value = 0.0;  // objective at the maximizer
    int iterations = 0;
};

// Bounded-variable two-phase primal simplex (Dantzig pricing with a Bland
// fallback on stall). Throws NumericalStall if the pivot cap is exceeded.
LPOutcome lp_solve(const LinearProgram& lp, double tol_feas = 1e-8);

// sup { d^T x : x in P }. Returns +infinity when P is unbounded along d.
// Throws EmptySet when P is empty.
double support_hpoly(const HPolyhedron& P, const Vector& d, double tol_feas = 1e-8);

// Support value together with a maximizer, reconstructed from the active
// rows of the dual optimum. Throws Unbounded when the support is infinite.
std::pair<double, Vector> support_hpoly_point(const HPolyhedron& P, const Vector& d,
                                              double tol_feas = 1e-8);

bool hpoly_is_empty(const HPolyhedron& P, double tol_feas = 1e-8);

// sup { d^T x : x in Z }; always finite (constrained zonotopes are compact).
// Throws EmptySet when Z is empty.
double support_cz(const ConstrainedZonotope& Z, const Vector& d, double tol_feas = 1e-8);

// Feasibility of x = c + G lambda, F lambda = theta, ||lambda||_inf <= 1.
bool member_cz(const ConstrainedZonotope& Z, const Vector& x, double tol_feas = 1e-8);

bool cz_is_empty(const ConstrainedZonotope& Z, double tol_feas = 1e-8);

}  // namespace invset
