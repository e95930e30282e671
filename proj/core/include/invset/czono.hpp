#pragma once

#include <Eigen/Dense>

#include "invset/errors.hpp"
#include "invset/hpolyhedron.hpp"
#include "invset/matrix_ops.hpp"

namespace invset {

// Constrained zonotope { c + G lambda : F_eq lambda = theta_eq,
// ||lambda||_inf <= 1 }. Empty equality parts give a plain zonotope; empty
// results are legal values (emptiness is decidable through cz_is_empty).
class ConstrainedZonotope {
  public:
    ConstrainedZonotope(Vector c, Matrix G, Matrix F_eq, Vector theta_eq);

    // zonotope without equality constraints
    static ConstrainedZonotope zonotope(Vector c, Matrix G);
    // axis-aligned box |x_i - c_i| <= radii(i)
    static ConstrainedZonotope box(const Vector& radii);
    static ConstrainedZonotope box(Eigen::Index n, double radius);

    const Vector& center() const { return c_; }
    const Matrix& G() const { return G_; }
    const Matrix& F_eq() const { return Feq_; }
    const Vector& theta_eq() const { return theta_eq_; }
    Eigen::Index dim() const { return c_.size(); }
    Eigen::Index generators() const { return G_.cols(); }
    Eigen::Index constraints() const { return Feq_.rows(); }

    // image under x -> M x (M need not be square)
    ConstrainedZonotope linear_map(const Matrix& M) const;

  private:
    Vector c_;
    Matrix G_;
    Matrix Feq_;
    Vector theta_eq_;
};

// Exact intersection (same ambient dimension):
//   < c1, [G1 0], [F1 0; 0 F2; G1 -G2], [th1; th2; c2 - c1] >
ConstrainedZonotope cz_intersect(const ConstrainedZonotope& Z1, const ConstrainedZonotope& Z2);

// Generalized intersection under a linear map: { x in Z1 : R x in Z2 }.
// cz_intersect is the R = I special case.
ConstrainedZonotope cz_intersect_under_map(const ConstrainedZonotope& Z1, const Matrix& R,
                                           const ConstrainedZonotope& Z2);

// X_bar = { x in X : K x in U } with the coupling row [K G_X  -G_U] and
// right-hand side c_U - K c_X; pre-existing equality rows carry along.
ConstrainedZonotope closed_loop_constraints_cz(const ConstrainedZonotope& X,
                                               const ConstrainedZonotope& Uc, const Matrix& K);

// One step of the backward recurrence: Omega_{k+1} = M_inv Omega_k  intersect
// Xbar, with M_inv the inverse of the (invertible) dynamics map.
ConstrainedZonotope cz_recurrence_step(const ConstrainedZonotope& Zk, const Matrix& M_inv,
                                       const ConstrainedZonotope& Xbar);

// true iff support_cz(Z, F_i) <= theta_i + tol for every row i of P.
// Throws EmptySet when Z is empty.
bool cz_contained_in_hpoly(const ConstrainedZonotope& Z, const HPolyhedron& P,
                           double tol = 1e-8);

// Exact constrained-zonotope form of a bounded H-polyhedron: the interval
// hull provides the generator box, and every half-space folds in through one
// slack generator. Throws Unbounded / EmptySet.
ConstrainedZonotope cz_from_hpoly(const HPolyhedron& P, double tol = 1e-8);

}  // namespace invset
