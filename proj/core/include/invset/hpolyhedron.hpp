#pragma once

#include <vector>

#include <Eigen/Dense>

#include "invset/errors.hpp"
#include "invset/linprog.hpp"
#include "invset/matrix_ops.hpp"

namespace invset {

// Half-space polyhedron { x : F x <= theta }. Rows with a zero normal are
// normalized away at construction: dropped when theta_i >= 0, otherwise the
// whole set is flagged empty (0 <= theta_i is unsatisfiable).
class HPolyhedron {
  public:
    HPolyhedron(Matrix F, Vector theta);

    // the full space in dimension n
    static HPolyhedron full_space(Eigen::Index n) { return HPolyhedron(Matrix(0, n), Vector(0)); }

    // axis-aligned box |x_i| <= radii(i)
    static HPolyhedron box(const Vector& radii);
    static HPolyhedron box(Eigen::Index n, double radius);

    const Matrix& F() const { return F_; }
    const Vector& theta() const { return theta_; }
    Eigen::Index dim() const { return F_.cols(); }
    Eigen::Index rows() const { return F_.rows(); }
    bool flagged_empty() const { return flagged_empty_; }

    bool contains_point(const Vector& x, double tol = 1e-9) const;

  private:
    Matrix F_;
    Vector theta_;
    bool flagged_empty_ = false;
};

// X_bar = { x in X : K x in U }, i.e. rows [F_X ; F_U K].
HPolyhedron closed_loop_constraints_h(const HPolyhedron& X, const HPolyhedron& Uc,
                                      const Matrix& K);

// { x : F M x <= theta }, the exact preimage of P under the map x -> M x.
HPolyhedron preimage_linear_h(const HPolyhedron& P, const Matrix& M);

HPolyhedron intersect_h(const HPolyhedron& P, const HPolyhedron& Q);

// Minimal representation: drops every row whose removal leaves the set
// unchanged (certified by a per-row support LP). Throws EmptySet.
HPolyhedron remove_redundant(const HPolyhedron& P, double tol = 1e-8);

// P contains Q (both same dimension, Q nonempty).
bool contains_h(const HPolyhedron& P, const HPolyhedron& Q, double tol = 1e-8);

bool equals_h(const HPolyhedron& P, const HPolyhedron& Q, double tol = 1e-8);

// Vertex enumeration for n <= 3; 2D vertices come back in counter-clockwise
// order. Throws DimensionTooHigh / Unbounded / EmptySet.
std::vector<Vector> vertices_lowdim(const HPolyhedron& P, double tol = 1e-8);

}  // namespace invset
