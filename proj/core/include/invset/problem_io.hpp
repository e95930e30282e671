#pragma once

#include <optional>
#include <string>
#include <vector>

#include "invset/cse.hpp"
#include "invset/dare.hpp"
#include "invset/mpi_set.hpp"

namespace invset {

// Gain specification: either a literal matrix or DARE weights to synthesize
// one from.
struct GainSpec {
    std::optional<Matrix> literal;
    std::optional<DareSpec> dare;
};

// Constraint-set description exactly as written on disk, so that
// save(load(f)) reproduces the matrices bit for bit.
struct SetSpec {
    enum class Kind { Box, HRep, CZ };
    Kind kind = Kind::Box;
    Vector box_radii;
    Matrix F;
    Vector theta;
    Vector c;
    Matrix G;
    Matrix F_eq;
    Vector theta_eq;

    ConstraintSet to_constraint_set() const;
};

// On-disk problem description (JSON, schema 1). Matrices are stored as
// nested arrays of decimal strings so numeric round-trips are exact.
struct ProblemFile {
    Matrix A;
    Matrix B;
    GainSpec gain;
    SetSpec X;
    SetSpec U;
    Backend backend = Backend::HPoly;
    MpiOptions opts;
};

ProblemFile parse_problem_json(const std::string& text);
std::string problem_to_json(const ProblemFile& pf);
ProblemFile load_problem(const std::string& path);
void save_problem(const std::string& path, const ProblemFile& pf);

// literal gain or DARE synthesis on (A, B)
Matrix resolve_gain(const ProblemFile& pf);

// convenience: resolve the gain and run the dispatcher on the chosen backend
MPIResult run_problem(const ProblemFile& pf);

// Result document: {schema, branch, k_bar, wall_time_ms, q_bar | (D, n_c), set}
std::string result_to_json(const MPIResult& result);

// One row of the CSE benchmark sweep; "branch" is standard/singular for the
// dispatched pipeline and "oracle" for the forward-power baseline.
struct CseSweepRow {
    int ell = 0;
    std::string branch;
    int k_bar = 0;
    Eigen::Index q_bar = 0;
    double wall_ms = 0.0;
};

// For each ell: generate the chain, close the loop with the DARE gain for
// Q = q_scale I, R = r_scale I, then run the dispatched pipeline and the
// forward-power baseline on the same instance.
std::vector<CseSweepRow> run_cse_sweep(int ell_min, int ell_max, double q_scale, double r_scale,
                                       const MpiOptions& opts, bool include_oracle = true,
                                       bool conventional_stiffness = false);

// header "l,branch,k_bar,q_bar,wall_ms"
std::string sweep_to_csv(const std::vector<CseSweepRow>& rows);

// Plot data: vertex list for n <= 3 ("x,y[,z]" rows, 2D vertices in
// counter-clockwise order); for n > 3 a support polyline of the projection
// onto the (plane_i, plane_j) coordinate plane.
std::string plot_data_csv(const HPolyhedron& P, int plane_i = 0, int plane_j = 1,
                          int samples = 180);

}  // namespace invset
