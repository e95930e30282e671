#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "invset/linprog.hpp"
#include "invset/problem_io.hpp"

using namespace invset;

namespace {

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::IterationCapExceeded:
            return 4;
        case ErrorCode::InvalidParams:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::NonSquare:
        case ErrorCode::InvalidConstraintSet:
        case ErrorCode::IoError:
            return 2;
        default:
            return 3;
    }
}

void write_output(const std::string& out_path, const std::string& payload) {
    if (out_path.empty()) {
        std::cout << payload;
        if (!payload.empty() && payload.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) fail(ErrorCode::IoError, "cannot write output file: " + out_path);
    out << payload;
}

struct OptOverrides {
    std::optional<double> eps_zero, tol_nil, tol_feas;
    std::optional<int> k_max, p_offset, sign;
    std::optional<std::string> backend;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--eps-zero", eps_zero, "zero-eigenvalue threshold (relative)");
        cmd->add_option("--tol-nil", tol_nil, "nilpotency threshold (relative)");
        cmd->add_option("--tol-feas", tol_feas, "LP feasibility/containment tolerance");
        cmd->add_option("--k-max", k_max, "recurrence iteration cap");
        cmd->add_option("--p-offset", p_offset, "extra steps on the nilpotency index");
        cmd->add_option("--sign", sign, "feedback sign convention (+1 or -1)")
            ->check(CLI::IsMember({1, -1}));
        cmd->add_option("--backend", backend, "set representation backend")
            ->check(CLI::IsMember({"hpoly", "czono"}));
    }

    void apply(ProblemFile& pf) const {
        if (eps_zero) pf.opts.eps_zero = *eps_zero;
        if (tol_nil) pf.opts.tol_nil = *tol_nil;
        if (tol_feas) pf.opts.tol_feas = *tol_feas;
        if (k_max) pf.opts.k_max = *k_max;
        if (p_offset) pf.opts.p_offset = *p_offset;
        if (sign) pf.opts.sign_convention = *sign;
        if (backend) pf.backend = *backend == "czono" ? Backend::CZono : Backend::HPoly;
    }
};

nlohmann::json matrix_json(const Matrix& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_compute(const std::string& problem_path, const OptOverrides& ov,
                const std::string& out_path) {
    ProblemFile pf = load_problem(problem_path);
    ov.apply(pf);
    const MPIResult res = run_problem(pf);
    write_output(out_path, result_to_json(res));
    return 0;
}

int cmd_schur(const std::string& problem_path, const OptOverrides& ov,
              const std::string& out_path) {
    ProblemFile pf = load_problem(problem_path);
    ov.apply(pf);
    const Matrix K = resolve_gain(pf);
    const Matrix A_cl = pf.A + static_cast<double>(pf.opts.sign_convention) * pf.B * K;

    nlohmann::json j;
    j["schema"] = 1;
    const auto split = try_schur_split(A_cl, pf.opts.eps_zero, pf.opts.tol_nil);
    if (split) {
        j["singular"] = true;
        j["d1"] = split->d1;
        j["d2"] = split->d2;
        j["p"] = split->p;
        j["U"] = matrix_json(split->U);
        j["S11"] = matrix_json(split->S11);
        j["S12"] = matrix_json(split->S12);
        j["S22"] = matrix_json(split->S22);
        j["T"] = matrix_json(split->T);
    } else {
        j["singular"] = false;
        const auto f = order_schur_zeros_last(real_schur(A_cl), pf.opts.eps_zero);
        j["U"] = matrix_json(f.U);
        j["S"] = matrix_json(f.S);
    }
    nlohmann::json eigs = nlohmann::json::array();
    for (const auto& e : eigenvalues(A_cl)) {
        eigs.push_back(nlohmann::json{{"re", e.real()}, {"im", e.imag()}});
    }
    j["eigenvalues"] = std::move(eigs);
    write_output(out_path, j.dump(2));
    return 0;
}

int cmd_oracle(const std::string& problem_path, const OptOverrides& ov,
               const std::string& out_path) {
    ProblemFile pf = load_problem(problem_path);
    ov.apply(pf);
    const Matrix K = resolve_gain(pf);
    const Matrix K_cl = static_cast<double>(pf.opts.sign_convention) * K;
    const Matrix A_cl = pf.A + pf.B * K_cl;
    const HPolyhedron Xbar = closed_loop_constraints_h(
        pf.X.to_constraint_set().require_h(), pf.U.to_constraint_set().require_h(), K_cl);
    const MPIResult res = mpi_oracle_forward(A_cl, Xbar, pf.opts.k_max, pf.opts.tol_feas);
    write_output(out_path, result_to_json(res));
    return 0;
}

int cmd_bench_cse(int lmin, int lmax, double q, double r, int k_max, bool no_oracle,
                  const std::string& kc_variant, const std::string& out_path) {
    MpiOptions opts;
    opts.k_max = k_max;
    const auto rows =
        run_cse_sweep(lmin, lmax, q, r, opts, !no_oracle, kc_variant == "standard");
    write_output(out_path, sweep_to_csv(rows));
    return 0;
}

int cmd_emit_plot(const std::string& problem_path, const OptOverrides& ov, bool reduced,
                  int plane_i, int plane_j, int samples, const std::string& out_path) {
    ProblemFile pf = load_problem(problem_path);
    ov.apply(pf);
    if (reduced) {
        const Matrix K = resolve_gain(pf);
        const Matrix K_cl = static_cast<double>(pf.opts.sign_convention) * K;
        const Matrix A_cl = pf.A + pf.B * K_cl;
        const HPolyhedron Xbar = closed_loop_constraints_h(
            pf.X.to_constraint_set().require_h(), pf.U.to_constraint_set().require_h(), K_cl);
        const SchurSplit split = schur_split(A_cl, pf.opts.eps_zero, pf.opts.tol_nil);
        const HPolyhedron Z = remove_redundant(reduced_constraints_h(split, Xbar),
                                               pf.opts.tol_feas);
        const MPIResult phi_z = mpi_standard_h(split.S11, Z, pf.opts);
        write_output(out_path, plot_data_csv(phi_z.hpoly(), plane_i, plane_j, samples));
        return 0;
    }
    pf.backend = Backend::HPoly;  // vertex/polyline emission works on H-rep sets
    const MPIResult res = run_problem(pf);
    write_output(out_path, plot_data_csv(res.hpoly(), plane_i, plane_j, samples));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"maximal positively invariant sets for linear closed loops, "
                 "with a Schur-based pipeline for rank-deficient dynamics"};
    app.require_subcommand(1);

    std::string problem_path, out_path;
    OptOverrides ov;

    auto* compute = app.add_subcommand("compute", "compute the MPI set of a problem file");
    compute->add_option("--problem", problem_path, "problem JSON file")->required();
    compute->add_option("--out", out_path, "output path (default: stdout)");
    ov.add_flags(compute);

    auto* schur = app.add_subcommand("schur", "ordered Schur split of the closed loop");
    schur->add_option("--problem", problem_path, "problem JSON file")->required();
    schur->add_option("--out", out_path, "output path (default: stdout)");
    ov.add_flags(schur);

    auto* oracle = app.add_subcommand("oracle", "forward-power reference computation");
    oracle->add_option("--problem", problem_path, "problem JSON file")->required();
    oracle->add_option("--out", out_path, "output path (default: stdout)");
    ov.add_flags(oracle);

    auto* bench = app.add_subcommand("bench", "benchmark sweeps");
    int lmin = 2, lmax = 10, k_max = 500;
    double qw = 1.0, rw = 1.0;
    bool no_oracle = false;
    std::string kc_variant = "paper";
    auto* bench_cse = bench->add_subcommand("cse", "coupled-spring chain scaling sweep");
    bench_cse->add_option("--lmin", lmin, "smallest mass count")->check(CLI::Range(2, 64));
    bench_cse->add_option("--lmax", lmax, "largest mass count")->check(CLI::Range(2, 64));
    bench_cse->add_option("--q", qw, "state weight scale (Q = q I)");
    bench_cse->add_option("--r", rw, "input weight scale (R = r I)");
    bench_cse->add_option("--k-max", k_max, "recurrence iteration cap");
    bench_cse->add_flag("--no-oracle", no_oracle, "skip the forward-power baseline rows");
    bench_cse->add_option("--kc-variant", kc_variant, "stiffness stencil variant")
        ->check(CLI::IsMember({"paper", "standard"}));
    bench_cse->add_option("--out", out_path, "output CSV path (default: stdout)");
    bench->require_subcommand(1);

    auto* plot = app.add_subcommand("emit-plot", "vertex or outline data for plotting");
    bool reduced = false;
    int plane_i = 0, plane_j = 1, samples = 180;
    plot->add_option("--problem", problem_path, "problem JSON file")->required();
    plot->add_flag("--reduced", reduced, "emit the reduced invariant set of the split");
    plot->add_option("--plane-i", plane_i, "first projection coordinate");
    plot->add_option("--plane-j", plane_j, "second projection coordinate");
    plot->add_option("--samples", samples, "polyline sample count");
    plot->add_option("--out", out_path, "output path (default: stdout)");
    ov.add_flags(plot);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (compute->parsed()) return cmd_compute(problem_path, ov, out_path);
        if (schur->parsed()) return cmd_schur(problem_path, ov, out_path);
        if (oracle->parsed()) return cmd_oracle(problem_path, ov, out_path);
        if (bench->parsed()) {
            return cmd_bench_cse(lmin, lmax, qw, rw, k_max, no_oracle, kc_variant, out_path);
        }
        if (plot->parsed()) {
            return cmd_emit_plot(problem_path, ov, reduced, plane_i, plane_j, samples, out_path);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
