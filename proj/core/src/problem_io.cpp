#include "invset/problem_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "invset/linprog.hpp"

namespace invset {

namespace {

using nlohmann::json;

std::string double_to_string(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double string_to_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        fail(ErrorCode::IoError, "cannot parse number '" + s + "'");
    }
    return v;
}

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(double_to_string(M(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(double_to_string(v(i)));
    return arr;
}

double number_from(const json& j, const char* what) {
    if (j.is_string()) return string_to_double(j.get<std::string>());
    if (j.is_number()) return j.get<double>();
    fail(ErrorCode::IoError, std::string(what) + ": expected a number or decimal string");
}

Matrix matrix_from_json(const json& j, const char* what) {
    if (!j.is_array()) fail(ErrorCode::IoError, std::string(what) + ": expected a matrix");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = 0;
    if (rows > 0) {
        if (!j[0].is_array()) {
            fail(ErrorCode::IoError, std::string(what) + ": expected nested arrays");
        }
        cols = static_cast<Eigen::Index>(j[0].size());
    }
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[static_cast<size_t>(i)].size()) != cols) {
            fail(ErrorCode::IoError, std::string(what) + ": ragged matrix rows");
        }
        for (Eigen::Index k = 0; k < cols; ++k) {
            M(i, k) = number_from(j[static_cast<size_t>(i)][static_cast<size_t>(k)], what);
        }
    }
    return M;
}

Vector vector_from_json(const json& j, const char* what) {
    if (!j.is_array()) fail(ErrorCode::IoError, std::string(what) + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        v(i) = number_from(j[static_cast<size_t>(i)], what);
    }
    return v;
}

SetSpec set_spec_from_json(const json& j, const char* what) {
    SetSpec s;
    if (j.contains("box")) {
        s.kind = SetSpec::Kind::Box;
        s.box_radii = vector_from_json(j.at("box"), what);
        return s;
    }
    if (j.contains("F") && j.contains("theta")) {
        s.kind = SetSpec::Kind::HRep;
        s.F = matrix_from_json(j.at("F"), what);
        s.theta = vector_from_json(j.at("theta"), what);
        return s;
    }
    if (j.contains("cz")) {
        const json& z = j.at("cz");
        s.kind = SetSpec::Kind::CZ;
        s.c = vector_from_json(z.at("c"), what);
        s.G = matrix_from_json(z.at("G"), what);
        if (z.contains("F_eq")) {
            s.F_eq = matrix_from_json(z.at("F_eq"), what);
            s.theta_eq = vector_from_json(z.at("theta_eq"), what);
        } else {
            s.F_eq = Matrix(0, s.G.cols());
            s.theta_eq = Vector(0);
        }
        return s;
    }
    fail(ErrorCode::IoError,
         std::string(what) + ": expected one of {box, F/theta, cz} set descriptions");
}

json set_spec_to_json(const SetSpec& s) {
    json j;
    switch (s.kind) {
        case SetSpec::Kind::Box:
            j["box"] = vector_to_json(s.box_radii);
            break;
        case SetSpec::Kind::HRep:
            j["F"] = matrix_to_json(s.F);
            j["theta"] = vector_to_json(s.theta);
            break;
        case SetSpec::Kind::CZ: {
            json z;
            z["c"] = vector_to_json(s.c);
            z["G"] = matrix_to_json(s.G);
            if (s.F_eq.rows() > 0) {
                z["F_eq"] = matrix_to_json(s.F_eq);
                z["theta_eq"] = vector_to_json(s.theta_eq);
            }
            j["cz"] = std::move(z);
            break;
        }
    }
    return j;
}

}  // namespace

ConstraintSet SetSpec::to_constraint_set() const {
    switch (kind) {
        case Kind::Box:
            return ConstraintSet::box(box_radii);
        case Kind::HRep:
            return ConstraintSet::from_h(HPolyhedron(F, theta));
        case Kind::CZ:
            return ConstraintSet::from_cz(ConstrainedZonotope(c, G, F_eq, theta_eq));
    }
    fail(ErrorCode::InvalidParams, "SetSpec: unknown kind");
}

ProblemFile parse_problem_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        fail(ErrorCode::IoError, std::string("problem file is not valid JSON: ") + e.what());
    }
    try {
        if (j.value("schema", 0) != 1) {
            fail(ErrorCode::IoError, "unsupported problem schema (expected \"schema\": 1)");
        }
        ProblemFile pf;
        pf.A = matrix_from_json(j.at("A"), "A");
        pf.B = matrix_from_json(j.at("B"), "B");

        const json& g = j.at("gain");
        if (g.contains("literal")) {
            pf.gain.literal = matrix_from_json(g.at("literal"), "gain.literal");
        } else if (g.contains("dare")) {
            DareSpec spec;
            spec.Q = matrix_from_json(g.at("dare").at("Q"), "gain.dare.Q");
            spec.R = matrix_from_json(g.at("dare").at("R"), "gain.dare.R");
            pf.gain.dare = std::move(spec);
        } else {
            fail(ErrorCode::IoError, "gain: expected literal or dare");
        }

        pf.X = set_spec_from_json(j.at("X"), "X");
        pf.U = set_spec_from_json(j.at("U"), "U");

        const std::string backend = j.value("backend", std::string("hpoly"));
        if (backend == "hpoly") pf.backend = Backend::HPoly;
        else if (backend == "czono") pf.backend = Backend::CZono;
        else fail(ErrorCode::IoError, "backend must be 'hpoly' or 'czono'");

        pf.opts.sign_convention = j.value("sign_convention", 1);
        if (pf.opts.sign_convention != 1 && pf.opts.sign_convention != -1) {
            fail(ErrorCode::IoError, "sign_convention must be +1 or -1");
        }
        if (j.contains("opts")) {
            const json& o = j.at("opts");
            pf.opts.eps_zero = o.value("eps_zero", pf.opts.eps_zero);
            pf.opts.tol_nil = o.value("tol_nil", pf.opts.tol_nil);
            pf.opts.tol_feas = o.value("tol_feas", pf.opts.tol_feas);
            pf.opts.k_max = o.value("k_max", pf.opts.k_max);
            pf.opts.p_offset = o.value("p_offset", pf.opts.p_offset);
        }

        // dimensional consistency up front
        LTISystem sys{pf.A, pf.B, std::nullopt};
        sys.validate();
        if (pf.gain.literal) {
            if (pf.gain.literal->rows() != pf.B.cols() || pf.gain.literal->cols() != pf.A.rows()) {
                fail(ErrorCode::IoError, "gain.literal must be m x n");
            }
        }
        if (pf.X.to_constraint_set().dim() != pf.A.rows()) {
            fail(ErrorCode::IoError, "X dimension does not match A");
        }
        if (pf.U.to_constraint_set().dim() != pf.B.cols()) {
            fail(ErrorCode::IoError, "U dimension does not match B");
        }
        return pf;
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(ErrorCode::IoError, std::string("malformed problem file: ") + e.what());
    }
}

std::string problem_to_json(const ProblemFile& pf) {
    json j;
    j["schema"] = 1;
    j["A"] = matrix_to_json(pf.A);
    j["B"] = matrix_to_json(pf.B);
    json g;
    if (pf.gain.literal) {
        g["literal"] = matrix_to_json(*pf.gain.literal);
    } else if (pf.gain.dare) {
        g["dare"] = json{{"Q", matrix_to_json(pf.gain.dare->Q)},
                         {"R", matrix_to_json(pf.gain.dare->R)}};
    }
    j["gain"] = std::move(g);
    j["X"] = set_spec_to_json(pf.X);
    j["U"] = set_spec_to_json(pf.U);
    j["backend"] = pf.backend == Backend::HPoly ? "hpoly" : "czono";
    j["sign_convention"] = pf.opts.sign_convention;
    j["opts"] = json{{"eps_zero", pf.opts.eps_zero},
                     {"tol_nil", pf.opts.tol_nil},
                     {"tol_feas", pf.opts.tol_feas},
                     {"k_max", pf.opts.k_max},
                     {"p_offset", pf.opts.p_offset}};
    return j.dump(2);
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open problem file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem_json(ss.str());
}

void save_problem(const std::string& path, const ProblemFile& pf) {
    std::ofstream out(path);
    if (!out) fail(ErrorCode::IoError, "cannot write problem file: " + path);
    out << problem_to_json(pf) << "\n";
}

Matrix resolve_gain(const ProblemFile& pf) {
    if (pf.gain.literal) return *pf.gain.literal;
    if (pf.gain.dare) return dare_gain(pf.A, pf.B, *pf.gain.dare).K;
    fail(ErrorCode::InvalidParams, "problem file has no gain specification");
}

MPIResult run_problem(const ProblemFile& pf) {
    const Matrix K = resolve_gain(pf);
    return mpi_compute(pf.A, pf.B, K, pf.X.to_constraint_set(), pf.U.to_constraint_set(),
                       pf.backend, pf.opts);
}

std::string result_to_json(const MPIResult& result) {
    json j;
    j["schema"] = 1;
    j["branch"] = result.branch == Branch::Standard ? "standard" : "singular";
    j["k_bar"] = result.k_bar;
    j["wall_time_ms"] = result.wall_seconds * 1000.0;
    if (result.is_hpoly()) {
        const HPolyhedron& P = result.hpoly();
        j["q_bar"] = P.rows();
        j["set"] = json{{"F", matrix_to_json(P.F())}, {"theta", vector_to_json(P.theta())}};
    } else {
        const ConstrainedZonotope& Z = result.czono();
        j["D"] = Z.generators();
        j["n_c"] = Z.constraints();
        j["set"] = json{{"c", vector_to_json(Z.center())},
                        {"G", matrix_to_json(Z.G())},
                        {"F_eq", matrix_to_json(Z.F_eq())},
                        {"theta_eq", vector_to_json(Z.theta_eq())}};
    }
    return j.dump(2);
}

std::vector<CseSweepRow> run_cse_sweep(int ell_min, int ell_max, double q_scale, double r_scale,
                                       const MpiOptions& opts, bool include_oracle,
                                       bool conventional_stiffness) {
    if (ell_min < 2 || ell_max < ell_min) {
        fail(ErrorCode::InvalidParams, "run_cse_sweep: need 2 <= ell_min <= ell_max");
    }
    std::vector<CseSweepRow> rows;
    for (int ell = ell_min; ell <= ell_max; ++ell) {
        CSEParams params;
        params.ell = ell;
        params.conventional_stiffness = conventional_stiffness;
        const LTISystem sys = cse_generate(params);
        const Eigen::Index n = sys.state_dim();

        DareSpec spec;
        spec.Q = q_scale * Matrix::Identity(n, n);
        spec.R = r_scale * Matrix::Identity(2, 2);
        const Matrix K = dare_gain(sys.A, sys.B, spec).K;

        const ConstraintSet X = ConstraintSet::box(Vector::Ones(n));
        const ConstraintSet U = ConstraintSet::box(Vector::Ones(2));
        MpiOptions o = opts;
        o.sign_convention = +1;
        const MPIResult res = mpi_compute(sys.A, sys.B, K, X, U, Backend::HPoly, o);
        rows.push_back({ell, res.branch == Branch::Singular ? "singular" : "standard",
                        res.k_bar, res.q_bar(), res.wall_seconds * 1000.0});

        if (include_oracle) {
            const Matrix A_cl = sys.A + sys.B * K;
            const HPolyhedron Xbar =
                closed_loop_constraints_h(X.require_h(), U.require_h(), K);
            const MPIResult oracle = mpi_oracle_forward(A_cl, Xbar, o.k_max, o.tol_feas);
            rows.push_back(
                {ell, "oracle", oracle.k_bar, oracle.q_bar(), oracle.wall_seconds * 1000.0});
        }
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<CseSweepRow>& rows) {
    std::ostringstream out;
    out << "l,branch,k_bar,q_bar,wall_ms\n";
    for (const auto& r : rows) {
        out << r.ell << "," << r.branch << "," << r.k_bar << "," << r.q_bar << ","
            << double_to_string(r.wall_ms) << "\n";
    }
    return out.str();
}

std::string plot_data_csv(const HPolyhedron& P, int plane_i, int plane_j, int samples) {
    std::ostringstream out;
    const Eigen::Index n = P.dim();
    if (n <= 3) {
        const auto verts = vertices_lowdim(P);
        if (n == 1) out << "x\n";
        else if (n == 2) out << "x,y\n";
        else out << "x,y,z\n";
        for (const auto& v : verts) {
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                if (i > 0) out << ",";
                out << double_to_string(v(i));
            }
            out << "\n";
        }
        return out.str();
    }
    if (plane_i < 0 || plane_j < 0 || plane_i >= n || plane_j >= n || plane_i == plane_j) {
        fail(ErrorCode::InvalidParams, "plot_data_csv: bad projection plane");
    }
    if (samples < 3) fail(ErrorCode::InvalidParams, "plot_data_csv: need at least 3 samples");
    // boundary of the projection onto the (i, j) plane via support maximizers
    out << "phi,x,y\n";
    for (int s = 0; s < samples; ++s) {
        const double phi = 2.0 * M_PI * static_cast<double>(s) / static_cast<double>(samples);
        Vector d = Vector::Zero(n);
        d(plane_i) = std::cos(phi);
        d(plane_j) = std::sin(phi);
        const auto [value, x] = support_hpoly_point(P, d);
        (void)value;
        out << double_to_string(phi) << "," << double_to_string(x(plane_i)) << ","
            << double_to_string(x(plane_j)) << "\n";
    }
    return out.str();
}

}  // namespace invset
