#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "invset/linprog.hpp"
#include "invset/problem_io.hpp"
#include "testutil.hpp"

using namespace invset;

namespace {

std::string lti2d_problem_json(const char* gain, const char* backend) {
    std::string s = R"({
  "schema": 1,
  "A": [["1.38", "0.76"], ["0.16", "1.87"]],
  "B": [["1"], ["1"]],
  "gain": {"literal": [)" + std::string(gain) + R"(]},
  "sign_convention": -1,
  "X": {"box": ["1", "1"]},
  "U": {"box": ["1"]},
  "backend": ")" + backend + R"(",
  "opts": {"k_max": 200}
})";
    return s;
}

}  // namespace

TEST_CASE("parsing and exact save/load round trip") {
    const auto pf = parse_problem_json(lti2d_problem_json(R"(["2.73", "-0.80"])", "hpoly"));
    CHECK(pf.A(0, 0) == 1.38);
    CHECK(pf.backend == Backend::HPoly);
    CHECK(pf.opts.sign_convention == -1);
    CHECK(pf.opts.k_max == 200);
    CHECK(pf.opts.eps_zero == 1e-9);  // default preserved

    const std::string dumped = problem_to_json(pf);
    const auto pf2 = parse_problem_json(dumped);
    CHECK(pf2.A == pf.A);
    CHECK(pf2.B == pf.B);
    CHECK(*pf2.gain.literal == *pf.gain.literal);
    CHECK(pf2.X.box_radii == pf.X.box_radii);
    CHECK(problem_to_json(pf2) == dumped);  // fixed point of the round trip
}

TEST_CASE("round trip is bit-exact for awkward doubles") {
    ProblemFile pf;
    pf.A = Matrix(1, 1);
    pf.A << 0.1 + 0.2;  // 0.30000000000000004
    pf.B = Matrix(1, 1);
    pf.B << 1.0 / 3.0;
    pf.gain.literal = Matrix::Constant(1, 1, -1e-17);
    pf.X.kind = SetSpec::Kind::Box;
    pf.X.box_radii = Vector::Constant(1, M_PI);
    pf.U.kind = SetSpec::Kind::Box;
    pf.U.box_radii = Vector::Constant(1, 1.0);
    const auto pf2 = parse_problem_json(problem_to_json(pf));
    CHECK(pf2.A(0, 0) == pf.A(0, 0));
    CHECK(pf2.B(0, 0) == pf.B(0, 0));
    CHECK((*pf2.gain.literal)(0, 0) == (*pf.gain.literal)(0, 0));
    CHECK(pf2.X.box_radii(0) == pf.X.box_radii(0));
}

TEST_CASE("run_problem reproduces the benchmark iteration counts") {
    const auto ric = parse_problem_json(lti2d_problem_json(R"(["2.73", "-0.80"])", "hpoly"));
    const auto res = run_problem(ric);
    CHECK(res.k_bar == 3);
    CHECK(res.branch == Branch::Standard);

    const auto place = parse_problem_json(lti2d_problem_json(R"(["1.43", "0.16"])", "hpoly"));
    CHECK(run_problem(place).k_bar == 7);
}

TEST_CASE("determinism: identical runs produce identical sets") {
    const auto pf = parse_problem_json(lti2d_problem_json(R"(["2.73", "-0.80"])", "hpoly"));
    const auto r1 = run_problem(pf);
    const auto r2 = run_problem(pf);
    CHECK(r1.k_bar == r2.k_bar);
    CHECK(r1.hpoly().F() == r2.hpoly().F());
    CHECK(r1.hpoly().theta() == r2.hpoly().theta());
}

TEST_CASE("czono backend through the problem file") {
    const auto pf = parse_problem_json(lti2d_problem_json(R"(["2.73", "-0.80"])", "czono"));
    const auto res = run_problem(pf);
    CHECK(res.k_bar == 3);
    CHECK_FALSE(res.is_hpoly());
    const std::string out = result_to_json(res);
    CHECK(out.find("\"D\"") != std::string::npos);
    CHECK(out.find("\"n_c\"") != std::string::npos);
}

TEST_CASE("result json carries the H-rep payload") {
    const auto pf = parse_problem_json(lti2d_problem_json(R"(["2.73", "-0.80"])", "hpoly"));
    const std::string out = result_to_json(run_problem(pf));
    CHECK(out.find("\"q_bar\": 8") != std::string::npos);
    CHECK(out.find("\"branch\": \"standard\"") != std::string::npos);
    CHECK(out.find("\"k_bar\": 3") != std::string::npos);
}

TEST_CASE("gain synthesis through the problem file") {
    std::string s = R"({
  "schema": 1,
  "A": [["1.38", "0.76"], ["0.16", "1.87"]],
  "B": [["1"], ["1"]],
  "gain": {"dare": {"Q": [["1", "0"], ["0", "1"]], "R": [["1"]]}},
  "X": {"box": ["1", "1"]},
  "U": {"box": ["1"]},
  "backend": "hpoly"
})";
    const auto pf = parse_problem_json(s);
    const Matrix K = resolve_gain(pf);
    CHECK(spectral_radius(pf.A + pf.B * K) < 1.0);
    const auto res = run_problem(pf);
    CHECK(res.k_bar >= 1);
}

TEST_CASE("malformed inputs raise IoError") {
    CHECK_THROWS_AS(parse_problem_json("{not json"), Error);
    CHECK_THROWS_AS(parse_problem_json(R"({"schema": 2})"), Error);
    // ragged matrix
    CHECK_THROWS_AS(parse_problem_json(R"({
      "schema": 1, "A": [["1", "2"], ["3"]], "B": [["1"], ["1"]],
      "gain": {"literal": [["1", "1"]]},
      "X": {"box": ["1", "1"]}, "U": {"box": ["1"]}})"),
                    Error);
    // dimension mismatch between X and A
    CHECK_THROWS_AS(parse_problem_json(R"({
      "schema": 1, "A": [["0.5", "0"], ["0", "0.5"]], "B": [["1"], ["1"]],
      "gain": {"literal": [["0", "0"]]},
      "X": {"box": ["1", "1", "1"]}, "U": {"box": ["1"]}})"),
                    Error);
}

TEST_CASE("file round trip through disk") {
    const auto pf = parse_problem_json(lti2d_problem_json(R"(["2.73", "-0.80"])", "hpoly"));
    const std::string path = "io_roundtrip_tmp.json";
    save_problem(path, pf);
    const auto pf2 = load_problem(path);
    CHECK(pf2.A == pf.A);
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_problem("does_not_exist.json"), Error);
}

TEST_CASE("sweep CSV schema") {
    MpiOptions opts;
    const auto rows = run_cse_sweep(2, 3, 1.0, 1.0, opts, true);
    REQUIRE(rows.size() == 4);  // two ells x (dispatched + oracle)
    CHECK(rows[0].ell == 2);
    CHECK(rows[0].branch == "standard");
    CHECK(rows[1].branch == "oracle");
    CHECK(rows[0].k_bar == rows[1].k_bar);  // same instance, same fixed point
    const std::string csv = sweep_to_csv(rows);
    CHECK(csv.rfind("l,branch,k_bar,q_bar,wall_ms\n", 0) == 0);
}

TEST_CASE("plot data: vertices for low dimension, polyline above") {
    const auto square = HPolyhedron::box(2, 1.0);
    const std::string verts = plot_data_csv(square);
    CHECK(verts.rfind("x,y\n", 0) == 0);
    int lines = 0;
    for (char c : verts) lines += c == '\n' ? 1 : 0;
    CHECK(lines == 5);  // header + 4 vertices

    const auto box4 = HPolyhedron::box(4, 1.0);
    const std::string poly = plot_data_csv(box4, 0, 1, 16);
    CHECK(poly.rfind("phi,x,y\n", 0) == 0);
}
