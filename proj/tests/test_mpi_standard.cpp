#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "invset/linprog.hpp"
#include "invset/mpi_set.hpp"
#include "testutil.hpp"

using namespace invset;

namespace {

HPolyhedron lti2d_xbar(const Matrix& K_cl) {
    return closed_loop_constraints_h(HPolyhedron::box(2, 1.0), HPolyhedron::box(1, 1.0), K_cl);
}

// sample a point inside a bounded polytope containing 0: walk a random ray
// to the boundary and back off by a random fraction
Vector sample_inside(std::mt19937_64& rng, const HPolyhedron& P) {
    const Vector d = testutil::random_unit(rng, P.dim());
    double tmax = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < P.rows(); ++i) {
        const double fd = P.F().row(i).dot(d);
        if (fd > 1e-12) tmax = std::min(tmax, P.theta()(i) / fd);
    }
    REQUIRE(std::isfinite(tmax));
    return testutil::uniform(rng, 0.0, 0.999) * tmax * d;
}

}  // namespace

TEST_CASE("2D benchmark, Riccati-style gain: poles and k_bar = 3") {
    const Matrix K = testutil::lti2d_K_riccati();
    const Matrix A_cl = testutil::lti2d_A() - testutil::lti2d_B() * K;

    std::vector<double> mags;
    for (const auto& e : eigenvalues(A_cl)) mags.push_back(std::abs(e));
    std::sort(mags.begin(), mags.end());
    CHECK(std::abs(mags[0] - 0.48) <= 0.02);
    CHECK(std::abs(mags[1] - 0.83) <= 0.02);

    const auto res = mpi_standard_h(A_cl, lti2d_xbar(-K), MpiOptions{});
    CHECK(res.k_bar == 3);
    CHECK(res.branch == Branch::Standard);
    CHECK(res.q_bar() == 8);
}

TEST_CASE("2D benchmark, placement gain: poles and k_bar = 7") {
    const Matrix K = testutil::lti2d_K_placement();
    const Matrix A_cl = testutil::lti2d_A() - testutil::lti2d_B() * K;

    std::vector<double> mags;
    for (const auto& e : eigenvalues(A_cl)) mags.push_back(std::abs(e));
    std::sort(mags.begin(), mags.end());
    CHECK(std::abs(mags[0] - 0.7) <= 0.02);
    CHECK(std::abs(mags[1] - 0.95) <= 0.02);

    const auto res = mpi_standard_h(A_cl, lti2d_xbar(-K), MpiOptions{});
    CHECK(res.k_bar == 7);
}

TEST_CASE("termination convention: Omega_3 equals Omega_4 on the Riccati run") {
    const Matrix K = testutil::lti2d_K_riccati();
    const Matrix A_cl = testutil::lti2d_A() - testutil::lti2d_B() * K;
    const auto Xbar = lti2d_xbar(-K);

    auto omega = remove_redundant(Xbar);
    std::vector<HPolyhedron> iterates{omega};
    for (int k = 1; k <= 4; ++k) {
        const HPolyhedron pre(omega.F() * A_cl, omega.theta());
        omega = remove_redundant(intersect_h(pre, Xbar));
        iterates.push_back(omega);
    }
    CHECK_FALSE(equals_h(iterates[2], iterates[3]));
    CHECK(equals_h(iterates[3], iterates[4]));
}

TEST_CASE("contractive dynamics with an invariant box stop immediately") {
    const Matrix A_cl = 0.3 * Matrix::Identity(2, 2);
    const auto res = mpi_standard_h(A_cl, HPolyhedron::box(2, 1.0), MpiOptions{});
    CHECK(res.k_bar == 0);
    CHECK(equals_h(res.hpoly(), HPolyhedron::box(2, 1.0)));
}

TEST_CASE("standard recurrence refuses singular dynamics") {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 0) = 0.5;
    CHECK_THROWS_AS(mpi_standard_h(A, HPolyhedron::box(2, 1.0), MpiOptions{}), Error);
}

TEST_CASE("iteration cap raises a structured error") {
    // marginally stable rotation never reaches a fixed point
    Matrix A(2, 2);
    const double c = std::cos(0.7), s = std::sin(0.7);
    A << c, -s, s, c;
    MpiOptions opts;
    opts.k_max = 5;
    bool hit = false;
    try {
        mpi_standard_h(A, HPolyhedron::box(Vector((Eigen::Vector2d() << 1.0, 2.0).finished())),
                       opts);
    } catch (const Error& e) {
        hit = e.code() == ErrorCode::IterationCapExceeded;
    }
    CHECK(hit);
}

TEST_CASE("forward oracle agrees with the recurrence on the 2D benchmark") {
    const Matrix K = testutil::lti2d_K_riccati();
    const Matrix A_cl = testutil::lti2d_A() - testutil::lti2d_B() * K;
    const auto Xbar = lti2d_xbar(-K);
    const auto rec = mpi_standard_h(A_cl, Xbar, MpiOptions{});
    const auto oracle = mpi_oracle_forward(A_cl, Xbar);
    CHECK(oracle.k_bar == rec.k_bar);
    CHECK(equals_h(rec.hpoly(), oracle.hpoly(), 1e-6));
}

TEST_CASE("forward oracle terminates by the nilpotency degree on dead-beat dynamics") {
    Matrix A = Matrix::Zero(2, 2);
    A(0, 1) = 1.0;  // A^2 = 0
    const auto res = mpi_oracle_forward(A, HPolyhedron::box(2, 1.0));
    CHECK(res.k_bar <= 2);
    // the set is { |x| <= 1, |x2| <= 1 } = the box itself here
    CHECK(contains_h(HPolyhedron::box(2, 1.0), res.hpoly()));
}

TEST_CASE("constrained-zonotope backend matches H-rep on the 2D benchmark") {
    const Matrix K = testutil::lti2d_K_riccati();
    const Matrix K_cl = -K;
    const Matrix A_cl = testutil::lti2d_A() + testutil::lti2d_B() * K_cl;
    const auto Xbar_h = lti2d_xbar(K_cl);
    const auto Xbar_cz = closed_loop_constraints_cz(ConstrainedZonotope::box(2, 1.0),
                                                    ConstrainedZonotope::box(1, 1.0), K_cl);
    const auto res_h = mpi_standard_h(A_cl, Xbar_h, MpiOptions{});
    const auto res_cz = mpi_standard_cz(A_cl, Xbar_cz, Xbar_h, MpiOptions{});
    CHECK(res_cz.k_bar == res_h.k_bar);

    auto rng = testutil::make_rng(51);
    for (int t = 0; t < 100; ++t) {
        const Vector d = testutil::random_unit(rng, 2);
        CHECK(support_cz(res_cz.czono(), d) ==
              doctest::Approx(support_hpoly(res_h.hpoly(), d)).epsilon(1e-6));
    }
}

TEST_CASE("backends agree on random stable 3D systems") {
    auto rng = testutil::make_rng(52);
    for (int t = 0; t < 3; ++t) {
        const Matrix A = testutil::random_stable(rng, 3, 0.5, 0.95);
        Vector radii(3);
        radii << 1.0, testutil::uniform(rng, 0.8, 1.5), testutil::uniform(rng, 0.8, 1.5);
        const auto Xbar_h = HPolyhedron::box(radii);
        const auto Xbar_cz = ConstrainedZonotope::box(radii);
        const auto res_h = mpi_standard_h(A, Xbar_h, MpiOptions{});
        const auto res_cz = mpi_standard_cz(A, Xbar_cz, Xbar_h, MpiOptions{});
        CHECK(res_cz.k_bar == res_h.k_bar);
        for (int s = 0; s < 40; ++s) {
            const Vector d = testutil::random_unit(rng, 3);
            CHECK(support_cz(res_cz.czono(), d) ==
                  doctest::Approx(support_hpoly(res_h.hpoly(), d)).epsilon(1e-6));
        }
    }
}

TEST_CASE("positive invariance and admissibility of the computed set") {
    const Matrix K = testutil::lti2d_K_placement();
    const Matrix A_cl = testutil::lti2d_A() - testutil::lti2d_B() * K;
    const auto Xbar = lti2d_xbar(-K);
    const auto res = mpi_standard_h(A_cl, Xbar, MpiOptions{});

    auto rng = testutil::make_rng(53);
    for (int t = 0; t < 1000; ++t) {
        const Vector x = sample_inside(rng, res.hpoly());
        REQUIRE(res.hpoly().contains_point(x, 1e-7));
        CHECK(res.hpoly().contains_point(A_cl * x, 1e-7));
        CHECK(Xbar.contains_point(x, 1e-7));
    }
}

TEST_CASE("mpi_compute dispatches the standard branch with the sign convention") {
    MpiOptions opts;
    opts.sign_convention = -1;
    const auto res = mpi_compute(testutil::lti2d_A(), testutil::lti2d_B(),
                                 testutil::lti2d_K_riccati(), ConstraintSet::box(Vector::Ones(2)),
                                 ConstraintSet::box(Vector::Ones(1)), Backend::HPoly, opts);
    CHECK(res.branch == Branch::Standard);
    CHECK(res.k_bar == 3);
}

TEST_CASE("constraint-set validation rejects unbounded or off-center sets") {
    const Matrix A = 0.5 * Matrix::Identity(2, 2);
    Matrix F(1, 2);
    F << 1.0, 0.0;
    CHECK_THROWS_AS(mpi_standard_h(A, HPolyhedron(F, Vector::Ones(1)), MpiOptions{}), Error);

    Matrix Fb(4, 2);
    Fb << 1, 0, -1, 0, 0, 1, 0, -1;
    Vector tb(4);
    tb << 1.0, -0.5, 1.0, 1.0;  // x1 >= 0.5: origin outside
    CHECK_THROWS_AS(mpi_standard_h(A, HPolyhedron(Fb, tb), MpiOptions{}), Error);
}
