#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sid/plant.hpp"
#include "test_support.hpp"

using namespace sid;
using doctest::Approx;

TEST_CASE("ball_beam matches the published plant") {
    const StateSpaceModel m = ball_beam();
    CHECK(m.A == (Matrix{{2.0, -1.0}, {1.0, 0.0}}));
    CHECK(m.B == (Matrix{{1.0}, {0.0}}));
    CHECK(m.C == Matrix{{0.00014, 0.00014}});
    CHECK(m.D == Matrix{{0.0}});

    // trace 2, determinant 1 => double eigenvalue at 1
    CHECK(m.A(0, 0) + m.A(1, 1) == 2.0);
    CHECK(m.A(0, 0) * m.A(1, 1) - m.A(0, 1) * m.A(1, 0) == 1.0);
    const auto eigs = m.A.eigen().eigenvalues();
    CHECK(std::abs(eigs(0) - 1.0) < 1e-7);
    CHECK(std::abs(eigs(1) - 1.0) < 1e-7);

    // CB = 0.00014
    CHECK((m.C.eigen() * m.B.eigen())(0, 0) == Approx(0.00014).epsilon(1e-12));
}

TEST_CASE("simulate: zero input, zero state gives zero output") {
    const IoRecord rec = simulate(ball_beam(), Matrix(16, 1));
    CHECK(rec.y == Matrix(16, 1));
}

TEST_CASE("simulate: ball-beam impulse response") {
    Matrix u(8, 1);
    u(0, 0) = 1.0;
    const IoRecord rec = simulate(ball_beam(), u);
    // D, CB, CAB of the plant
    CHECK(rec.y(0, 0) == 0.0);
    CHECK(rec.y(1, 0) == Approx(0.00014).epsilon(1e-12));
    CHECK(rec.y(2, 0) == Approx(0.00042).epsilon(1e-12));
}

TEST_CASE("simulate: scalar model step response is the geometric recurrence") {
    StateSpaceModel m;
    m.A = Matrix{{0.5}};
    m.B = Matrix{{1.0}};
    m.C = Matrix{{1.0}};
    m.D = Matrix{{0.0}};
    Matrix u(5, 1);
    for (Index k = 0; k < 5; ++k) u(k, 0) = 1.0;
    const IoRecord rec = simulate(m, u);
    const double expected[] = {0.0, 1.0, 1.5, 1.75, 1.875};
    for (Index k = 0; k < 5; ++k) CHECK(rec.y(k, 0) == Approx(expected[k]).epsilon(1e-15));
}

TEST_CASE("simulate: dimension mismatches are rejected") {
    CHECK_THROWS_AS(simulate(ball_beam(), Matrix(4, 2)), DimensionMismatch);
    CHECK_THROWS_AS(simulate(ball_beam(), Matrix(4, 1), {1.0}), DimensionMismatch);
    StateSpaceModel bad = ball_beam();
    bad.C = Matrix(1, 3);
    CHECK_THROWS_AS(simulate(bad, Matrix(4, 1)), DimensionMismatch);
}

TEST_CASE("simulate: linearity in the input") {
    const StateSpaceModel m = test::random_stable_model(3, 2, 2, 99);
    const Matrix u1 = test::random_matrix(20, 2, 1);
    const Matrix u2 = test::random_matrix(20, 2, 2);
    const double alpha = 1.7;
    const double beta = -0.4;
    const Matrix mixed = Matrix::from(alpha * u1.eigen() + beta * u2.eigen());
    const auto y_mixed = simulate(m, mixed).y;
    const auto y_expected =
        alpha * simulate(m, u1).y.eigen() + beta * simulate(m, u2).y.eigen();
    CHECK((y_mixed.eigen() - y_expected).norm() <= 1e-12 * y_expected.norm());
}

TEST_CASE("simulate: impulse response equals the Markov parameters") {
    const StateSpaceModel m = test::random_stable_model(4, 1, 2, 123);
    Matrix u(10, 1);
    u(0, 0) = 1.0;
    const IoRecord rec = simulate(m, u);
    const auto markov = markov_parameters(m, 10);
    for (Index k = 0; k < 10; ++k) {
        for (Index c = 0; c < 2; ++c) {
            CHECK(rec.y(k, c) == Approx(markov[static_cast<std::size_t>(k)](c, 0)).epsilon(1e-13));
        }
    }
}

TEST_CASE("gen_excitation: deterministic, seed-sensitive, white") {
    CHECK(gen_excitation(64, 2, 7) == gen_excitation(64, 2, 7));
    CHECK(gen_excitation(64, 2, 7) != gen_excitation(64, 2, 8));

    const Matrix u = gen_excitation(100000, 1, 1234);
    const double mean = u.eigen().mean();
    const double var = (u.eigen().array() - mean).square().sum() / (u.size() - 1);
    CHECK(std::abs(mean) < 0.02);
    CHECK(std::abs(var - 1.0) < 0.05);

    CHECK_THROWS_AS(gen_excitation(0, 1, 1), InvalidShape);
}

TEST_CASE("csv: full-precision round trip") {
    const StateSpaceModel m = test::random_stable_model(2, 2, 1, 55);
    const IoRecord rec = simulate(m, test::random_matrix(30, 2, 77));

    std::stringstream ss;
    write_csv(ss, rec);
    const std::string text = ss.str();
    CHECK(text.starts_with("u1,u2,y1\n"));

    std::stringstream in(text);
    const IoRecord back = read_csv(in);
    CHECK(back.u == rec.u);
    CHECK(back.y == rec.y);
}

TEST_CASE("csv: malformed input is rejected with context") {
    std::stringstream bad_header("a1,b1\n1,2\n");
    CHECK_THROWS_AS(read_csv(bad_header), SerializationError);
    std::stringstream bad_value("u1,y1\n1,two\n");
    CHECK_THROWS_AS(read_csv(bad_value), SerializationError);
    std::stringstream bad_count("u1,y1\n1,2,3\n");
    CHECK_THROWS_AS(read_csv(bad_count), SerializationError);
}
