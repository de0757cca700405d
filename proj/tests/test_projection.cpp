#include <doctest.h>

#include "sid/projection.hpp"
#include "test_support.hpp"

using namespace sid;

namespace {

double rel_err(const Matrix& got, const Eigen::MatrixXd& want) {
    const double base = want.norm();
    const double diff = (got.eigen() - want).norm();
    return base > 0.0 ? diff / base : diff;
}

}  // namespace

TEST_CASE("pinv: identity and diagonal cases") {
    CHECK((pinv(Matrix::identity(3)).eigen() - Eigen::MatrixXd::Identity(3, 3)).norm() < 1e-12);
    const Matrix diag{{2.0, 0.0}, {0.0, 0.0}};
    const Matrix p = pinv(diag);
    CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p(0, 1) == 0.0);
    CHECK(p(1, 0) == 0.0);
    CHECK(p(1, 1) == 0.0);
}

TEST_CASE("pinv: full-row-rank matrix gives a right inverse") {
    const Matrix m = test::random_matrix(5, 8, 42);
    const Eigen::MatrixXd prod = m.eigen() * pinv(m).eigen();
    CHECK((prod - Eigen::MatrixXd::Identity(5, 5)).norm() < 1e-10);
}

TEST_CASE("pinv satisfies the four Penrose identities") {
    for (std::uint32_t seed : {1u, 2u, 3u}) {
        const Matrix a = test::random_matrix(6, 9, seed);
        const Eigen::MatrixXd p = pinv(a).eigen();
        const Eigen::MatrixXd& ae = a.eigen();
        const double scale = ae.norm();
        CHECK((ae * p * ae - ae).norm() < 1e-10 * scale);
        CHECK((p * ae * p - p).norm() < 1e-10 * p.norm());
        CHECK((ae * p - (ae * p).transpose()).norm() < 1e-10);
        CHECK((p * ae - (p * ae).transpose()).norm() < 1e-10);
    }
}

TEST_CASE("pinv matches the independent oracle on rank-deficient input") {
    const Matrix m = test::random_low_rank(6, 10, 3, 5);
    CHECK(rel_err(pinv(m), test::oracle_pinv(m.eigen())) < 1e-9);
}

TEST_CASE("orth_project: self, orthogonal and oracle cases") {
    const Matrix b = test::random_matrix(4, 20, 7);
    CHECK(rel_err(orth_project(b, b), b.eigen()) < 1e-10);

    const Matrix ea{{1.0, 0.0}};
    const Matrix eb{{0.0, 1.0}};
    CHECK(orth_project(ea, eb).frobenius_norm() < 1e-14);

    const Matrix a = test::random_matrix(3, 20, 8);
    const Eigen::MatrixXd oracle =
        a.eigen() * b.eigen().transpose() *
        test::oracle_pinv(b.eigen() * b.eigen().transpose()) * b.eigen();
    CHECK(rel_err(orth_project(a, b), oracle) < 1e-10);

    CHECK_THROWS_AS(orth_project(Matrix(2, 3), Matrix(2, 4)), DimensionMismatch);
}

TEST_CASE("orth_complement_project: identities") {
    const Matrix a = test::random_matrix(3, 15, 9);
    const Matrix b = test::random_matrix(4, 15, 10);

    // A = B: the complement vanishes
    CHECK(orth_complement_project(b, b).frobenius_norm() < 1e-10 * b.frobenius_norm());

    // orthogonal rows pass through unchanged
    const Matrix ea{{1.0, 0.0, 0.0}};
    const Matrix eb{{0.0, 0.0, 1.0}};
    CHECK(rel_err(orth_complement_project(ea, eb), ea.eigen()) < 1e-12);

    // exact algebraic split
    const Eigen::MatrixXd sum =
        orth_project(a, b).eigen() + orth_complement_project(a, b).eigen();
    CHECK((sum - a.eigen()).norm() == 0.0);
}

TEST_CASE("oblique_project: zero, reduction and oracle cases") {
    const Matrix zero(2, 30);
    const Matrix b = test::random_matrix(3, 30, 11);
    const Matrix c = test::random_matrix(4, 30, 12);
    CHECK(oblique_project(zero, b, c).frobenius_norm() == 0.0);

    // rows of B orthogonal to the span of A and C: reduces to A/C.
    // Use disjoint coordinate supports to force orthogonality.
    Matrix a2(2, 30);
    Matrix b2(3, 30);
    Matrix c2(4, 30);
    const Matrix ra = test::random_matrix(2, 12, 13);
    const Matrix rb = test::random_matrix(3, 6, 14);
    const Matrix rc = test::random_matrix(4, 12, 15);
    a2.eigen().leftCols(12) = ra.eigen();
    b2.eigen().middleCols(12, 6) = rb.eigen();
    c2.eigen().rightCols(12) = rc.eigen();
    CHECK(rel_err(oblique_project(a2, b2, c2), orth_project(a2, c2).eigen()) < 1e-10);

    // brute-force oracle of the defining formula with independent pinv
    const Matrix a = test::random_matrix(2, 30, 16);
    const Eigen::MatrixXd pb = test::oracle_pinv(b.eigen());
    const Eigen::MatrixXd a_perp = a.eigen() - a.eigen() * pb * b.eigen();
    const Eigen::MatrixXd c_perp = c.eigen() - c.eigen() * pb * b.eigen();
    const Eigen::MatrixXd oracle = a_perp * test::oracle_pinv(c_perp) * c.eigen();
    CHECK(rel_err(oblique_project(a, b, c), oracle) < 1e-10);
}

TEST_CASE("projection properties over random instances") {
    for (std::uint32_t seed = 0; seed < 25; ++seed) {
        const Matrix a = test::random_matrix(3, 24, 100 + seed);
        const Matrix b = test::random_matrix(4, 24, 200 + seed);
        const Matrix c = test::random_matrix(5, 24, 300 + seed);

        // idempotence
        const Matrix once = orth_project(a, b);
        CHECK(rel_err(orth_project(once, b), once.eigen()) < 1e-10);

        // decomposition holds exactly by construction
        CHECK((orth_project(a, b).eigen() + orth_complement_project(a, b).eigen() -
               a.eigen())
                  .norm() == 0.0);

        // rows of the oblique projection lie in the row space of C
        const Matrix ob = oblique_project(a, b, c);
        const double residual =
            orth_complement_project(ob, c).frobenius_norm();
        CHECK(residual < 1e-10 * std::max(1.0, ob.frobenius_norm()));

        // annihilation: B /_B C vanishes for generic instances
        const Matrix self = oblique_project(b, b, c);
        CHECK(self.frobenius_norm() < 1e-10 * b.frobenius_norm());
    }
}
