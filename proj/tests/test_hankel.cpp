#include <doctest.h>

#include "sid/hankel.hpp"
#include "test_support.hpp"

using namespace sid;

namespace {

Matrix ramp(Index length, double slope = 1.0) {
    Matrix s(length, 1);
    for (Index k = 0; k < length; ++k) s(k, 0) = slope * static_cast<double>(k);
    return s;
}

IoRecord ramp_record(Index length) {
    return IoRecord{ramp(length, 1.0), ramp(length, 2.0)};
}

}  // namespace

TEST_CASE("block hankel of a scalar ramp") {
    const Matrix h = build_block_hankel(ramp(6), 0, 2, 3);
    CHECK(h == (Matrix{{0, 1, 2}, {1, 2, 3}}));
    const Matrix hf = build_block_hankel(ramp(8), 2, 2, 3);
    CHECK(hf == (Matrix{{2, 3, 4}, {3, 4, 5}}));
}

TEST_CASE("block hankel keeps the channels of one sample contiguous") {
    // two channels: sample k is (k, 10k)
    Matrix series(6, 2);
    for (Index k = 0; k < 6; ++k) {
        series(k, 0) = static_cast<double>(k);
        series(k, 1) = 10.0 * static_cast<double>(k);
    }
    const Matrix h = build_block_hankel(series, 1, 2, 3);
    CHECK(h.rows() == 4);
    CHECK(h.cols() == 3);
    for (Index r = 0; r < 2; ++r) {
        for (Index c = 0; c < 3; ++c) {
            const double sample = static_cast<double>(1 + r + c);
            CHECK(h(2 * r, c) == sample);
            CHECK(h(2 * r + 1, c) == 10.0 * sample);
        }
    }
}

TEST_CASE("block hankel rejects short series") {
    CHECK_THROWS_AS(build_block_hankel(ramp(5), 0, 3, 4), InsufficientData);
    CHECK_THROWS_AS(build_block_hankel(ramp(5), 0, 0, 3), InvalidShape);
}

TEST_CASE("hankel set on the ramp record matches the block definitions") {
    const HankelSet h = build_hankel_set(ramp_record(6), 2, 3);
    CHECK(h.Up == (Matrix{{0, 1, 2}, {1, 2, 3}}));
    CHECK(h.Uf == (Matrix{{2, 3, 4}, {3, 4, 5}}));
    CHECK(h.UpPlus == (Matrix{{0, 1, 2}, {1, 2, 3}, {2, 3, 4}}));
    CHECK(h.UfMinus == (Matrix{{3, 4, 5}}));
    CHECK(h.Yp == (Matrix{{0, 2, 4}, {2, 4, 6}}));

    // Wp = [Yp; Up] with the outputs on top
    CHECK(h.Wp.rows() == 4);
    CHECK(Matrix(RowMajorMatrix(h.Wp.eigen().topRows(2))) == h.Yp);
    CHECK(Matrix(RowMajorMatrix(h.Wp.eigen().bottomRows(2))) == h.Up);
    CHECK(h.WpPlus.rows() == 6);
}

TEST_CASE("hankel set boundary: exactly 2N+j-1 samples are required") {
    CHECK_NOTHROW(build_hankel_set(ramp_record(6), 2, 3));
    CHECK_THROWS_AS(build_hankel_set(ramp_record(5), 2, 3), InsufficientData);
    CHECK_THROWS_AS(build_hankel_set(ramp_record(6), 1, 3), InvalidShape);
    CHECK_THROWS_AS(build_hankel_set(ramp_record(6), 2, 2), InvalidShape);
}

TEST_CASE("hankel structure and shifted consistency on random data") {
    const StateSpaceModel model = test::random_stable_model(3, 2, 2, 31);
    const Index N = 4;
    const Index j = 25;
    const IoRecord rec = simulate(model, test::random_matrix(2 * N + j - 1, 2, 8));
    const HankelSet h = build_hankel_set(rec, N, j);

    const Index m = 2;
    // repeated shifted windows: block(r+1, c) == block(r, c+1)
    for (Index r = 0; r + 1 < N; ++r) {
        for (Index c = 0; c + 1 < j; ++c) {
            for (Index ch = 0; ch < m; ++ch) {
                CHECK(h.Up((r + 1) * m + ch, c) == h.Up(r * m + ch, c + 1));
            }
        }
    }

    // UpPlus without its last block row is Up
    CHECK(Matrix(RowMajorMatrix(h.UpPlus.eigen().topRows(N * m))) == h.Up);
    // Uf without its first block row is UfMinus
    CHECK(Matrix(RowMajorMatrix(h.Uf.eigen().bottomRows((N - 1) * m))) == h.UfMinus);
    // same for the output side
    CHECK(Matrix(RowMajorMatrix(h.YpPlus.eigen().topRows(N * m))) == h.Yp);
    CHECK(Matrix(RowMajorMatrix(h.Yf.eigen().bottomRows((N - 1) * m))) == h.YfMinus);

    // stacked row counts
    CHECK(h.Wp.rows() == (2 + 2) * N);
    CHECK(h.WpPlus.rows() == (2 + 2) * (N + 1));
}

TEST_CASE("extract_YiUi substitutes the single block row at N") {
    const auto [yi, ui] = extract_YiUi(ramp_record(6), 2, 3);
    CHECK(ui == (Matrix{{2, 3, 4}}));
    CHECK(yi == (Matrix{{4, 6, 8}}));

    // Yi is block row N of the (N+1)-row Hankel of y
    const Matrix hy = build_block_hankel(ramp(6, 2.0), 0, 3, 3);
    CHECK(yi == Matrix(RowMajorMatrix(hy.eigen().row(2))));

    const auto [yz, uz] = extract_YiUi(IoRecord{Matrix(6, 1), Matrix(6, 1)}, 2, 3);
    CHECK(yz == Matrix(1, 3));
    CHECK(uz == Matrix(1, 3));

    CHECK_THROWS_AS(extract_YiUi(ramp_record(4), 2, 3), InsufficientData);
}
