#pragma once

#include <utility>

#include "sid/matrix.hpp"
#include "sid/plant.hpp"

namespace sid {

/// The block-Hankel family built from one input/output record. Past/future
/// input blocks Up/Uf with their shifted variants UpPlus (one extra block
/// row) and UfMinus (one fewer), the mirrored output blocks, and the stacked
/// instrumental matrices Wp = [Yp; Up], WpPlus = [YpPlus; UpPlus].
struct HankelSet {
    Matrix Up, Uf, UpPlus, UfMinus;
    Matrix Yp, Yf, YpPlus, YfMinus;
    Matrix Wp, WpPlus;
    Index N = 0;  // block rows
    Index j = 0;  // columns
    Index m = 0;  // input channels
    Index l = 0;  // output channels
};

/// Block-Hankel matrix of a multichannel series (one sample per row).
/// Block (r, c) is sample start+r+c; each block row keeps the channels of one
/// sample contiguous, so the result is (block_rows * dim) x j.
Matrix build_block_hankel(const Matrix& series, Index start, Index block_rows, Index j);

/// Assembles the whole family. Requires N >= 2 (so UfMinus is non-empty),
/// j > N, and at least 2N+j-1 samples.
HankelSet build_hankel_set(const IoRecord& rec, Index N, Index j);

/// Single-block-row regressor data: Yi is l x j with column c = y(N+c), and
/// Ui likewise for the input.
std::pair<Matrix, Matrix> extract_YiUi(const IoRecord& rec, Index N, Index j);

}  // namespace sid
