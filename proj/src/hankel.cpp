#include "sid/hankel.hpp"

#include <string>

namespace sid {

Matrix build_block_hankel(const Matrix& series, Index start, Index block_rows, Index j) {
    if (start < 0 || block_rows < 1 || j < 1) {
        throw InvalidShape("hankel: start >= 0, block_rows >= 1 and j >= 1 required");
    }
    const Index dim = series.cols();
    if (series.rows() < start + block_rows + j - 1) {
        throw InsufficientData("hankel: series has " + std::to_string(series.rows()) +
                               " samples, needs " +
                               std::to_string(start + block_rows + j - 1));
    }
    RowMajorMatrix out(block_rows * dim, j);
    for (Index r = 0; r < block_rows; ++r) {
        for (Index c = 0; c < j; ++c) {
            out.block(r * dim, c, dim, 1) = series.eigen().row(start + r + c).transpose();
        }
    }
    return Matrix(std::move(out));
}

HankelSet build_hankel_set(const IoRecord& rec, Index N, Index j) {
    if (N < 2) throw InvalidShape("hankel set requires N >= 2");
    if (j <= N) throw InvalidShape("hankel set requires j > N");
    if (rec.u.rows() != rec.y.rows()) {
        throw DimensionMismatch("record input and output lengths differ");
    }
    const Index need = 2 * N + j - 1;
    if (rec.length() < need) {
        throw InsufficientData("record has " + std::to_string(rec.length()) +
                               " samples, needs " + std::to_string(need));
    }

    HankelSet h;
    h.N = N;
    h.j = j;
    h.m = rec.m();
    h.l = rec.l();
    h.Up = build_block_hankel(rec.u, 0, N, j);
    h.Uf = build_block_hankel(rec.u, N, N, j);
    h.UpPlus = build_block_hankel(rec.u, 0, N + 1, j);
    h.UfMinus = build_block_hankel(rec.u, N + 1, N - 1, j);
    h.Yp = build_block_hankel(rec.y, 0, N, j);
    h.Yf = build_block_hankel(rec.y, N, N, j);
    h.YpPlus = build_block_hankel(rec.y, 0, N + 1, j);
    h.YfMinus = build_block_hankel(rec.y, N + 1, N - 1, j);
    h.Wp = vstack(h.Yp, h.Up);
    h.WpPlus = vstack(h.YpPlus, h.UpPlus);
    return h;
}

std::pair<Matrix, Matrix> extract_YiUi(const IoRecord& rec, Index N, Index j) {
    if (N < 1 || j < 1) throw InvalidShape("extract_YiUi: N >= 1 and j >= 1 required");
    if (rec.length() < N + j) {
        throw InsufficientData("record has " + std::to_string(rec.length()) +
                               " samples, needs " + std::to_string(N + j));
    }
    RowMajorMatrix Yi(rec.l(), j);
    RowMajorMatrix Ui(rec.m(), j);
    for (Index c = 0; c < j; ++c) {
        Yi.col(c) = rec.y.eigen().row(N + c).transpose();
        Ui.col(c) = rec.u.eigen().row(N + c).transpose();
    }
    return {Matrix(std::move(Yi)), Matrix(std::move(Ui))};
}

}  // namespace sid
