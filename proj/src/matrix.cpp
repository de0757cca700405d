#include "sid/matrix.hpp"

#include <cmath>
#include <cstring>
#include <utility>

namespace sid {

Matrix::Matrix(Index rows, Index cols) {
    if (rows < 0 || cols < 0) {
        throw InvalidShape("matrix dimensions must be non-negative");
    }
    m_ = RowMajorMatrix::Zero(rows, cols);
}

Matrix::Matrix(Index rows, Index cols, std::vector<double> data) {
    if (rows < 0 || cols < 0) {
        throw InvalidShape("matrix dimensions must be non-negative");
    }
    if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) != data.size()) {
        throw DimensionMismatch("data length does not equal rows*cols");
    }
    m_.resize(rows, cols);
    if (!data.empty()) {
        std::memcpy(m_.data(), data.data(), data.size() * sizeof(double));
    }
    check_finite();
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    const Index r = static_cast<Index>(rows.size());
    const Index c = r > 0 ? static_cast<Index>(rows.begin()->size()) : 0;
    m_.resize(r, c);
    Index i = 0;
    for (const auto& row : rows) {
        if (static_cast<Index>(row.size()) != c) {
            throw DimensionMismatch("ragged initializer rows");
        }
        Index j = 0;
        for (double v : row) m_(i, j++) = v;
        ++i;
    }
    check_finite();
}

Matrix::Matrix(RowMajorMatrix m) : m_(std::move(m)) { check_finite(); }

void Matrix::check_finite() const {
    if (!m_.allFinite()) {
        throw InvalidShape("matrix entries must be finite (no NaN/Inf)");
    }
}

bool Matrix::operator==(const Matrix& other) const {
    if (rows() != other.rows() || cols() != other.cols()) return false;
    if (empty()) return true;
    return std::memcmp(data(), other.data(), sizeof(double) * size()) == 0;
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
    if (top.cols() != bottom.cols()) {
        throw DimensionMismatch("vstack: column counts differ");
    }
    RowMajorMatrix out(top.rows() + bottom.rows(), top.cols());
    out.topRows(top.rows()) = top.eigen();
    out.bottomRows(bottom.rows()) = bottom.eigen();
    return Matrix(std::move(out));
}

Matrix col_slice(const Matrix& m, Index first, Index count) {
    if (first < 0 || count < 0 || first + count > m.cols()) {
        throw DimensionMismatch("col_slice: range out of bounds");
    }
    return Matrix(RowMajorMatrix(m.eigen().middleCols(first, count)));
}

}  // namespace sid
