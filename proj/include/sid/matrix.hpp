#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <vector>

#include "sid/errors.hpp"

namespace sid {

using Index = Eigen::Index;

/// Row-major dense storage used throughout the library.
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Dense real matrix of 64-bit floats, row-major.
///
/// The universal value type: every signal, Hankel block, projection and
/// decomposition factor is a Matrix. Constructors reject NaN/Inf entries so
/// downstream numerics never have to re-check. Zero-sized matrices are legal
/// (they appear as rank-0 decomposition factors).
class Matrix {
public:
    Matrix() : m_(0, 0) {}

    /// Zero-filled rows x cols matrix.
    Matrix(Index rows, Index cols);

    /// From row-major data, length rows*cols. Validates size and finiteness.
    Matrix(Index rows, Index cols, std::vector<double> data);

    /// Rows given as initializer lists; all rows must have equal length.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    /// Wraps an Eigen expression (copies). Validates finiteness.
    template <typename Derived>
    static Matrix from(const Eigen::MatrixBase<Derived>& expr) {
        return Matrix(RowMajorMatrix(expr));
    }

    explicit Matrix(RowMajorMatrix m);

    static Matrix zeros(Index rows, Index cols) { return Matrix(rows, cols); }
    static Matrix identity(Index n) {
        return Matrix(RowMajorMatrix(RowMajorMatrix::Identity(n, n)));
    }

    Index rows() const { return m_.rows(); }
    Index cols() const { return m_.cols(); }
    Index size() const { return m_.size(); }
    bool empty() const { return m_.size() == 0; }

    double operator()(Index r, Index c) const { return m_(r, c); }
    double& operator()(Index r, Index c) { return m_(r, c); }

    const RowMajorMatrix& eigen() const { return m_; }
    RowMajorMatrix& eigen() { return m_; }

    const double* data() const { return m_.data(); }

    /// Elementwise bit-identical comparison.
    bool operator==(const Matrix& other) const;
    bool operator!=(const Matrix& other) const { return !(*this == other); }

    double frobenius_norm() const { return m_.norm(); }

private:
    void check_finite() const;

    RowMajorMatrix m_;
};

/// Vertical stack [top; bottom]. Throws DimensionMismatch on column mismatch.
Matrix vstack(const Matrix& top, const Matrix& bottom);

/// Contiguous column slice [first, first+count).
Matrix col_slice(const Matrix& m, Index first, Index count);

}  // namespace sid
