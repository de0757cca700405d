#include "sid/projection.hpp"

#include <limits>

#include "sid/tsvd.hpp"

namespace sid {

Matrix pinv(const Matrix& m, double rel_tol) {
    if (m.empty()) return Matrix(m.cols(), m.rows());
    const SvdTriple t = svd_dense(m);
    if (rel_tol < 0.0) {
        rel_tol = static_cast<double>(std::max(m.rows(), m.cols())) *
                  std::numeric_limits<double>::epsilon();
    }
    const double smax = t.S.empty() ? 0.0 : t.S.front();
    const double cutoff = rel_tol * smax;

    Eigen::VectorXd inv_s = Eigen::VectorXd::Zero(t.rank());
    for (Index i = 0; i < t.rank(); ++i) {
        const double s = t.S[static_cast<std::size_t>(i)];
        if (s > cutoff && s > 0.0) inv_s(i) = 1.0 / s;
    }
    // pinv = V * diag(1/s) * U^T
    return Matrix::from(t.V.eigen() * inv_s.asDiagonal() * t.U.eigen().transpose());
}

namespace {

void check_same_cols(const Matrix& a, const Matrix& b, const char* what) {
    if (a.cols() != b.cols()) {
        throw DimensionMismatch(std::string(what) + ": operands must share the column count");
    }
}

}  // namespace

Matrix orth_project(const Matrix& a, const Matrix& b) {
    check_same_cols(a, b, "orth_project");
    // (a * pinv(b)) * b keeps the intermediate at rows(a) x rows(b).
    return Matrix::from((a.eigen() * pinv(b).eigen()) * b.eigen());
}

Matrix orth_complement_project(const Matrix& a, const Matrix& b) {
    check_same_cols(a, b, "orth_complement_project");
    return Matrix::from(a.eigen() - orth_project(a, b).eigen());
}

Matrix oblique_project(const Matrix& a, const Matrix& b, const Matrix& c) {
    check_same_cols(a, b, "oblique_project");
    check_same_cols(a, c, "oblique_project");
    const Matrix a_perp = orth_complement_project(a, b);
    const Matrix c_perp = orth_complement_project(c, b);
    return Matrix::from((a_perp.eigen() * pinv(c_perp).eigen()) * c.eigen());
}

}  // namespace sid
