#pragma once

#include "sid/matrix.hpp"

namespace sid {

/// Moore-Penrose pseudo-inverse via the thin SVD. Singular values below
/// rel_tol * s_max are treated as zero; rel_tol < 0 selects the default
/// max(rows, cols) * machine epsilon.
Matrix pinv(const Matrix& m, double rel_tol = -1.0);

/// Orthogonal projection of the row space of a onto the row space of b:
/// a * pinv(b) * b. Operands must share the column count.
Matrix orth_project(const Matrix& a, const Matrix& b);

/// a minus its projection onto the row space of b.
Matrix orth_complement_project(const Matrix& a, const Matrix& b);

/// Oblique projection of the row space of a along the row space of b into
/// the row space of c: (a/b_perp) * pinv(c/b_perp) * c. Degenerate rank
/// falls back to pseudo-inverse semantics, no error raised.
Matrix oblique_project(const Matrix& a, const Matrix& b, const Matrix& c);

}  // namespace sid
