#include "sid/tsvd.hpp"

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstring>
#include <limits>
#include <mutex>
#include <string>
#include <utility>

#include "thread_pool.hpp"

extern "C" {
void dgesdd_(const char* jobz, const int* m, const int* n, double* a, const int* lda,
             double* s, double* u, const int* ldu, double* vt, const int* ldvt,
             double* work, const int* lwork, int* iwork, int* info);
void openblas_set_num_threads(int num_threads);
}

namespace sid {

namespace {

// Library-level BLAS parallelism is disabled: concurrency belongs to the
// block/task layer, and single-threaded kernels keep timings attributable.
void ensure_single_threaded_blas() {
    static const bool once = [] {
        openblas_set_num_threads(1);
        return true;
    }();
    (void)once;
}

// Flips factor-column pairs so the first nonzero entry of each U column is
// non-negative; results from different partitions become comparable.
void normalize_signs(Matrix& u, Matrix& v) {
    const Index m = u.rows();
    const Index n = v.rows();
    for (Index c = 0; c < u.cols(); ++c) {
        double lead = 0.0;
        for (Index r = 0; r < m; ++r) {
            if (u(r, c) != 0.0) {
                lead = u(r, c);
                break;
            }
        }
        if (lead < 0.0) {
            u.eigen().col(c) = -u.eigen().col(c);
            if (c < v.cols()) {
                for (Index r = 0; r < n; ++r) v(r, c) = -v(r, c);
            }
        }
    }
}

// dgesdd on the transposed view: a row-major m x n buffer read col-major is
// the n x m transpose, so no input reordering is needed and the returned VT
// buffer is already our U in row-major layout.
SvdTriple svd_kernel(const Matrix& mat, bool full) {
    ensure_single_threaded_blas();

    const Index m = mat.rows();
    const Index n = mat.cols();
    const Index k = std::min(m, n);
    if (m == 0 || n == 0) {
        return SvdTriple{Matrix(m, 0), {}, Matrix(n, 0)};
    }

    const int fm = static_cast<int>(n);  // rows of the transposed problem
    const int fn = static_cast<int>(m);
    const int kk = static_cast<int>(k);

    std::vector<double> a(static_cast<std::size_t>(m) * n);
    std::memcpy(a.data(), mat.data(), a.size() * sizeof(double));

    const int ucols = full ? fm : kk;
    const int ldu = fm;
    const int ldvt = full ? fn : kk;
    std::vector<double> s(k);
    std::vector<double> u(static_cast<std::size_t>(ldu) * ucols);
    std::vector<double> vt(static_cast<std::size_t>(ldvt) * fn);
    std::vector<int> iwork(8 * static_cast<std::size_t>(k));

    const char jobz = full ? 'A' : 'S';
    int info = 0;
    int lwork = -1;
    double wk_query = 0.0;
    dgesdd_(&jobz, &fm, &fn, a.data(), &fm, s.data(), u.data(), &ldu, vt.data(), &ldvt,
            &wk_query, &lwork, iwork.data(), &info);
    if (info != 0) {
        throw ConvergenceFailure("SVD workspace query failed, info=" + std::to_string(info));
    }
    lwork = static_cast<int>(wk_query);
    std::vector<double> work(static_cast<std::size_t>(lwork));
    dgesdd_(&jobz, &fm, &fn, a.data(), &fm, s.data(), u.data(), &ldu, vt.data(), &ldvt,
            work.data(), &lwork, iwork.data(), &info);
    if (info != 0) {
        throw ConvergenceFailure("SVD did not converge, info=" + std::to_string(info));
    }

    // VT of the transposed problem, col-major ldvt x fn, holds our left
    // factor row-major: entry (r, c) of U sits at vt[c + r*ldvt].
    RowMajorMatrix left(m, k);
    if (ldvt == kk) {
        std::memcpy(left.data(), vt.data(), static_cast<std::size_t>(m) * k * sizeof(double));
    } else {
        for (Index r = 0; r < m; ++r) {
            std::memcpy(left.row(r).data(), vt.data() + static_cast<std::size_t>(r) * ldvt,
                        static_cast<std::size_t>(k) * sizeof(double));
        }
    }

    // U of the transposed problem, col-major fm x ucols, holds our right
    // factor; keep the leading k columns and transpose into row-major.
    RowMajorMatrix right(n, k);
    for (Index c = 0; c < k; ++c) {
        const double* src = u.data() + static_cast<std::size_t>(c) * ldu;
        for (Index r = 0; r < n; ++r) right(r, c) = src[r];
    }

    SvdTriple out{Matrix(std::move(left)), std::move(s), Matrix(std::move(right))};
    normalize_signs(out.U, out.V);
    return out;
}

Index rank_for_dims(const std::vector<double>& s, Index m, Index n) {
    if (s.empty() || s.front() <= 0.0) return 0;
    const double tol = static_cast<double>(std::max(m, n)) *
                       std::numeric_limits<double>::epsilon() * s.front();
    Index k = 0;
    while (k < static_cast<Index>(s.size()) && s[static_cast<std::size_t>(k)] >= tol) ++k;
    return k;
}

SvdTriple take_leading(SvdTriple t, Index k) {
    if (k >= t.rank()) return t;
    SvdTriple out;
    out.U = Matrix(RowMajorMatrix(t.U.eigen().leftCols(k)));
    out.V = Matrix(RowMajorMatrix(t.V.eigen().leftCols(k)));
    out.S.assign(t.S.begin(), t.S.begin() + k);
    return out;
}

}  // namespace

Matrix SvdTriple::reconstruct() const {
    if (rank() == 0) return Matrix(rep_rows(), rep_cols());
    const Eigen::Map<const Eigen::VectorXd> s(S.data(), rank());
    return Matrix::from(U.eigen() * s.asDiagonal() * V.eigen().transpose());
}

BlockPlan BlockPlan::make(Index n, Index col) {
    if (n < 1) throw InvalidShape("block plan: matrix must have at least one column");
    if (col < 1) throw InvalidShape("block plan: block width must be >= 1");
    BlockPlan plan;
    plan.n = n;
    plan.col = col;
    plan.count = (n + col - 1) / col;
    plan.offsets.reserve(plan.count);
    plan.widths.reserve(plan.count);
    for (Index i = 0; i < plan.count; ++i) {
        const Index off = i * col;
        plan.offsets.push_back(off);
        plan.widths.push_back(std::min(col, n - off));
    }
    return plan;
}

std::vector<MergeStep> merge_schedule(int nl) {
    std::vector<MergeStep> steps;
    if (nl < 1) return steps;
    std::vector<int> current(static_cast<std::size_t>(nl));
    for (int i = 0; i < nl; ++i) current[static_cast<std::size_t>(i)] = i;
    int next_slot = nl;
    int level = 1;
    while (current.size() > 1) {
        std::vector<int> next;
        for (std::size_t i = 0; i + 1 < current.size(); i += 2) {
            steps.push_back({level, current[i], current[i + 1], next_slot});
            next.push_back(next_slot++);
        }
        if (current.size() % 2 == 1) next.push_back(current.back());
        current = std::move(next);
        ++level;
    }
    return steps;
}

SvdTriple svd_dense(const Matrix& m) { return svd_kernel(m, /*full=*/false); }

SvdTriple svd_full(const Matrix& m) { return svd_kernel(m, /*full=*/true); }

SvdTriple do_truncate(SvdTriple t) {
    const Index k = rank_for_dims(t.S, t.rep_rows(), t.rep_cols());
    return take_leading(std::move(t), k);
}

SvdTriple block_merge(const SvdTriple& t1, const SvdTriple& t2) {
    if (t1.rep_rows() != t2.rep_rows()) {
        throw DimensionMismatch("block merge: row dimensions differ");
    }
    const Index m = t1.rep_rows();
    const Index n1 = t1.rep_cols();
    const Index n2 = t2.rep_cols();

    const SvdTriple a = do_truncate(t1);
    const SvdTriple b = do_truncate(t2);
    const Index k1 = a.rank();
    const Index k2 = b.rank();
    if (k1 + k2 == 0) {
        return SvdTriple{Matrix(m, 0), {}, Matrix(n1 + n2, 0)};
    }

    RowMajorMatrix e(m, k1 + k2);
    if (k1 > 0) {
        const Eigen::Map<const Eigen::VectorXd> s1(a.S.data(), k1);
        e.leftCols(k1) = a.U.eigen() * s1.asDiagonal();
    }
    if (k2 > 0) {
        const Eigen::Map<const Eigen::VectorXd> s2(b.S.data(), k2);
        e.rightCols(k2) = b.U.eigen() * s2.asDiagonal();
    }

    SvdTriple merged = svd_dense(Matrix(std::move(e)));
    // Truncation tolerance follows the represented m x (n1+n2) concatenation.
    merged = take_leading(std::move(merged), rank_for_dims(merged.S, m, n1 + n2));

    const Index r = merged.rank();
    RowMajorMatrix v(n1 + n2, r);
    if (r > 0) {
        v.topRows(n1) = a.V.eigen() * merged.V.eigen().topRows(k1);
        v.bottomRows(n2) = b.V.eigen() * merged.V.eigen().bottomRows(k2);
    }
    return SvdTriple{std::move(merged.U), std::move(merged.S), Matrix(std::move(v))};
}

SvdTriple do_merge_of_blocks(std::vector<SvdTriple> triples) {
    if (triples.empty()) throw EmptyInput("merge of blocks: no triples given");
    if (triples.size() == 1) return std::move(triples.front());

    const auto schedule = merge_schedule(static_cast<int>(triples.size()));
    std::vector<SvdTriple> slots = std::move(triples);
    slots.resize(slots.size() + schedule.size());
    for (const auto& step : schedule) {
        auto& left = slots[static_cast<std::size_t>(step.left)];
        auto& right = slots[static_cast<std::size_t>(step.right)];
        slots[static_cast<std::size_t>(step.out)] = block_merge(left, right);
        left = SvdTriple{};  // operands are dead after their single use
        right = SvdTriple{};
    }
    return std::move(slots.back());
}

SvdTriple parallel_svd_by_cols(const Matrix& a, Index col, int parallel) {
    const BlockPlan plan = BlockPlan::make(a.cols(), col);
    std::vector<SvdTriple> blocks(static_cast<std::size_t>(plan.count));

    auto decompose = [&](Index i) {
        const Matrix slice = col_slice(a, plan.offsets[static_cast<std::size_t>(i)],
                                       plan.widths[static_cast<std::size_t>(i)]);
        blocks[static_cast<std::size_t>(i)] = do_truncate(svd_dense(slice));
    };

    if (parallel > 1 && plan.count > 1) {
        detail::ThreadPool pool(static_cast<unsigned>(
            std::min<Index>(parallel, plan.count)));
        std::mutex mutex;
        std::condition_variable cv;
        Index done = 0;
        std::exception_ptr error;
        for (Index i = 0; i < plan.count; ++i) {
            pool.submit([&, i] {
                try {
                    decompose(i);
                } catch (...) {
                    std::lock_guard lock(mutex);
                    if (!error) error = std::current_exception();
                }
                {
                    std::lock_guard lock(mutex);
                    ++done;
                }
                cv.notify_one();
            });
        }
        std::unique_lock lock(mutex);
        cv.wait(lock, [&] { return done == plan.count; });
        if (error) std::rethrow_exception(error);
    } else {
        for (Index i = 0; i < plan.count; ++i) decompose(i);
    }

    return do_merge_of_blocks(std::move(blocks));
}

Index numerical_rank(const std::vector<double>& s, Index m, Index n) {
    return rank_for_dims(s, m, n);
}

}  // namespace sid
