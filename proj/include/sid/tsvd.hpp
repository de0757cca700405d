#pragma once

#include <vector>

#include "sid/matrix.hpp"

namespace sid {

/// Thin singular value decomposition, possibly truncated: the represented
/// matrix is U * diag(S) * V^T with U m x k, V n x k, S descending and
/// non-negative. k = 0 (empty factors) represents an exact zero matrix.
struct SvdTriple {
    Matrix U;
    std::vector<double> S;
    Matrix V;

    Index rank() const { return static_cast<Index>(S.size()); }
    Index rep_rows() const { return U.rows(); }
    Index rep_cols() const { return V.rows(); }

    /// U * diag(S) * V^T, materialized.
    Matrix reconstruct() const;
};

/// Contiguous column partition of an n-column matrix into blocks of width
/// `col` (the last block may be narrower).
struct BlockPlan {
    Index n = 0;
    Index col = 0;
    Index count = 0;
    std::vector<Index> offsets;
    std::vector<Index> widths;

    static BlockPlan make(Index n, Index col);
};

/// One step of the pairwise merge tree over an Nl-element block list:
/// merge inputs `left` and `right` producing slot `out`. Slots 0..Nl-1 are
/// the original blocks; each step appends one new slot. An odd element at
/// the end of a level is carried to the next level unmerged.
struct MergeStep {
    int level;
    int left;
    int right;
    int out;
};

/// The full merge schedule for Nl blocks: Nl-1 steps across
/// ceil(log2(Nl)) levels. Shared by the in-process reduction and the
/// workflow builder so both produce the same tree.
std::vector<MergeStep> merge_schedule(int nl);

/// Thin SVD of a dense matrix: k = min(rows, cols), no truncation.
/// Columns of U are sign-normalized (first nonzero entry non-negative).
SvdTriple svd_dense(const Matrix& m);

/// SVD computed with both orthogonal factors formed in full (U m x m and
/// V n x n), as the classical one-shot algorithm states it; the leading
/// min(m, n) columns are returned. Far more expensive than svd_dense for
/// wide inputs and deliberately so: it is the cost model of the sequential
/// baseline that the block-merge path is measured against.
SvdTriple svd_full(const Matrix& m);

/// Keeps the leading k = numerical-rank singular values and the matching
/// factor columns. Rank 0 yields empty factors.
SvdTriple do_truncate(SvdTriple t);

/// Merge-and-truncate: combines two truncated SVDs of column blocks into the
/// truncated SVD of their concatenation via the SVD of [U1*S1  U2*S2].
SvdTriple block_merge(const SvdTriple& t1, const SvdTriple& t2);

/// Pairwise reduction of a block list per merge_schedule.
SvdTriple do_merge_of_blocks(std::vector<SvdTriple> triples);

/// Column-partitioned truncated SVD: per-block thin SVDs (concurrent when
/// parallel > 1) followed by the pairwise merge tree. The merge order is
/// fixed by the BlockPlan, so results do not depend on the worker count.
SvdTriple parallel_svd_by_cols(const Matrix& a, Index col, int parallel = 1);

/// Count of singular values >= max(m, n) * eps * s_max, the shared
/// numerical-rank rule.
Index numerical_rank(const std::vector<double>& s, Index m, Index n);

}  // namespace sid
