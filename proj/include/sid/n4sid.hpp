#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "sid/hankel.hpp"
#include "sid/matrix.hpp"
#include "sid/plant.hpp"

namespace sid {

/// How the decomposition stage computes the SVD of the oblique projection.
enum class SvdStageMode {
    /// One dense SVD with both orthogonal factors formed in full, as the
    /// traditional one-shot algorithm runs. The sequential baseline.
    FullDense,
    /// Column-partitioned merge-and-truncate reduction (tsvd).
    BlockMerge,
};

/// Scale and numerical parameters of one identification run. The projection
/// weights are fixed at identity.
struct SidConfig {
    Index N = 10;           // Hankel block rows
    Index j = 1000;         // Hankel columns
    std::optional<Index> order;  // forced model order; empty = from spectrum
    double order_tol = 1e-6;     // relative singular-value threshold
    SvdStageMode svd_mode = SvdStageMode::FullDense;
    Index svd_block_width = 0;   // block width for BlockMerge; 0 = whole width

    void validate() const;
};

/// Intermediates of the state-estimation stage.
struct SidIntermediate {
    Matrix Oi;          // l*N x j oblique projection
    Matrix Oim1;        // l*(N-1) x j shifted projection
    Matrix U1;          // leading left singular vectors
    std::vector<double> S1;
    Matrix Gamma;       // extended observability matrix, l*N x n
    Matrix GammaUnder;  // Gamma without its last l rows
    Matrix Xi;          // n x j state sequence
    Matrix Xip1;        // n x j shifted state sequence
};

struct SidDiagnostics {
    double hankel_ms = 0.0;
    double oblique_ms = 0.0;
    double svd_ms = 0.0;
    double estimation_ms = 0.0;
    std::vector<double> singular_values;  // full computed spectrum
    Index order = 0;
    double residual = 0.0;
    double regressor_condition = 0.0;
    bool ill_conditioned = false;

    /// Sum of the three algorithm stages (data preparation excluded).
    double total_ms() const { return oblique_ms + svd_ms + estimation_ms; }
};

struct IdentifyResult {
    StateSpaceModel model;
    Index order = 0;
    SidDiagnostics diagnostics;
};

/// Step 1: the two oblique projections
///   Oi   = Yf /_{Uf} Wp,    Oim1 = Yf- /_{Uf-} Wp+.
std::pair<Matrix, Matrix> oblique_stage(const HankelSet& h);

struct SvdStageResult {
    Matrix U1;
    std::vector<double> S1;
    Index order = 0;
    std::vector<double> spectrum;
};

/// Steps 2-3: SVD of the (identity-weighted) projection and order selection:
/// order = count of singular values >= order_tol * s1 unless cfg.order forces
/// it. Throws OrderZero when the whole spectrum is below threshold.
SvdStageResult svd_stage(const Matrix& oi, const SidConfig& cfg, int parallel = 1);

/// Step 4: Gamma = U1 * diag(S1)^(1/2), its one-block-row-short variant, and
/// the state sequences Xi = pinv(Gamma) * Oi, Xip1 = pinv(GammaUnder) * Oim1.
SidIntermediate estimate_states(const Matrix& u1, const std::vector<double>& s1,
                                const Matrix& oi, const Matrix& oim1, Index N, Index l);

struct SolveResult {
    StateSpaceModel model;
    double residual = 0.0;
    double condition = 0.0;
    bool ill_conditioned = false;
};

/// Step 5: least-squares solve of [Xip1; Yi] = [A B; C D] [Xi; Ui] over the
/// j columns via the pseudo-inverse of the stacked regressor. Reports the
/// Frobenius residual and the regressor condition number (ill conditioning
/// is reported, not fatal).
SolveResult solve_system(const Matrix& xi, const Matrix& xip1, const Matrix& yi,
                         const Matrix& ui);

/// The full pipeline: Hankel assembly, oblique projections, SVD and order
/// selection, state estimation, system solve. Diagnostics carry per-stage
/// wall times and the singular-value spectrum.
IdentifyResult identify(const IoRecord& rec, const SidConfig& cfg, int parallel = 1);

}  // namespace sid
