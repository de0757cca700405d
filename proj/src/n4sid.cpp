#include "sid/n4sid.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "sid/projection.hpp"
#include "sid/tsvd.hpp"

namespace sid {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

void SidConfig::validate() const {
    if (N < 2) throw InvalidShape("config: N >= 2 required");
    if (j <= N) throw InvalidShape("config: j > N required");
    if (!(order_tol > 0.0 && order_tol < 1.0)) {
        throw InvalidShape("config: order_tol must lie in (0, 1)");
    }
    if (svd_block_width < 0) throw InvalidShape("config: svd_block_width must be >= 0");
    if (order && *order < 1) throw InvalidShape("config: forced order must be >= 1");
}

std::pair<Matrix, Matrix> oblique_stage(const HankelSet& h) {
    Matrix oi = oblique_project(h.Yf, h.Uf, h.Wp);
    Matrix oim1 = oblique_project(h.YfMinus, h.UfMinus, h.WpPlus);
    return {std::move(oi), std::move(oim1)};
}

SvdStageResult svd_stage(const Matrix& oi, const SidConfig& cfg, int parallel) {
    if (oi.empty()) throw InvalidShape("svd stage: projection is empty");

    SvdTriple t;
    if (cfg.svd_mode == SvdStageMode::FullDense) {
        t = svd_full(oi);
    } else {
        const Index width = cfg.svd_block_width > 0 ? cfg.svd_block_width : oi.cols();
        t = parallel_svd_by_cols(oi, width, parallel);
    }

    SvdStageResult out;
    out.spectrum = t.S;

    Index order = 0;
    if (cfg.order) {
        order = *cfg.order;
        if (order > t.rank()) {
            throw InvalidShape("forced order " + std::to_string(order) +
                               " exceeds the " + std::to_string(t.rank()) +
                               " computed singular values");
        }
    } else {
        if (t.S.empty() || t.S.front() <= 0.0) {
            throw OrderZero("all singular values are zero");
        }
        const double cutoff = cfg.order_tol * t.S.front();
        for (double s : t.S) {
            if (s >= cutoff) ++order;
        }
        if (order == 0) throw OrderZero("no singular value above the order threshold");
    }

    out.order = order;
    out.U1 = Matrix(RowMajorMatrix(t.U.eigen().leftCols(order)));
    out.S1.assign(t.S.begin(), t.S.begin() + order);
    return out;
}

SidIntermediate estimate_states(const Matrix& u1, const std::vector<double>& s1,
                                const Matrix& oi, const Matrix& oim1, Index N, Index l) {
    const Index n = u1.cols();
    if (static_cast<Index>(s1.size()) != n) {
        throw DimensionMismatch("estimate_states: U1/S1 order mismatch");
    }
    if (oi.rows() != l * N || u1.rows() != l * N) {
        throw DimensionMismatch("estimate_states: Oi must be (l*N) x j");
    }
    if (oim1.rows() != l * (N - 1)) {
        throw DimensionMismatch("estimate_states: Oim1 must be (l*(N-1)) x j");
    }

    // Gamma = U1 diag(s1)^(1/2) with orthonormal U1, so its Gram spectrum is
    // s1 itself; the numerical-rank rule is applied there.
    const double eps = std::numeric_limits<double>::epsilon();
    if (s1.empty() || s1.front() <= 0.0 ||
        s1.back() < static_cast<double>(std::max(l * N, n)) * eps * s1.front()) {
        throw RankDeficientGamma("observability matrix is numerically rank-deficient");
    }

    SidIntermediate out;
    out.Oi = oi;
    out.Oim1 = oim1;
    out.U1 = u1;
    out.S1 = s1;

    Eigen::VectorXd root_s(n);
    for (Index i = 0; i < n; ++i) root_s(i) = std::sqrt(s1[static_cast<std::size_t>(i)]);
    out.Gamma = Matrix::from(u1.eigen() * root_s.asDiagonal());
    out.GammaUnder = Matrix(RowMajorMatrix(out.Gamma.eigen().topRows(l * (N - 1))));

    out.Xi = Matrix::from(pinv(out.Gamma).eigen() * oi.eigen());
    out.Xip1 = Matrix::from(pinv(out.GammaUnder).eigen() * oim1.eigen());
    return out;
}

SolveResult solve_system(const Matrix& xi, const Matrix& xip1, const Matrix& yi,
                         const Matrix& ui) {
    const Index n = xi.rows();
    const Index j = xi.cols();
    const Index l = yi.rows();
    const Index m = ui.rows();
    if (xip1.rows() != n || xip1.cols() != j || yi.cols() != j || ui.cols() != j) {
        throw DimensionMismatch("solve_system: operand shapes are inconsistent");
    }
    if (j < n + m) {
        throw DimensionMismatch("solve_system: j must be at least n+m");
    }

    const Matrix regressor = vstack(xi, ui);    // (n+m) x j
    const Matrix target = vstack(xip1, yi);     // (n+l) x j

    const SvdTriple rsvd = svd_dense(regressor);
    const double eps = std::numeric_limits<double>::epsilon();
    const double cutoff = static_cast<double>(std::max(regressor.rows(), j)) * eps *
                          (rsvd.S.empty() ? 0.0 : rsvd.S.front());
    Eigen::VectorXd inv_s = Eigen::VectorXd::Zero(rsvd.rank());
    double smin_kept = 0.0;
    for (Index i = 0; i < rsvd.rank(); ++i) {
        const double s = rsvd.S[static_cast<std::size_t>(i)];
        if (s > cutoff && s > 0.0) {
            inv_s(i) = 1.0 / s;
            smin_kept = s;
        }
    }
    const RowMajorMatrix pinv_r =
        rsvd.V.eigen() * inv_s.asDiagonal() * rsvd.U.eigen().transpose();

    const RowMajorMatrix theta = target.eigen() * pinv_r;  // (n+l) x (n+m)
    const double residual = (target.eigen() - theta * regressor.eigen()).norm();

    SolveResult out;
    out.model.A = Matrix(RowMajorMatrix(theta.block(0, 0, n, n)));
    out.model.B = Matrix(RowMajorMatrix(theta.block(0, n, n, m)));
    out.model.C = Matrix(RowMajorMatrix(theta.block(n, 0, l, n)));
    out.model.D = Matrix(RowMajorMatrix(theta.block(n, n, l, m)));
    out.residual = residual;
    out.condition = (smin_kept > 0.0 && !rsvd.S.empty()) ? rsvd.S.front() / smin_kept
                                                         : std::numeric_limits<double>::infinity();
    out.ill_conditioned = !(out.condition < 1e12);
    return out;
}

IdentifyResult identify(const IoRecord& rec, const SidConfig& cfg, int parallel) {
    cfg.validate();
    SidDiagnostics diag;

    auto t0 = Clock::now();
    const HankelSet h = build_hankel_set(rec, cfg.N, cfg.j);
    diag.hankel_ms = ms_since(t0);

    t0 = Clock::now();
    auto [oi, oim1] = oblique_stage(h);
    diag.oblique_ms = ms_since(t0);

    t0 = Clock::now();
    const SvdStageResult svd = svd_stage(oi, cfg, parallel);
    diag.svd_ms = ms_since(t0);

    t0 = Clock::now();
    const SidIntermediate inter =
        estimate_states(svd.U1, svd.S1, oi, oim1, cfg.N, h.l);
    const auto [yi, ui] = extract_YiUi(rec, cfg.N, cfg.j);
    const SolveResult solved = solve_system(inter.Xi, inter.Xip1, yi, ui);
    diag.estimation_ms = ms_since(t0);

    diag.singular_values = svd.spectrum;
    diag.order = svd.order;
    diag.residual = solved.residual;
    diag.regressor_condition = solved.condition;
    diag.ill_conditioned = solved.ill_conditioned;

    return IdentifyResult{solved.model, svd.order, std::move(diag)};
}

}  // namespace sid
