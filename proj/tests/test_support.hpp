#pragma once

#include <random>

#include <Eigen/Dense>

#include "sid/matrix.hpp"
#include "sid/plant.hpp"

namespace sid::test {

inline Matrix random_matrix(Index rows, Index cols, std::uint32_t seed,
                            double scale = 1.0) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> gauss(0.0, scale);
    RowMajorMatrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        for (Index c = 0; c < cols; ++c) m(r, c) = gauss(rng);
    }
    return Matrix(std::move(m));
}

/// Exact rank-r matrix from an outer product of random factors.
inline Matrix random_low_rank(Index rows, Index cols, Index rank, std::uint32_t seed) {
    const Matrix left = random_matrix(rows, rank, seed);
    const Matrix right = random_matrix(rank, cols, seed + 7919);
    return Matrix::from(left.eigen() * right.eigen());
}

/// Pseudo-inverse through a route independent of the library's SVD kernel.
inline Eigen::MatrixXd oracle_pinv(const Eigen::MatrixXd& m) {
    return m.completeOrthogonalDecomposition().pseudoInverse();
}

inline IoRecord ball_beam_record(Index N, Index j, std::uint64_t seed) {
    const Index length = 2 * N + j - 1;
    return simulate(ball_beam(), gen_excitation(length, 1, seed));
}

/// Random stable state-space model: spectral radius scaled to 0.9.
inline StateSpaceModel random_stable_model(Index n, Index m, Index l,
                                           std::uint32_t seed) {
    Matrix a = random_matrix(n, n, seed);
    const double radius = a.eigen().eigenvalues().cwiseAbs().maxCoeff();
    StateSpaceModel model;
    model.A = Matrix::from(a.eigen() * (0.9 / radius));
    model.B = random_matrix(n, m, seed + 1);
    model.C = random_matrix(l, n, seed + 2);
    model.D = random_matrix(l, m, seed + 3);
    return model;
}

/// Worst relative elementwise disagreement between two Markov parameter
/// sequences, scaled by the largest entry of the reference sequence.
inline double markov_delta(const std::vector<Matrix>& truth,
                           const std::vector<Matrix>& estimate) {
    double scale = 0.0;
    for (const auto& mk : truth) {
        if (!mk.empty()) scale = std::max(scale, mk.eigen().cwiseAbs().maxCoeff());
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double delta =
            (truth[i].eigen() - estimate[i].eigen()).cwiseAbs().maxCoeff();
        worst = std::max(worst, delta / scale);
    }
    return worst;
}

}  // namespace sid::test
