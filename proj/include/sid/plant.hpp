#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "sid/matrix.hpp"

namespace sid {

/// Discrete-time linear state-space model
///   x(k+1) = A x(k) + B u(k)
///   y(k)   = C x(k) + D u(k)
/// with A n x n, B n x m, C l x n, D l x m.
struct StateSpaceModel {
    Matrix A;
    Matrix B;
    Matrix C;
    Matrix D;

    Index n() const { return A.rows(); }
    Index m() const { return B.cols(); }
    Index l() const { return C.rows(); }

    /// Throws DimensionMismatch unless all four blocks are consistent.
    void validate() const;
};

/// Input/output record of an experiment. One row per sample: u is L x m,
/// y is L x l.
struct IoRecord {
    Matrix u;
    Matrix y;

    Index length() const { return u.rows(); }
    Index m() const { return u.cols(); }
    Index l() const { return y.cols(); }
};

/// The marginally stable two-state plant used as the default identification
/// target throughout the experiments.
StateSpaceModel ball_beam();

/// Runs the state recurrences exactly. u is L x m; x0 has length n (empty
/// means the zero state).
IoRecord simulate(const StateSpaceModel& model, const Matrix& u,
                  const std::vector<double>& x0 = {});

/// Reproducible zero-mean unit-variance white excitation, L x m.
Matrix gen_excitation(Index length, Index channels, std::uint64_t seed);

/// Impulse-response terms D, CB, CAB, ..., CA^(count-2)B: the
/// similarity-invariant fingerprint of a model.
std::vector<Matrix> markov_parameters(const StateSpaceModel& model, int count);

/// CSV with header "u1,..,um,y1,..,yl", one sample per line, full precision
/// (17 significant digits): values round-trip exactly.
void write_csv(std::ostream& out, const IoRecord& rec);
void write_csv(const std::filesystem::path& path, const IoRecord& rec);
IoRecord read_csv(std::istream& in);
IoRecord read_csv(const std::filesystem::path& path);

}  // namespace sid
