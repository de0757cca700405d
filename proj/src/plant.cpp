#include "sid/plant.hpp"

#include <charconv>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

namespace sid {

void StateSpaceModel::validate() const {
    if (A.rows() != A.cols()) throw DimensionMismatch("A must be square");
    if (B.rows() != A.rows()) throw DimensionMismatch("B row count must equal n");
    if (C.cols() != A.rows()) throw DimensionMismatch("C column count must equal n");
    if (D.rows() != C.rows() || D.cols() != B.cols()) {
        throw DimensionMismatch("D must be l x m");
    }
}

StateSpaceModel ball_beam() {
    StateSpaceModel model;
    model.A = Matrix{{2.0, -1.0}, {1.0, 0.0}};
    model.B = Matrix{{1.0}, {0.0}};
    model.C = Matrix{{0.00014, 0.00014}};
    model.D = Matrix{{0.0}};
    return model;
}

IoRecord simulate(const StateSpaceModel& model, const Matrix& u,
                  const std::vector<double>& x0) {
    model.validate();
    if (u.cols() != model.m()) {
        throw DimensionMismatch("input channel count does not match the model");
    }
    const Index n = model.n();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (!x0.empty()) {
        if (static_cast<Index>(x0.size()) != n) {
            throw DimensionMismatch("initial state length does not match n");
        }
        x = Eigen::Map<const Eigen::VectorXd>(x0.data(), n);
    }

    const Index L = u.rows();
    RowMajorMatrix y(L, model.l());
    for (Index k = 0; k < L; ++k) {
        const auto uk = u.eigen().row(k).transpose();
        y.row(k) = (model.C.eigen() * x + model.D.eigen() * uk).transpose();
        x = model.A.eigen() * x + model.B.eigen() * uk;
    }
    return IoRecord{u, Matrix(std::move(y))};
}

Matrix gen_excitation(Index length, Index channels, std::uint64_t seed) {
    if (length < 1 || channels < 1) {
        throw InvalidShape("excitation length and channel count must be >= 1");
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    RowMajorMatrix u(length, channels);
    for (Index k = 0; k < length; ++k) {
        for (Index c = 0; c < channels; ++c) u(k, c) = gauss(rng);
    }
    return Matrix(std::move(u));
}

std::vector<Matrix> markov_parameters(const StateSpaceModel& model, int count) {
    model.validate();
    std::vector<Matrix> params;
    params.reserve(static_cast<std::size_t>(count));
    if (count <= 0) return params;
    params.push_back(model.D);
    RowMajorMatrix power = model.B.eigen();  // A^k B
    for (int k = 1; k < count; ++k) {
        params.push_back(Matrix::from(model.C.eigen() * power));
        power = model.A.eigen() * power;
    }
    return params;
}

namespace {

std::string format_full(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(std::ostream& out, const IoRecord& rec) {
    if (rec.u.rows() != rec.y.rows()) {
        throw DimensionMismatch("record input and output lengths differ");
    }
    for (Index c = 0; c < rec.m(); ++c) out << (c ? "," : "") << "u" << (c + 1);
    for (Index c = 0; c < rec.l(); ++c) out << ",y" << (c + 1);
    out << "\n";
    for (Index k = 0; k < rec.length(); ++k) {
        for (Index c = 0; c < rec.m(); ++c) {
            out << (c ? "," : "") << format_full(rec.u(k, c));
        }
        for (Index c = 0; c < rec.l(); ++c) out << "," << format_full(rec.y(k, c));
        out << "\n";
    }
}

void write_csv(const std::filesystem::path& path, const IoRecord& rec) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw SerializationError("cannot open " + path.string() + " for writing");
    write_csv(out, rec);
}

IoRecord read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SerializationError("empty CSV stream");

    Index m = 0;
    Index l = 0;
    {
        std::stringstream header(line);
        std::string field;
        while (std::getline(header, field, ',')) {
            if (field.starts_with("u")) {
                ++m;
            } else if (field.starts_with("y")) {
                ++l;
            } else {
                throw SerializationError("unexpected CSV header field: " + field);
            }
        }
    }
    if (m < 1 || l < 1) throw SerializationError("CSV header must list u and y channels");

    std::vector<double> uvals;
    std::vector<double> yvals;
    Index rows = 0;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        Index col = 0;
        while (std::getline(ss, field, ',')) {
            double v = 0.0;
            const char* begin = field.data();
            const char* end = begin + field.size();
            auto [ptr, ec] = std::from_chars(begin, end, v);
            if (ec != std::errc() || ptr != end) {
                throw SerializationError("bad number at CSV line " +
                                         std::to_string(line_no) + ": " + field);
            }
            if (col < m) {
                uvals.push_back(v);
            } else {
                yvals.push_back(v);
            }
            ++col;
        }
        if (col != m + l) {
            throw SerializationError("wrong field count at CSV line " +
                                     std::to_string(line_no));
        }
        ++rows;
    }
    return IoRecord{Matrix(rows, m, std::move(uvals)), Matrix(rows, l, std::move(yvals))};
}

IoRecord read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SerializationError("cannot open " + path.string());
    return read_csv(in);
}

}  // namespace sid
