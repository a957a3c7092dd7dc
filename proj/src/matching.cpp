#include "deltavpr/matching.hpp"

#include "deltavpr/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace deltavpr {

namespace {

double clamp_distance(double d) { return std::clamp(d, 0.0, 2.0); }

struct UnitRows {
    Matrix rows;
    std::vector<bool> zero;
};

UnitRows unit_rows(const Matrix& x) {
    UnitRows out{x, std::vector<bool>(static_cast<std::size_t>(x.rows()), false)};
    for (Eigen::Index t = 0; t < x.rows(); ++t) {
        const double norm = x.row(t).norm();
        if (norm < kZeroNorm) {
            out.zero[static_cast<std::size_t>(t)] = true;
            out.rows.row(t).setZero();
        } else {
            out.rows.row(t) /= norm;
        }
    }
    return out;
}

} // namespace

double cosine_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DataError(fmt::format("cosine distance: dimension mismatch ({} vs {})", a.size(), b.size()));
    }
    double dot = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    const double na = std::sqrt(aa);
    const double nb = std::sqrt(bb);
    if (na < kZeroNorm || nb < kZeroNorm) {
        return 1.0;
    }
    return clamp_distance(1.0 - dot / (na * nb));
}

DistanceMatrix distance_matrix(const DescriptorSeries& query, const DescriptorSeries& ref) {
    if (query.dim() != ref.dim()) {
        throw DataError(fmt::format("distance matrix: query dim {} differs from reference dim {}",
                                    query.dim(), ref.dim()));
    }
    const UnitRows q = unit_rows(query.data());
    const UnitRows r = unit_rows(ref.data());

    DistanceMatrix out{Matrix(q.rows.rows(), r.rows.rows())};
    out.values.noalias() = q.rows * r.rows.transpose();
    for (Eigen::Index i = 0; i < out.values.rows(); ++i) {
        for (Eigen::Index j = 0; j < out.values.cols(); ++j) {
            double& v = out.values(i, j);
            if (q.zero[static_cast<std::size_t>(i)] || r.zero[static_cast<std::size_t>(j)]) {
                v = 1.0;
            } else {
                v = clamp_distance(1.0 - v);
            }
        }
    }
    return out;
}

DistanceMatrix seq_match(const DistanceMatrix& m, std::size_t length) {
    if (length < 1) {
        throw ConfigError("sequence length must be >= 1");
    }
    const Eigen::Index rows = m.values.rows();
    const Eigen::Index cols = m.values.cols();
    const auto lo = -static_cast<Eigen::Index>(length / 2);
    const auto hi = static_cast<Eigen::Index>((length + 1) / 2) - 1;

    Matrix sum = Matrix::Zero(rows, cols);
    Matrix count = Matrix::Zero(rows, cols);
    for (Eigen::Index k = lo; k <= hi; ++k) {
        // Cells (q, r) with (q + k, r + k) in bounds.
        const Eigen::Index q0 = std::max<Eigen::Index>(0, -k);
        const Eigen::Index r0 = q0;
        const Eigen::Index nq = std::min(rows, rows - k) - q0;
        const Eigen::Index nr = std::min(cols, cols - k) - r0;
        if (nq <= 0 || nr <= 0) continue;
        sum.block(q0, r0, nq, nr) += m.values.block(q0 + k, r0 + k, nq, nr);
        count.block(q0, r0, nq, nr).array() += 1.0;
    }
    // k = 0 is always in range, so every count is >= 1.
    return {(sum.array() / count.array()).matrix()};
}

DistanceMatrix multi_delta_distance(const DeltaBank& query_bank, const DeltaBank& ref_bank) {
    if (query_bank.empty() || ref_bank.empty()) {
        throw ConfigError("multi-delta matching needs non-empty banks");
    }
    DistanceMatrix best;
    bool first = true;
    for (const auto& q : query_bank) {
        for (const auto& r : ref_bank) {
            DistanceMatrix m = distance_matrix(q.series, r.series);
            if (first) {
                best = std::move(m);
                first = false;
            } else {
                if (m.values.rows() != best.values.rows() || m.values.cols() != best.values.cols()) {
                    throw DataError("multi-delta banks are not frame-aligned");
                }
                best.values = best.values.cwiseMin(m.values);
            }
        }
    }
    return best;
}

MatchSet retrieve_best(const DistanceMatrix& m) {
    MatchSet out;
    const auto rows = static_cast<std::size_t>(m.values.rows());
    out.ref_index.resize(rows);
    out.distance.resize(rows);
    for (Eigen::Index q = 0; q < m.values.rows(); ++q) {
        Eigen::Index best = 0;
        double best_d = m.values(q, 0);
        for (Eigen::Index r = 1; r < m.values.cols(); ++r) {
            if (m.values(q, r) < best_d) {
                best_d = m.values(q, r);
                best = r;
            }
        }
        out.ref_index[static_cast<std::size_t>(q)] = static_cast<std::size_t>(best);
        out.distance[static_cast<std::size_t>(q)] = best_d;
    }
    return out;
}

} // namespace deltavpr
