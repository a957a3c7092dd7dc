#pragma once

// Independent reference computations used only by the tests. Everything here
// is written directly from the definitions, with plain loops and no calls into
// the library's numerical code.

#include "deltavpr/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

using deltavpr::Matrix;

inline Matrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, scale);
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = normal(rng);
    return m;
}

inline deltavpr::DescriptorSeries random_series(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    return deltavpr::DescriptorSeries(random_matrix(rows, cols, seed));
}

/// Mean of frames (t, t+l] minus mean of frames (t-l, t], valid frames only:
/// row i of the result is centred on source frame i + l - 1.
inline Matrix delta_by_means(const Matrix& x, std::size_t l) {
    const std::size_t frames = static_cast<std::size_t>(x.rows());
    const std::size_t n = frames - 2 * l + 1;
    Matrix out(static_cast<Eigen::Index>(n), x.cols());
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t t = i + l - 1;
        for (Eigen::Index d = 0; d < x.cols(); ++d) {
            double lead = 0.0;
            double trail = 0.0;
            for (std::size_t k = 1; k <= l; ++k) lead += x(static_cast<Eigen::Index>(t + k), d);
            for (std::size_t k = 0; k < l; ++k) trail += x(static_cast<Eigen::Index>(t - k), d);
            out(static_cast<Eigen::Index>(i), d) = lead / static_cast<double>(l) - trail / static_cast<double>(l);
        }
    }
    return out;
}

/// Same as delta_by_means but every frame, clamping indices to the series.
inline Matrix delta_by_means_clamped(const Matrix& x, std::size_t l) {
    const auto frames = static_cast<long>(x.rows());
    Matrix out(x.rows(), x.cols());
    auto at = [&](long t, Eigen::Index d) { return x(std::clamp(t, 0L, frames - 1), d); };
    for (long t = 0; t < frames; ++t) {
        for (Eigen::Index d = 0; d < x.cols(); ++d) {
            double lead = 0.0;
            double trail = 0.0;
            for (long k = 1; k <= static_cast<long>(l); ++k) lead += at(t + k, d);
            for (long k = 0; k < static_cast<long>(l); ++k) trail += at(t - k, d);
            out(t, d) = (lead - trail) / static_cast<double>(l);
        }
    }
    return out;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (std::sqrt(aa) < 1e-12 || std::sqrt(bb) < 1e-12) return 1.0;
    return 1.0 - dot / std::sqrt(aa * bb);
}

inline std::vector<double> row(const Matrix& m, Eigen::Index i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    return r;
}

inline Matrix distances(const Matrix& q, const Matrix& r) {
    Matrix out(q.rows(), r.rows());
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = 0; j < r.rows(); ++j) out(i, j) = cosine(row(q, i), row(r, j));
    return out;
}

inline Matrix seq_match(const Matrix& m, std::size_t length) {
    const long lo = -static_cast<long>(length / 2);
    const long hi = static_cast<long>((length + 1) / 2) - 1;
    Matrix out(m.rows(), m.cols());
    for (long q = 0; q < m.rows(); ++q) {
        for (long r = 0; r < m.cols(); ++r) {
            double sum = 0;
            int count = 0;
            for (long k = lo; k <= hi; ++k) {
                if (q + k >= 0 && q + k < m.rows() && r + k >= 0 && r + k < m.cols()) {
                    sum += m(q + k, r + k);
                    ++count;
                }
            }
            out(q, r) = sum / count;
        }
    }
    return out;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace oracle
