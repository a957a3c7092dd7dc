#pragma once

#include "deltavpr/series.hpp"

#include <cstddef>

namespace deltavpr {

struct PcaOptions {
    /// Subtract the fitting data's column means. Without centering the
    /// components are those of the raw second-moment matrix.
    bool center = true;
    /// Scale every projected coordinate to unit variance.
    bool whiten = false;
};

struct PcaModel {
    Vector mean;                ///< D, zero when fitted without centering
    Matrix components;          ///< D x k, orthonormal columns
    Vector explained_variance;  ///< k, non-increasing
    bool whiten = false;

    std::size_t input_dim() const { return static_cast<std::size_t>(components.rows()); }
    std::size_t k() const { return static_cast<std::size_t>(components.cols()); }
};

/// Principal components of the series rows via an SVD of the (centred) data.
/// Each component is signed so that its largest-magnitude entry is positive.
PcaModel pca_fit(const DescriptorSeries& series, std::size_t k, const PcaOptions& options = {});

/// Rows mapped to (x - mean) * components, keeping positions and valid range.
DescriptorSeries pca_transform(const PcaModel& model, const DescriptorSeries& series);

/// Inverse map back into descriptor space: z * components^T + mean.
Matrix pca_reconstruct(const PcaModel& model, const Matrix& coordinates);

} // namespace deltavpr
