#include "deltavpr/series.hpp"

#include "deltavpr/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace deltavpr {

DescriptorSeries::DescriptorSeries(Matrix data, std::optional<PositionMatrix> positions,
                                   std::optional<FrameRange> valid_range)
    : data_(std::move(data)), positions_(std::move(positions)), valid_range_(valid_range) {
    if (data_.rows() < 1 || data_.cols() < 1) {
        throw DataError(fmt::format("descriptor series must be at least 1x1, got {}x{}",
                                    data_.rows(), data_.cols()));
    }
    for (Eigen::Index t = 0; t < data_.rows(); ++t) {
        for (Eigen::Index d = 0; d < data_.cols(); ++d) {
            if (!std::isfinite(data_(t, d))) {
                throw DataError(fmt::format("non-finite descriptor value at row {}, column {}", t, d));
            }
        }
    }
    if (positions_ && positions_->rows() != data_.rows()) {
        throw DataError(fmt::format("positions have {} rows but series has {} frames",
                                    positions_->rows(), data_.rows()));
    }
    if (valid_range_ && (valid_range_->start > valid_range_->end || valid_range_->end > frame_count())) {
        throw DataError(fmt::format("valid range [{}, {}) outside series of {} frames",
                                    valid_range_->start, valid_range_->end, frame_count()));
    }
}

DescriptorSeries DescriptorSeries::with_data(Matrix data, std::optional<FrameRange> valid_range) const {
    if (data.rows() != data_.rows()) {
        throw DataError("with_data: frame count changed");
    }
    return DescriptorSeries(std::move(data), positions_, valid_range);
}

std::string_view to_string(RadiusMode mode) {
    return mode == RadiusMode::Frames ? "frames" : "meters";
}

RadiusMode parse_radius_mode(std::string_view text) {
    if (text == "frames") return RadiusMode::Frames;
    if (text == "meters") return RadiusMode::Meters;
    throw ConfigError(fmt::format("unknown radius mode '{}' (expected frames or meters)", text));
}

void GroundTruth::validate(std::size_t query_count, std::size_t ref_count) const {
    if (ref_index.size() != query_count) {
        throw DataError(fmt::format("ground truth has {} entries for {} query frames",
                                    ref_index.size(), query_count));
    }
    for (std::size_t q = 0; q < ref_index.size(); ++q) {
        if (ref_index[q] >= ref_count) {
            throw DataError(fmt::format("ground truth for query {} points to reference {} (only {} frames)",
                                        q, ref_index[q], ref_count));
        }
    }
    if (!(radius >= 0.0) || !std::isfinite(radius)) {
        throw ConfigError(fmt::format("localization radius must be finite and >= 0, got {}", radius));
    }
}

GroundTruth identity_ground_truth(std::size_t frames, RadiusMode mode, double radius) {
    GroundTruth gt;
    gt.ref_index.resize(frames);
    std::iota(gt.ref_index.begin(), gt.ref_index.end(), std::size_t{0});
    gt.radius_mode = mode;
    gt.radius = radius;
    return gt;
}

DescriptorSeries l2_normalize(const DescriptorSeries& series) {
    Matrix out = series.data();
    for (Eigen::Index t = 0; t < out.rows(); ++t) {
        const double norm = out.row(t).norm();
        if (norm > 0.0) {
            out.row(t) /= norm;
        }
    }
    return series.with_data(std::move(out), series.valid_range());
}

std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(perm.begin(), perm.end(), rng);
    return perm;
}

std::vector<std::size_t> invert_permutation(std::span<const std::size_t> permutation) {
    std::vector<std::size_t> inverse(permutation.size(), permutation.size());
    for (std::size_t i = 0; i < permutation.size(); ++i) {
        if (permutation[i] >= permutation.size() || inverse[permutation[i]] != permutation.size()) {
            throw ConfigError("not a permutation");
        }
        inverse[permutation[i]] = i;
    }
    return inverse;
}

namespace {

DescriptorSeries permute_rows(const DescriptorSeries& series, std::span<const std::size_t> perm) {
    const auto n = static_cast<Eigen::Index>(perm.size());
    Matrix data(n, series.data().cols());
    std::optional<PositionMatrix> positions;
    if (series.positions()) positions = PositionMatrix(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto src = static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]);
        data.row(i) = series.data().row(src);
        if (positions) positions->row(i) = series.positions()->row(src);
    }
    // Padding-affected frames are scattered after a shuffle.
    return DescriptorSeries(std::move(data), std::move(positions));
}

} // namespace

TraversePair apply_permutation(const DescriptorSeries& ref, const DescriptorSeries& query,
                               const GroundTruth& gt, std::span<const std::size_t> permutation) {
    if (ref.frame_count() != query.frame_count()) {
        throw DataError(fmt::format("shuffle needs equal-length traverses, got {} reference and {} query frames",
                                    ref.frame_count(), query.frame_count()));
    }
    gt.validate(query.frame_count(), ref.frame_count());
    if (permutation.size() != ref.frame_count()) {
        throw ConfigError("permutation length differs from frame count");
    }
    const auto inverse = invert_permutation(permutation);

    GroundTruth remapped = gt;
    for (std::size_t i = 0; i < permutation.size(); ++i) {
        remapped.ref_index[i] = inverse[gt.ref_index[permutation[i]]];
    }
    return {permute_rows(ref, permutation), permute_rows(query, permutation), std::move(remapped)};
}

TraversePair apply_permutation(const DescriptorSeries& ref, const DescriptorSeries& query,
                               const GroundTruth& gt, std::uint64_t seed) {
    const auto perm = random_permutation(ref.frame_count(), seed);
    return apply_permutation(ref, query, gt, perm);
}

} // namespace deltavpr
