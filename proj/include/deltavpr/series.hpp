#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace deltavpr {

/// Row-major so that each frame's descriptor is contiguous in memory.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using PositionMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Half-open frame interval [start, end).
struct FrameRange {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - start; }
    bool contains(std::size_t t) const { return t >= start && t < end; }
    bool operator==(const FrameRange&) const = default;
};

/// An ordered stream of global descriptors along one traverse: T frames of
/// D-dimensional descriptors, optionally with planar positions (meters) and
/// the range of frames that transforms computed without padding.
///
/// Instances are immutable; every operation returns a new series.
class DescriptorSeries {
public:
    explicit DescriptorSeries(Matrix data,
                              std::optional<PositionMatrix> positions = std::nullopt,
                              std::optional<FrameRange> valid_range = std::nullopt);

    const Matrix& data() const { return data_; }
    std::size_t frame_count() const { return static_cast<std::size_t>(data_.rows()); }
    std::size_t dim() const { return static_cast<std::size_t>(data_.cols()); }

    auto row(std::size_t t) const { return data_.row(static_cast<Eigen::Index>(t)); }

    const std::optional<PositionMatrix>& positions() const { return positions_; }
    const std::optional<FrameRange>& valid_range() const { return valid_range_; }

    /// Same positions, new payload (must keep the frame count).
    DescriptorSeries with_data(Matrix data, std::optional<FrameRange> valid_range) const;

private:
    Matrix data_;
    std::optional<PositionMatrix> positions_;
    std::optional<FrameRange> valid_range_;
};

enum class RadiusMode { Frames, Meters };

std::string_view to_string(RadiusMode mode);
RadiusMode parse_radius_mode(std::string_view text);

/// The true reference frame of every query frame plus the tolerance used to
/// decide whether a retrieved match is correct.
struct GroundTruth {
    std::vector<std::size_t> ref_index;
    RadiusMode radius_mode = RadiusMode::Frames;
    double radius = 0.0;

    std::size_t query_count() const { return ref_index.size(); }

    /// Throws DataError unless there is one entry per query frame and every
    /// index lies in [0, ref_count).
    void validate(std::size_t query_count, std::size_t ref_count) const;
};

/// Query frame i corresponds to reference frame i.
GroundTruth identity_ground_truth(std::size_t frames, RadiusMode mode = RadiusMode::Frames,
                                  double radius = 0.0);

/// Scales each row to unit Euclidean norm. All-zero rows pass through.
DescriptorSeries l2_normalize(const DescriptorSeries& series);

/// Seeded uniformly random permutation of 0..n-1.
std::vector<std::size_t> random_permutation(std::size_t n, std::uint64_t seed);
std::vector<std::size_t> invert_permutation(std::span<const std::size_t> permutation);

struct TraversePair {
    DescriptorSeries ref;
    DescriptorSeries query;
    GroundTruth gt;
};

/// Reorders both traverses with the same permutation: new frame i holds old
/// frame permutation[i]. Ground truth is remapped so cross-traverse
/// correspondence survives while within-traverse adjacency does not.
TraversePair apply_permutation(const DescriptorSeries& ref, const DescriptorSeries& query,
                               const GroundTruth& gt, std::span<const std::size_t> permutation);

TraversePair apply_permutation(const DescriptorSeries& ref, const DescriptorSeries& query,
                               const GroundTruth& gt, std::uint64_t seed);

} // namespace deltavpr
