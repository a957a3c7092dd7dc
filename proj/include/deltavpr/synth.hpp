#pragma once

#include "deltavpr/series.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace deltavpr {

/// Maps a normalized output time (target) to a normalized input time (source).
struct WarpPoint {
    double source;
    double target;
};

/// Throws ConfigError unless the points start at (0, 0), end at (1, 1) and
/// increase strictly in both coordinates.
void validate_warp(std::span<const WarpPoint> control_points);

/// Fractional source frame sampled by each of `frames` output frames.
std::vector<double> warp_source_positions(std::size_t frames, std::span<const WarpPoint> control_points);

/// Resamples the rows (and positions) by linear interpolation at the warped
/// source times. Length is preserved.
DescriptorSeries time_warp(const DescriptorSeries& series, std::span<const WarpPoint> control_points);

/// Traverse-pair generator. All scales are relative to the unit-variance
/// Gaussian innovations that drive the latent signal.
struct SynthParams {
    std::size_t frames = 2000;
    std::size_t dims = 128;
    /// Rolling-mean window applied to the innovations; sets how quickly
    /// visual overlap between frames decays.
    std::size_t latent_smooth_window = 20;
    /// Standard deviation of the per-traverse constant offset.
    double offset_scale = 0.0;
    /// Standard deviation of independent per-frame noise.
    double noise_scale = 0.0;
    /// Piecewise-linear time warp applied to the query; empty means none.
    std::vector<WarpPoint> warp;
    std::uint64_t seed = 0;
    /// Number of equal-length segments with independent offsets; 1 keeps the
    /// offset constant over the traverse.
    std::size_t offset_segments = 1;
    /// Distance in meters between consecutive reference frames.
    double frame_spacing = 1.0;

    void validate() const;
};

/// Reference and query traverses sharing one latent route signal, each with
/// its own offset and noise. Ground truth maps each query frame to the
/// nearest reference frame it was warped from; radius defaults to 0 frames.
TraversePair generate_traverse_pair(const SynthParams& params);

} // namespace deltavpr
