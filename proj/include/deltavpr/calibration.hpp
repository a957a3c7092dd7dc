#pragma once

#include "deltavpr/series.hpp"

#include <cstddef>
#include <vector>

namespace deltavpr {

inline constexpr double kDefaultSpanThreshold = 0.7;

/// Median cosine distance between frames d apart, for d = 1..d_max.
struct SelfDistanceProfile {
    std::vector<std::size_t> offsets;
    std::vector<double> median_distance;

    std::size_t size() const { return offsets.size(); }
};

SelfDistanceProfile self_distance_profile(const DescriptorSeries& series, std::size_t d_max);

/// Smallest frame offset whose median distance reaches the threshold: a lower
/// bound on the sequential span for delta descriptors.
std::size_t estimate_span(const SelfDistanceProfile& profile, double threshold = kDefaultSpanThreshold);

/// The d_max used when none is given: T/4 capped at 512, at least 1, below T.
std::size_t default_profile_depth(std::size_t frames);

} // namespace deltavpr
