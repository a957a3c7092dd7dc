#include "deltavpr/calibration.hpp"

#include "deltavpr/error.hpp"
#include "deltavpr/matching.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <span>

namespace deltavpr {

namespace {

double median(std::vector<double> values) {
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

std::span<const double> row_span(const Matrix& m, std::size_t t) {
    return {m.data() + t * static_cast<std::size_t>(m.cols()), static_cast<std::size_t>(m.cols())};
}

} // namespace

SelfDistanceProfile self_distance_profile(const DescriptorSeries& series, std::size_t d_max) {
    const std::size_t frames = series.frame_count();
    if (d_max < 1 || d_max >= frames) {
        throw ConfigError(fmt::format("profile depth must be in [1, {}), got {}", frames, d_max));
    }
    SelfDistanceProfile profile;
    profile.offsets.reserve(d_max);
    profile.median_distance.reserve(d_max);

    std::vector<double> pair_distances;
    for (std::size_t d = 1; d <= d_max; ++d) {
        pair_distances.clear();
        for (std::size_t t = 0; t + d < frames; ++t) {
            pair_distances.push_back(cosine_distance(row_span(series.data(), t), row_span(series.data(), t + d)));
        }
        profile.offsets.push_back(d);
        profile.median_distance.push_back(median(pair_distances));
    }
    return profile;
}

std::size_t estimate_span(const SelfDistanceProfile& profile, double threshold) {
    if (profile.offsets.empty()) {
        throw ConfigError("self-distance profile is empty");
    }
    if (!(threshold > 0.0 && threshold < 2.0)) {
        throw ConfigError(fmt::format("span threshold must be in (0, 2), got {}", threshold));
    }
    for (std::size_t i = 0; i < profile.size(); ++i) {
        if (profile.median_distance[i] >= threshold) {
            return profile.offsets[i];
        }
    }
    throw DataError(fmt::format("profile never crosses threshold {}; increase d_max or lower threshold", threshold));
}

std::size_t default_profile_depth(std::size_t frames) {
    if (frames < 2) {
        throw DataError("a self-distance profile needs at least 2 frames");
    }
    return std::clamp<std::size_t>(std::min<std::size_t>(frames / 4, 512), 1, frames - 1);
}

} // namespace deltavpr
