#pragma once

#include "deltavpr/series.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace deltavpr {

enum class Padding {
    /// Repeat the first/last frame; output keeps all T frames.
    EdgeReplicate,
    /// Only frames whose full window lies inside the series; T - 2l + 1 frames.
    ValidOnly,
};

std::string_view to_string(Padding padding);
Padding parse_padding(std::string_view text);

struct DeltaConfig {
    std::size_t window = 16;
    Padding padding = Padding::EdgeReplicate;
    /// Spans for a multi-delta bank; distinct, ascending.
    std::vector<std::size_t> spans;

    void validate() const;
};

struct DeltaBankEntry {
    std::size_t span;
    DescriptorSeries series;
};

/// One delta series per span, all frame-aligned with the source series.
using DeltaBank = std::vector<DeltaBankEntry>;

/// Centered rolling mean over frames [t - floor(l/2), t + ceil(l/2)], divided
/// by the number of frames that fall inside the series.
DescriptorSeries smooth(const DescriptorSeries& series, std::size_t window);

/// The 2l-tap filter: first l taps -1/l, last l taps +1/l.
std::vector<double> delta_filter(std::size_t window);

/// Change descriptor per frame: mean of the next l frames minus the mean of
/// the current and previous l-1 frames, computed as a sliding dot product of
/// the filter from delta_filter() along time, independently per dimension.
DescriptorSeries delta(const DescriptorSeries& series, const DeltaConfig& cfg);

/// delta() for every span in cfg.spans, always with edge-replicate padding.
DeltaBank delta_bank(const DescriptorSeries& series, const DeltaConfig& cfg);

} // namespace deltavpr
