#include "deltavpr/transform.hpp"

#include "deltavpr/error.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace deltavpr {

std::string_view to_string(Padding padding) {
    return padding == Padding::EdgeReplicate ? "edge" : "valid";
}

Padding parse_padding(std::string_view text) {
    if (text == "edge" || text == "edge-replicate") return Padding::EdgeReplicate;
    if (text == "valid" || text == "valid-only") return Padding::ValidOnly;
    throw ConfigError(fmt::format("unknown padding '{}' (expected edge or valid)", text));
}

void DeltaConfig::validate() const {
    if (window < 1) {
        throw ConfigError("delta window must be >= 1");
    }
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (spans[i] < 1) {
            throw ConfigError("delta spans must be >= 1");
        }
        if (i > 0 && spans[i] <= spans[i - 1]) {
            throw ConfigError("delta spans must be distinct and ascending");
        }
    }
}

DescriptorSeries smooth(const DescriptorSeries& series, std::size_t window) {
    const std::size_t frames = series.frame_count();
    if (window < 1) {
        throw ConfigError("smoothing window must be >= 1");
    }
    if (window > frames) {
        throw ConfigError(fmt::format("window exceeds series ({} > {} frames)", window, frames));
    }
    const std::size_t before = window / 2;
    const std::size_t after = window - before;

    const Matrix& x = series.data();
    Matrix out(x.rows(), x.cols());
    for (std::size_t t = 0; t < frames; ++t) {
        const std::size_t first = t >= before ? t - before : 0;
        const std::size_t last = std::min(frames - 1, t + after);
        const auto count = static_cast<Eigen::Index>(last - first + 1);
        out.row(static_cast<Eigen::Index>(t)) =
            x.middleRows(static_cast<Eigen::Index>(first), count).colwise().sum() / static_cast<double>(count);
    }
    const std::size_t end = frames >= after ? std::max(before, frames - after) : before;
    const FrameRange valid{std::min(before, frames), std::min(end, frames)};
    return series.with_data(std::move(out), valid);
}

std::vector<double> delta_filter(std::size_t window) {
    const double weight = 1.0 / static_cast<double>(window);
    std::vector<double> taps(2 * window, weight);
    std::fill_n(taps.begin(), window, -weight);
    return taps;
}

DescriptorSeries delta(const DescriptorSeries& series, const DeltaConfig& cfg) {
    cfg.validate();
    const std::size_t l = cfg.window;
    const std::size_t frames = series.frame_count();
    const Matrix& x = series.data();
    const auto taps = delta_filter(l);
    const auto dims = x.cols();

    if (cfg.padding == Padding::ValidOnly) {
        if (frames < 2 * l) {
            throw ConfigError(fmt::format("series too short for span ({} frames, span {} needs {})",
                                          frames, l, 2 * l));
        }
        // Output frame i is centred on source frame i + l - 1; its window
        // covers source frames [i, i + 2l).
        const auto n = static_cast<Eigen::Index>(frames - 2 * l + 1);
        Matrix out = Matrix::Zero(n, dims);
        for (std::size_t k = 0; k < taps.size(); ++k) {
            out.noalias() += taps[k] * x.middleRows(static_cast<Eigen::Index>(k), n);
        }
        std::optional<PositionMatrix> positions;
        if (series.positions()) {
            positions = series.positions()->middleRows(static_cast<Eigen::Index>(l - 1), n);
        }
        return DescriptorSeries(std::move(out), std::move(positions),
                                FrameRange{0, static_cast<std::size_t>(n)});
    }

    // Edge-replicate: l-1 copies of the first frame before, l copies of the
    // last frame after, so that output frame t lines up with source frame t.
    const auto rows = static_cast<Eigen::Index>(frames);
    const auto lead = static_cast<Eigen::Index>(l - 1);
    Matrix padded(rows + 2 * static_cast<Eigen::Index>(l) - 1, dims);
    padded.topRows(lead) = x.row(0).replicate(lead, 1);
    padded.middleRows(lead, rows) = x;
    padded.bottomRows(static_cast<Eigen::Index>(l)) = x.row(rows - 1).replicate(static_cast<Eigen::Index>(l), 1);

    Matrix out = Matrix::Zero(rows, dims);
    for (std::size_t k = 0; k < taps.size(); ++k) {
        out.noalias() += taps[k] * padded.middleRows(static_cast<Eigen::Index>(k), rows);
    }

    const std::size_t start = std::min(l - 1, frames);
    const std::size_t end = frames >= l ? std::max(start, frames - l) : start;
    return series.with_data(std::move(out), FrameRange{start, end});
}

DeltaBank delta_bank(const DescriptorSeries& series, const DeltaConfig& cfg) {
    cfg.validate();
    if (cfg.spans.empty()) {
        throw ConfigError("delta bank needs at least one span");
    }
    DeltaBank bank;
    bank.reserve(cfg.spans.size());
    for (const std::size_t span : cfg.spans) {
        DeltaConfig single{span, Padding::EdgeReplicate, {}};
        bank.push_back({span, delta(series, single)});
    }
    return bank;
}

} // namespace deltavpr
