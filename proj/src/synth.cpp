#include "deltavpr/synth.hpp"

#include "deltavpr/error.hpp"
#include "deltavpr/transform.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace deltavpr {

void validate_warp(std::span<const WarpPoint> control_points) {
    if (control_points.size() < 2) {
        throw ConfigError("a time warp needs at least two control points");
    }
    const auto& first = control_points.front();
    const auto& last = control_points.back();
    if (first.source != 0.0 || first.target != 0.0 || last.source != 1.0 || last.target != 1.0) {
        throw ConfigError("time warp control points must span (0, 0) to (1, 1)");
    }
    for (std::size_t i = 1; i < control_points.size(); ++i) {
        if (!(control_points[i].source > control_points[i - 1].source) ||
            !(control_points[i].target > control_points[i - 1].target)) {
            throw ConfigError(fmt::format("time warp control points must increase strictly (point {})", i));
        }
    }
}

std::vector<double> warp_source_positions(std::size_t frames, std::span<const WarpPoint> control_points) {
    validate_warp(control_points);
    std::vector<double> source(frames, 0.0);
    if (frames < 2) {
        return source;
    }
    const double last = static_cast<double>(frames - 1);
    std::size_t seg = 0;
    for (std::size_t i = 0; i < frames; ++i) {
        const double u = static_cast<double>(i) / last;
        while (seg + 2 < control_points.size() && u > control_points[seg + 1].target) {
            ++seg;
        }
        const auto& a = control_points[seg];
        const auto& b = control_points[seg + 1];
        const double frac = (u - a.target) / (b.target - a.target);
        source[i] = std::clamp(a.source + frac * (b.source - a.source), 0.0, 1.0) * last;
    }
    return source;
}

DescriptorSeries time_warp(const DescriptorSeries& series, std::span<const WarpPoint> control_points) {
    const auto source = warp_source_positions(series.frame_count(), control_points);
    const Matrix& x = series.data();
    const auto last = static_cast<Eigen::Index>(series.frame_count()) - 1;

    Matrix out(x.rows(), x.cols());
    std::optional<PositionMatrix> positions;
    if (series.positions()) positions = PositionMatrix(x.rows(), 2);

    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const double p = source[static_cast<std::size_t>(i)];
        const auto lo = std::min(static_cast<Eigen::Index>(std::floor(p)), last);
        const auto hi = std::min(lo + 1, last);
        const double w = p - static_cast<double>(lo);
        if (w == 0.0) {
            out.row(i) = x.row(lo);
            if (positions) positions->row(i) = series.positions()->row(lo);
        } else {
            out.row(i) = (1.0 - w) * x.row(lo) + w * x.row(hi);
            if (positions) {
                positions->row(i) = (1.0 - w) * series.positions()->row(lo) + w * series.positions()->row(hi);
            }
        }
    }
    return DescriptorSeries(std::move(out), std::move(positions));
}

void SynthParams::validate() const {
    if (frames < 2 || dims < 1) {
        throw ConfigError(fmt::format("synthetic traverse needs frames >= 2 and dims >= 1, got {}x{}", frames, dims));
    }
    if (latent_smooth_window < 1) {
        throw ConfigError("latent smoothing window must be >= 1");
    }
    if (!(offset_scale >= 0.0) || !(noise_scale >= 0.0) || !std::isfinite(offset_scale) ||
        !std::isfinite(noise_scale)) {
        throw ConfigError("offset and noise scales must be finite and >= 0");
    }
    if (offset_segments < 1 || offset_segments > frames) {
        throw ConfigError(fmt::format("offset segments must be in [1, {}]", frames));
    }
    if (!(frame_spacing > 0.0)) {
        throw ConfigError("frame spacing must be > 0");
    }
    if (!warp.empty()) {
        validate_warp(warp);
    }
}

namespace {

enum Stream : std::uint64_t { kLatent = 0, kRefOffset, kQueryOffset, kRefNoise, kQueryNoise };

std::mt19937_64 stream_rng(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

Matrix gaussian(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = normal(rng);
    }
    return m;
}

/// offset_segments rows of offsets expanded to one row per frame.
Matrix offsets(const SynthParams& p, Stream stream) {
    auto rng = stream_rng(p.seed, stream);
    const Matrix draws = p.offset_scale * gaussian(static_cast<Eigen::Index>(p.offset_segments),
                                                   static_cast<Eigen::Index>(p.dims), rng);
    Matrix out(static_cast<Eigen::Index>(p.frames), static_cast<Eigen::Index>(p.dims));
    for (std::size_t t = 0; t < p.frames; ++t) {
        out.row(static_cast<Eigen::Index>(t)) = draws.row(static_cast<Eigen::Index>(t * p.offset_segments / p.frames));
    }
    return out;
}

Matrix noise(const SynthParams& p, Stream stream) {
    auto rng = stream_rng(p.seed, stream);
    return p.noise_scale * gaussian(static_cast<Eigen::Index>(p.frames), static_cast<Eigen::Index>(p.dims), rng);
}

} // namespace

TraversePair generate_traverse_pair(const SynthParams& params) {
    params.validate();
    const auto frames = static_cast<Eigen::Index>(params.frames);
    const auto dims = static_cast<Eigen::Index>(params.dims);
    const std::size_t w = params.latent_smooth_window;

    // Extra innovations on both sides so every kept frame averages a full window.
    auto rng = stream_rng(params.seed, kLatent);
    const DescriptorSeries innovations(gaussian(frames + static_cast<Eigen::Index>(w), dims, rng));
    const Matrix latent =
        smooth(innovations, w).data().middleRows(static_cast<Eigen::Index>(w / 2), frames);

    PositionMatrix positions = PositionMatrix::Zero(frames, 2);
    for (Eigen::Index t = 0; t < frames; ++t) {
        positions(t, 0) = static_cast<double>(t) * params.frame_spacing;
    }
    const DescriptorSeries route(latent, positions);

    GroundTruth gt = identity_ground_truth(params.frames);
    DescriptorSeries warped = route;
    if (!params.warp.empty()) {
        warped = time_warp(route, params.warp);
        const auto source = warp_source_positions(params.frames, params.warp);
        for (std::size_t i = 0; i < params.frames; ++i) {
            gt.ref_index[i] = std::min(params.frames - 1, static_cast<std::size_t>(std::lround(source[i])));
        }
    }

    Matrix ref = latent + offsets(params, kRefOffset) + noise(params, kRefNoise);
    Matrix query = warped.data() + offsets(params, kQueryOffset) + noise(params, kQueryNoise);
    return {DescriptorSeries(std::move(ref), positions),
            DescriptorSeries(std::move(query), warped.positions()), std::move(gt)};
}

} // namespace deltavpr
