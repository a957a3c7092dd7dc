#include "deltavpr/evaluation.hpp"

#include "deltavpr/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace deltavpr {

std::vector<bool> correct_matches(const MatchSet& matches, const GroundTruth& gt,
                                  const std::optional<PositionMatrix>& ref_positions) {
    if (matches.size() != gt.query_count()) {
        throw DataError(fmt::format("{} matches but ground truth covers {} queries", matches.size(),
                                    gt.query_count()));
    }
    if (gt.radius_mode == RadiusMode::Meters && !ref_positions) {
        throw ConfigError("meters radius mode requires reference positions");
    }
    std::vector<bool> correct(matches.size());
    for (std::size_t q = 0; q < matches.size(); ++q) {
        const std::size_t found = matches.ref_index[q];
        const std::size_t truth = gt.ref_index[q];
        double error = 0.0;
        if (gt.radius_mode == RadiusMode::Frames) {
            error = found > truth ? static_cast<double>(found - truth) : static_cast<double>(truth - found);
        } else {
            const auto rows = ref_positions->rows();
            if (static_cast<Eigen::Index>(found) >= rows || static_cast<Eigen::Index>(truth) >= rows) {
                throw DataError("reference positions do not cover every matched frame");
            }
            error = (ref_positions->row(static_cast<Eigen::Index>(found)) -
                     ref_positions->row(static_cast<Eigen::Index>(truth)))
                        .norm();
        }
        correct[q] = error <= gt.radius;
    }
    return correct;
}

PrCurve evaluate_pr(const MatchSet& matches, const GroundTruth& gt,
                    const std::optional<PositionMatrix>& ref_positions) {
    const auto correct = correct_matches(matches, gt, ref_positions);
    const std::size_t n = matches.size();
    if (n == 0) {
        throw DataError("cannot evaluate an empty match set");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return matches.distance[a] < matches.distance[b]; });

    PrCurve curve;
    curve.radius = gt.radius;
    curve.radius_mode = gt.radius_mode;
    curve.points.push_back({-std::numeric_limits<double>::infinity(), 1.0, 0.0});

    std::size_t retrieved = 0;
    std::size_t hits = 0;
    while (retrieved < n) {
        const double threshold = matches.distance[order[retrieved]];
        while (retrieved < n && matches.distance[order[retrieved]] <= threshold) {
            hits += correct[order[retrieved]] ? 1 : 0;
            ++retrieved;
        }
        curve.points.push_back({threshold, static_cast<double>(hits) / static_cast<double>(retrieved),
                                static_cast<double>(hits) / static_cast<double>(n)});
    }
    curve.precision_at_full_recall = precision_at_full_recall(curve);
    curve.max_f1 = max_f1(curve);
    return curve;
}

double precision_at_full_recall(const PrCurve& curve) {
    if (curve.points.empty()) {
        throw DataError("empty PR curve");
    }
    return curve.points.back().precision;
}

double max_f1(const PrCurve& curve) {
    if (curve.points.empty()) {
        throw DataError("empty PR curve");
    }
    double best = 0.0;
    for (const auto& p : curve.points) {
        const double denom = p.precision + p.recall;
        if (denom > 0.0) {
            best = std::max(best, 2.0 * p.precision * p.recall / denom);
        }
    }
    return best;
}

Vector dimension_scores(const DescriptorSeries& ref, const DescriptorSeries& query, const GroundTruth& gt) {
    if (ref.dim() != query.dim()) {
        throw DataError(fmt::format("dimension ranking: reference dim {} differs from query dim {}", ref.dim(),
                                    query.dim()));
    }
    gt.validate(query.frame_count(), ref.frame_count());

    const std::size_t pairs = gt.query_count();
    const auto dims = static_cast<Eigen::Index>(ref.dim());
    Matrix products(static_cast<Eigen::Index>(pairs), dims);
    for (std::size_t q = 0; q < pairs; ++q) {
        products.row(static_cast<Eigen::Index>(q)) =
            query.row(q).cwiseProduct(ref.row(gt.ref_index[q]));
    }

    Vector scores(dims);
    std::vector<double> column(pairs);
    const std::size_t mid = pairs / 2;
    for (Eigen::Index d = 0; d < dims; ++d) {
        for (std::size_t q = 0; q < pairs; ++q) column[q] = products(static_cast<Eigen::Index>(q), d);
        std::sort(column.begin(), column.end());
        scores(d) = pairs % 2 == 1 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
    }
    return scores;
}

std::vector<std::size_t> rank_dimensions(const DescriptorSeries& ref, const DescriptorSeries& query,
                                         const GroundTruth& gt, std::size_t top_k) {
    if (top_k < 1 || top_k > ref.dim()) {
        throw ConfigError(fmt::format("top_k must be in [1, {}], got {}", ref.dim(), top_k));
    }
    const Vector scores = dimension_scores(ref, query, gt);
    std::vector<std::size_t> order(ref.dim());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return scores(static_cast<Eigen::Index>(a)) > scores(static_cast<Eigen::Index>(b));
    });
    order.resize(top_k);
    return order;
}

} // namespace deltavpr
