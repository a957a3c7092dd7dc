#pragma once

#include "deltavpr/matching.hpp"
#include "deltavpr/series.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace deltavpr {

struct PrPoint {
    double threshold;
    double precision;
    double recall;
};

/// Precision-recall curve from sweeping a distance threshold over the best
/// matches. The first point has threshold -inf (nothing retrieved, P = 1, R = 0);
/// each following point corresponds to one distinct observed distance.
struct PrCurve {
    std::vector<PrPoint> points;
    double precision_at_full_recall = 0.0;
    double max_f1 = 0.0;
    double radius = 0.0;
    RadiusMode radius_mode = RadiusMode::Frames;
};

/// Whether each query's best match lies within the localization radius of its
/// true reference frame. Meters mode compares reference positions of the
/// matched and the true frame.
std::vector<bool> correct_matches(const MatchSet& matches, const GroundTruth& gt,
                                  const std::optional<PositionMatrix>& ref_positions = std::nullopt);

/// Recall is correct retrievals over all queries; precision is correct
/// retrievals over retrievals, 1 when nothing is retrieved.
PrCurve evaluate_pr(const MatchSet& matches, const GroundTruth& gt,
                    const std::optional<PositionMatrix>& ref_positions = std::nullopt);

/// Precision once every query's best match is retrieved (the last point).
double precision_at_full_recall(const PrCurve& curve);

double max_f1(const PrCurve& curve);

/// Per-dimension median, over ground-truth pairs, of the elementwise product
/// of the query and reference descriptors.
Vector dimension_scores(const DescriptorSeries& ref, const DescriptorSeries& query, const GroundTruth& gt);

/// The top_k dimensions by dimension_scores(), descending; ties keep the
/// lower index first.
std::vector<std::size_t> rank_dimensions(const DescriptorSeries& ref, const DescriptorSeries& query,
                                         const GroundTruth& gt, std::size_t top_k);

} // namespace deltavpr
