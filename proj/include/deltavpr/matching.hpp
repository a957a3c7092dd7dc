#pragma once

#include "deltavpr/series.hpp"
#include "deltavpr/transform.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace deltavpr {

/// Descriptors with a norm below this are treated as zero vectors.
inline constexpr double kZeroNorm = 1e-12;

/// Q x R cosine distances, query frames along rows.
struct DistanceMatrix {
    Matrix values;

    std::size_t query_count() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t ref_count() const { return static_cast<std::size_t>(values.cols()); }
};

/// Best reference frame per query frame.
struct MatchSet {
    std::vector<std::size_t> ref_index;
    std::vector<double> distance;

    std::size_t size() const { return ref_index.size(); }
};

/// 1 - cos(a, b). A zero vector is maximally uninformative: distance 1.
double cosine_distance(std::span<const double> a, std::span<const double> b);

DistanceMatrix distance_matrix(const DescriptorSeries& query, const DescriptorSeries& ref);

/// Averages each entry with its neighbours along the diagonal, over offsets
/// k in [-floor(L/2), ceil(L/2) - 1]; out-of-bounds cells are left out of
/// both the sum and the count.
DistanceMatrix seq_match(const DistanceMatrix& m, std::size_t length);

/// Elementwise minimum over every (query span, reference span) combination.
DistanceMatrix multi_delta_distance(const DeltaBank& query_bank, const DeltaBank& ref_bank);

/// Row-wise argmin; ties go to the lowest reference index.
MatchSet retrieve_best(const DistanceMatrix& m);

} // namespace deltavpr
