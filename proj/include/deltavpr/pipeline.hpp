#pragma once

#include "deltavpr/evaluation.hpp"
#include "deltavpr/matching.hpp"
#include "deltavpr/series.hpp"
#include "deltavpr/transform.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

namespace deltavpr {

enum class TransformKind { Raw, Smooth, Delta, MultiDelta };
enum class PcaFitSource { Reference, Query, Both };

std::string_view to_string(TransformKind kind);
TransformKind parse_transform(std::string_view text);
std::string_view to_string(PcaFitSource source);
PcaFitSource parse_pca_fit(std::string_view text);

/// Everything between "two descriptor series" and "a PR curve".
struct PipelineOptions {
    TransformKind transform = TransformKind::Delta;
    std::size_t window = 16;
    std::vector<std::size_t> spans;
    Padding padding = Padding::EdgeReplicate;
    /// 1 disables sequence matching.
    std::size_t seqmatch_length = 1;
    /// 0 disables PCA.
    std::size_t pca_k = 0;
    PcaFitSource pca_fit = PcaFitSource::Reference;
    bool pca_center = true;
    bool pca_whiten = false;
    /// Score only query frames whose transform needed no padding.
    bool exclude_padding = false;

    void validate() const;
};

/// A transformed traverse: one series, or one per span for multi-delta.
/// `origin` is the source frame of output frame 0 (non-zero only for
/// valid-only delta).
struct TransformedSeries {
    std::vector<DescriptorSeries> members;
    std::vector<std::size_t> spans;
    std::size_t origin = 0;
};

TransformedSeries transform_series(const DescriptorSeries& series, const PipelineOptions& options);

/// Optional PCA, distances (min over members), optional sequence matching.
DistanceMatrix match_series(const TransformedSeries& query, const TransformedSeries& ref,
                            const PipelineOptions& options);

struct Evaluation {
    std::vector<std::size_t> query_frames;  ///< source frame index of each scored query
    MatchSet matches;                       ///< reference indices in source frames
    std::vector<bool> correct;
    PrCurve curve;
};

/// Retrieves best matches and scores them against source-frame ground truth.
/// `scored` restricts which rows of the matrix count; empty means all.
Evaluation evaluate_matrix(const DistanceMatrix& m, const GroundTruth& gt,
                           const std::optional<PositionMatrix>& ref_positions, std::size_t query_origin = 0,
                           std::size_t ref_origin = 0, std::optional<FrameRange> scored = std::nullopt);

struct PipelineResult {
    DistanceMatrix distances;
    Evaluation evaluation;
};

/// In-memory pipeline: transform -> PCA -> distances -> seqmatch -> retrieve -> evaluate.
PipelineResult run_pair(const DescriptorSeries& ref, const DescriptorSeries& query, const GroundTruth& gt,
                        const PipelineOptions& options);

/// File inputs and outputs around run_pair().
struct RunConfig {
    std::filesystem::path ref_path;
    std::filesystem::path query_path;
    std::optional<std::filesystem::path> ref_positions_path;
    std::optional<std::filesystem::path> query_positions_path;
    /// Without ground truth, query frame i is assumed to match reference frame i.
    std::optional<std::filesystem::path> gt_path;
    PipelineOptions options;
    double radius = 0.0;
    RadiusMode radius_mode = RadiusMode::Frames;
    std::filesystem::path output_dir = ".";

    void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& cfg);

/// The JSON summary written next to the match and PR CSVs.
nlohmann::json summary_json(const PrCurve& curve, const PipelineOptions& options);

/// Writes matches.csv, pr.csv and summary.json into the output directory.
void write_outputs(const std::filesystem::path& dir, const Evaluation& evaluation, const PipelineOptions& options);

/// Reads the inputs, runs the pipeline and writes outputs. Errors keep their
/// type (ConfigError / DataError) and are prefixed with the failing stage.
PipelineResult run_pipeline(const RunConfig& cfg);

} // namespace deltavpr
