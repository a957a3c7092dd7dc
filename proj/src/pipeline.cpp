#include "deltavpr/pipeline.hpp"

#include "deltavpr/error.hpp"
#include "deltavpr/io.hpp"
#include "deltavpr/reduction.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>

namespace deltavpr {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(TransformKind kind) {
    switch (kind) {
    case TransformKind::Raw:
        return "raw";
    case TransformKind::Smooth:
        return "smooth";
    case TransformKind::Delta:
        return "delta";
    case TransformKind::MultiDelta:
        return "multi-delta";
    }
    return "?";
}

TransformKind parse_transform(std::string_view text) {
    if (text == "raw") return TransformKind::Raw;
    if (text == "smooth") return TransformKind::Smooth;
    if (text == "delta") return TransformKind::Delta;
    if (text == "multi-delta") return TransformKind::MultiDelta;
    throw ConfigError(fmt::format("unknown transform '{}' (expected raw, smooth, delta or multi-delta)", text));
}

std::string_view to_string(PcaFitSource source) {
    switch (source) {
    case PcaFitSource::Reference:
        return "reference";
    case PcaFitSource::Query:
        return "query";
    case PcaFitSource::Both:
        return "both";
    }
    return "?";
}

PcaFitSource parse_pca_fit(std::string_view text) {
    if (text == "reference" || text == "ref") return PcaFitSource::Reference;
    if (text == "query") return PcaFitSource::Query;
    if (text == "both") return PcaFitSource::Both;
    throw ConfigError(fmt::format("unknown PCA fit source '{}' (expected reference, query or both)", text));
}

namespace {

template <typename F>
decltype(auto) in_stage(std::string_view stage, F&& f) {
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(fmt::format("{}: {}", stage, e.what()));
    } catch (const DataError& e) {
        throw DataError(fmt::format("{}: {}", stage, e.what()));
    }
}

DescriptorSeries stack_rows(const DescriptorSeries& a, const DescriptorSeries& b) {
    if (a.dim() != b.dim()) {
        throw DataError("cannot fit PCA on traverses of different dimension");
    }
    Matrix both(a.data().rows() + b.data().rows(), a.data().cols());
    both << a.data(), b.data();
    return DescriptorSeries(std::move(both));
}

DeltaBank as_bank(const TransformedSeries& t) {
    DeltaBank bank;
    for (std::size_t i = 0; i < t.members.size(); ++i) {
        bank.push_back({t.spans.empty() ? 0 : t.spans[i], t.members[i]});
    }
    return bank;
}

} // namespace

void PipelineOptions::validate() const {
    if ((transform == TransformKind::Smooth || transform == TransformKind::Delta) && window < 1) {
        throw ConfigError("window must be >= 1");
    }
    if (transform == TransformKind::MultiDelta) {
        DeltaConfig{1, Padding::EdgeReplicate, spans}.validate();
        if (spans.empty()) {
            throw ConfigError("multi-delta needs at least one span");
        }
        if (pca_k > 0) {
            throw ConfigError("PCA is not supported together with multi-delta");
        }
    }
    if (seqmatch_length < 1) {
        throw ConfigError("seqmatch length must be >= 1");
    }
}

TransformedSeries transform_series(const DescriptorSeries& series, const PipelineOptions& options) {
    options.validate();
    TransformedSeries out;
    switch (options.transform) {
    case TransformKind::Raw:
        out.members.push_back(series);
        break;
    case TransformKind::Smooth:
        out.members.push_back(smooth(series, options.window));
        break;
    case TransformKind::Delta:
        out.members.push_back(delta(series, DeltaConfig{options.window, options.padding, {}}));
        if (options.padding == Padding::ValidOnly) out.origin = options.window - 1;
        break;
    case TransformKind::MultiDelta:
        for (auto& entry : delta_bank(series, DeltaConfig{options.spans.front(), Padding::EdgeReplicate, options.spans})) {
            out.spans.push_back(entry.span);
            out.members.push_back(std::move(entry.series));
        }
        break;
    }
    return out;
}

DistanceMatrix match_series(const TransformedSeries& query, const TransformedSeries& ref,
                            const PipelineOptions& options) {
    options.validate();
    if (query.members.empty() || ref.members.empty()) {
        throw ConfigError("nothing to match");
    }

    DistanceMatrix m;
    if (options.pca_k > 0) {
        if (query.members.size() != 1 || ref.members.size() != 1) {
            throw ConfigError("PCA needs a single series per traverse");
        }
        const auto& q = query.members.front();
        const auto& r = ref.members.front();
        const DescriptorSeries fit_data = options.pca_fit == PcaFitSource::Reference ? r
                                          : options.pca_fit == PcaFitSource::Query   ? q
                                                                                     : stack_rows(r, q);
        const PcaModel model = pca_fit(fit_data, options.pca_k, PcaOptions{options.pca_center, options.pca_whiten});
        m = distance_matrix(pca_transform(model, q), pca_transform(model, r));
    } else if (query.members.size() == 1 && ref.members.size() == 1) {
        m = distance_matrix(query.members.front(), ref.members.front());
    } else {
        m = multi_delta_distance(as_bank(query), as_bank(ref));
    }

    if (options.seqmatch_length > 1) {
        m = seq_match(m, options.seqmatch_length);
    }
    return m;
}

Evaluation evaluate_matrix(const DistanceMatrix& m, const GroundTruth& gt,
                           const std::optional<PositionMatrix>& ref_positions, std::size_t query_origin,
                           std::size_t ref_origin, std::optional<FrameRange> scored) {
    if (m.values.rows() < 1 || m.values.cols() < 1) {
        throw DataError("empty distance matrix");
    }
    const MatchSet best = retrieve_best(m);

    Evaluation ev;
    GroundTruth scored_gt;
    scored_gt.radius = gt.radius;
    scored_gt.radius_mode = gt.radius_mode;
    for (std::size_t i = 0; i < best.size(); ++i) {
        if (scored && !scored->contains(i)) continue;
        const std::size_t q = i + query_origin;
        if (q >= gt.query_count()) {
            throw DataError(fmt::format("no ground truth for query frame {}", q));
        }
        ev.query_frames.push_back(q);
        ev.matches.ref_index.push_back(best.ref_index[i] + ref_origin);
        ev.matches.distance.push_back(best.distance[i]);
        scored_gt.ref_index.push_back(gt.ref_index[q]);
    }
    if (ev.matches.size() == 0) {
        throw DataError("no query frames left to evaluate");
    }
    ev.correct = correct_matches(ev.matches, scored_gt, ref_positions);
    ev.curve = evaluate_pr(ev.matches, scored_gt, ref_positions);
    return ev;
}

PipelineResult run_pair(const DescriptorSeries& ref, const DescriptorSeries& query, const GroundTruth& gt,
                        const PipelineOptions& options) {
    in_stage("config", [&] {
        options.validate();
        gt.validate(query.frame_count(), ref.frame_count());
    });
    const auto tq = in_stage("transform", [&] { return transform_series(query, options); });
    const auto tr = in_stage("transform", [&] { return transform_series(ref, options); });
    PipelineResult result;
    result.distances = in_stage("match", [&] { return match_series(tq, tr, options); });
    result.evaluation = in_stage("evaluate", [&] {
        std::optional<FrameRange> scored;
        if (options.exclude_padding) scored = tq.members.front().valid_range();
        return evaluate_matrix(result.distances, gt, ref.positions(), tq.origin, tr.origin, scored);
    });
    return result;
}

void RunConfig::validate() const {
    options.validate();
    if (!(radius >= 0.0)) {
        throw ConfigError("radius must be >= 0");
    }
    if (radius_mode == RadiusMode::Meters && !ref_positions_path) {
        throw ConfigError("meters radius mode requires reference positions");
    }
    if (ref_path.empty() || query_path.empty()) {
        throw ConfigError("reference and query inputs are required");
    }
}

RunConfig run_config_from_json(const json& j) {
    static const std::set<std::string> known = {
        "ref",     "query",          "ref_positions", "query_positions", "gt",         "transform",
        "window",  "spans",          "padding",       "seqmatch_length", "pca_k",      "pca_fit",
        "pca_center", "pca_whiten",  "exclude_padding", "radius",        "radius_mode", "output_dir"};
    if (!j.is_object()) {
        throw ConfigError("run config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ConfigError(fmt::format("unknown config key '{}'", key));
    }
    try {
        RunConfig cfg;
        auto& o = cfg.options;
        cfg.ref_path = j.at("ref").get<std::string>();
        cfg.query_path = j.at("query").get<std::string>();
        if (j.contains("ref_positions")) cfg.ref_positions_path = j["ref_positions"].get<std::string>();
        if (j.contains("query_positions")) cfg.query_positions_path = j["query_positions"].get<std::string>();
        if (j.contains("gt")) cfg.gt_path = j["gt"].get<std::string>();
        if (j.contains("transform")) o.transform = parse_transform(j["transform"].get<std::string>());
        o.window = j.value("window", o.window);
        o.spans = j.value("spans", o.spans);
        if (j.contains("padding")) o.padding = parse_padding(j["padding"].get<std::string>());
        o.seqmatch_length = j.value("seqmatch_length", o.seqmatch_length);
        o.pca_k = j.value("pca_k", o.pca_k);
        if (j.contains("pca_fit")) o.pca_fit = parse_pca_fit(j["pca_fit"].get<std::string>());
        o.pca_center = j.value("pca_center", o.pca_center);
        o.pca_whiten = j.value("pca_whiten", o.pca_whiten);
        o.exclude_padding = j.value("exclude_padding", o.exclude_padding);
        cfg.radius = j.value("radius", cfg.radius);
        if (j.contains("radius_mode")) cfg.radius_mode = parse_radius_mode(j["radius_mode"].get<std::string>());
        cfg.output_dir = j.value("output_dir", std::string("."));
        return cfg;
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("run config: {}", e.what()));
    }
}

json to_json(const RunConfig& cfg) {
    const auto& o = cfg.options;
    json j = {{"ref", cfg.ref_path.string()},
              {"query", cfg.query_path.string()},
              {"transform", to_string(o.transform)},
              {"window", o.window},
              {"spans", o.spans},
              {"padding", to_string(o.padding)},
              {"seqmatch_length", o.seqmatch_length},
              {"pca_k", o.pca_k},
              {"pca_fit", to_string(o.pca_fit)},
              {"pca_center", o.pca_center},
              {"pca_whiten", o.pca_whiten},
              {"exclude_padding", o.exclude_padding},
              {"radius", cfg.radius},
              {"radius_mode", to_string(cfg.radius_mode)},
              {"output_dir", cfg.output_dir.string()}};
    if (cfg.ref_positions_path) j["ref_positions"] = cfg.ref_positions_path->string();
    if (cfg.query_positions_path) j["query_positions"] = cfg.query_positions_path->string();
    if (cfg.gt_path) j["gt"] = cfg.gt_path->string();
    return j;
}

json summary_json(const PrCurve& curve, const PipelineOptions& options) {
    json j = {{"precision_at_full_recall", curve.precision_at_full_recall},
              {"max_f1", curve.max_f1},
              {"radius", curve.radius},
              {"radius_mode", to_string(curve.radius_mode)},
              {"transform", to_string(options.transform)},
              {"window", nullptr},
              {"seqmatch_length", options.seqmatch_length},
              {"pca_k", nullptr}};
    if (options.transform == TransformKind::Smooth || options.transform == TransformKind::Delta) {
        j["window"] = options.window;
    }
    if (options.transform == TransformKind::MultiDelta) {
        j["spans"] = options.spans;
    }
    if (options.pca_k > 0) {
        j["pca_k"] = options.pca_k;
    }
    return j;
}

void write_outputs(const fs::path& dir, const Evaluation& evaluation, const PipelineOptions& options) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw DataError(fmt::format("cannot create output directory '{}': {}", dir.string(), ec.message()));
    }
    io::write_matches_csv(dir / "matches.csv", evaluation.matches, evaluation.correct, evaluation.query_frames);
    io::write_pr_csv(dir / "pr.csv", evaluation.curve);
    std::ofstream out(dir / "summary.json", std::ios::trunc);
    out << summary_json(evaluation.curve, options).dump(2) << '\n';
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", (dir / "summary.json").string()));
    }
}

PipelineResult run_pipeline(const RunConfig& cfg) {
    in_stage("config", [&] { cfg.validate(); });

    struct Inputs {
        DescriptorSeries ref;
        DescriptorSeries query;
        GroundTruth gt;
    };
    const Inputs in = in_stage("read", [&] {
        auto ref = io::read_descriptors(cfg.ref_path);
        auto query = io::read_descriptors(cfg.query_path);
        if (cfg.ref_positions_path) {
            ref = DescriptorSeries(ref.data(), io::read_positions(*cfg.ref_positions_path));
        }
        if (cfg.query_positions_path) {
            query = DescriptorSeries(query.data(), io::read_positions(*cfg.query_positions_path));
        }
        GroundTruth gt;
        if (cfg.gt_path) {
            gt = io::read_ground_truth(*cfg.gt_path, cfg.radius_mode, cfg.radius);
        } else {
            if (ref.frame_count() != query.frame_count()) {
                throw ConfigError("no ground truth given and traverses differ in length");
            }
            gt = identity_ground_truth(query.frame_count(), cfg.radius_mode, cfg.radius);
        }
        return Inputs{std::move(ref), std::move(query), std::move(gt)};
    });

    PipelineResult result = run_pair(in.ref, in.query, in.gt, cfg.options);
    in_stage("write", [&] { write_outputs(cfg.output_dir, result.evaluation, cfg.options); });
    return result;
}

} // namespace deltavpr
