// deltavpr: command-line front end for delta descriptors, traverse matching
// and place-recognition evaluation.
//
// Exit codes: 0 success, 2 configuration error, 3 data error.

#include "deltavpr/deltavpr.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace deltavpr;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

std::vector<WarpPoint> parse_warp(const std::string& text) {
    // "0:0,0.25:0.5,1:1" as source:target pairs
    std::vector<WarpPoint> points;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw ConfigError(fmt::format("bad warp point '{}' (expected source:target)", item));
        }
        try {
            points.push_back({std::stod(item.substr(0, colon)), std::stod(item.substr(colon + 1))});
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("bad warp point '{}'", item));
        }
    }
    validate_warp(points);
    return points;
}

io::DType parse_dtype(const std::string& text) {
    if (text == "f32") return io::DType::Float32;
    if (text == "f64") return io::DType::Float64;
    throw ConfigError(fmt::format("unknown dtype '{}' (expected f32 or f64)", text));
}

/// out.dvpr -> out.s30.dvpr
fs::path span_path(const fs::path& base, std::size_t span) {
    fs::path p = base;
    p.replace_filename(fmt::format("{}.s{}{}", base.stem().string(), span, base.extension().string()));
    return p;
}

DescriptorSeries with_positions(DescriptorSeries s, const std::string& positions) {
    if (positions.empty()) return s;
    return DescriptorSeries(s.data(), io::read_positions(positions));
}

GroundTruth load_gt(const std::string& path, std::size_t queries, std::size_t refs, RadiusMode mode,
                    double radius) {
    if (!path.empty()) {
        return io::read_ground_truth(path, mode, radius);
    }
    if (queries != refs) {
        throw ConfigError("no ground truth given and traverses differ in length");
    }
    return identity_ground_truth(queries, mode, radius);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) throw DataError(fmt::format("cannot write '{}'", path.string()));
}

/// Pipeline knobs shared by `run`, `transform`, `match` and `evaluate`.
struct OptionFlags {
    std::string transform = "delta";
    std::string padding = "edge";
    std::string pca_fit = "reference";
    bool no_pca_center = false;
    PipelineOptions options;

    void add_transform(CLI::App* app) {
        app->add_option("--transform", transform, "raw | smooth | delta | multi-delta")->capture_default_str();
        app->add_option("--window", options.window, "window / sequential span l in frames")->capture_default_str();
        app->add_option("--spans", options.spans, "spans for multi-delta, e.g. 30,40,50,60")->delimiter(',');
        app->add_option("--padding", padding, "edge | valid")->capture_default_str();
    }
    void add_match(CLI::App* app) {
        app->add_option("--seqmatch", options.seqmatch_length, "sequence matching length (1 = off)")
            ->capture_default_str();
        app->add_option("--pca-k", options.pca_k, "PCA components (0 = off)")->capture_default_str();
        app->add_option("--pca-fit", pca_fit, "reference | query | both")->capture_default_str();
        app->add_flag("--no-pca-center", no_pca_center, "fit PCA without centering");
        app->add_flag("--pca-whiten", options.pca_whiten, "whiten PCA coordinates");
    }
    PipelineOptions resolve() {
        options.transform = parse_transform(transform);
        options.padding = parse_padding(padding);
        options.pca_fit = parse_pca_fit(pca_fit);
        options.pca_center = !no_pca_center;
        options.validate();
        return options;
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Delta descriptors: change-based place representations for visual place recognition"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "deltavpr 0.1.0");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic reference/query traverse pair");
    SynthParams sp;
    std::string synth_dir = ".";
    std::string synth_warp;
    std::string synth_format = "dvpr";
    synth->add_option("--out-dir", synth_dir, "output directory")->capture_default_str();
    synth->add_option("--frames", sp.frames)->capture_default_str();
    synth->add_option("--dims", sp.dims)->capture_default_str();
    synth->add_option("--latent-window", sp.latent_smooth_window)->capture_default_str();
    synth->add_option("--offset-scale", sp.offset_scale)->capture_default_str();
    synth->add_option("--noise-scale", sp.noise_scale)->capture_default_str();
    synth->add_option("--offset-segments", sp.offset_segments)->capture_default_str();
    synth->add_option("--frame-spacing", sp.frame_spacing, "meters between reference frames")->capture_default_str();
    synth->add_option("--seed", sp.seed)->capture_default_str();
    synth->add_option("--warp", synth_warp, "query time warp as source:target pairs, e.g. 0:0,0.25:0.5,1:1");
    synth->add_option("--format", synth_format, "dvpr | csv")->capture_default_str();

    // transform
    auto* transform = app.add_subcommand("transform", "compute raw/smoothed/delta/multi-delta descriptors");
    OptionFlags transform_flags;
    std::string transform_in;
    std::string transform_out;
    std::string transform_dtype = "f64";
    transform->add_option("--input", transform_in)->required();
    transform->add_option("--output", transform_out, "output file; multi-delta inserts .s<span> before the extension")
        ->required();
    transform->add_option("--dtype", transform_dtype, "f32 | f64")->capture_default_str();
    transform_flags.add_transform(transform);

    // match
    auto* match = app.add_subcommand("match", "cosine distance matrix between query and reference");
    OptionFlags match_flags;
    std::vector<std::string> match_query;
    std::vector<std::string> match_ref;
    std::string match_out;
    std::string match_pca_out;
    match->add_option("--query", match_query, "query series (repeat for a multi-delta bank)")->required();
    match->add_option("--ref", match_ref, "reference series (repeat for a multi-delta bank)")->required();
    match->add_option("--output", match_out, "distance matrix (.dvpr, float64)")->required();
    match->add_option("--save-pca", match_pca_out, "write the fitted PCA model");
    match_flags.add_match(match);

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "PR curve and summary from a distance matrix");
    OptionFlags eval_flags;
    std::string eval_matrix;
    std::string eval_gt;
    std::string eval_ref_positions;
    std::string eval_out = ".";
    std::string eval_mode = "frames";
    double eval_radius = 0.0;
    std::size_t eval_query_origin = 0;
    std::size_t eval_ref_origin = 0;
    evaluate->add_option("--matrix", eval_matrix)->required();
    evaluate->add_option("--gt", eval_gt, "query_idx,ref_idx CSV (default: identity)");
    evaluate->add_option("--ref-positions", eval_ref_positions, "x,y CSV for meters mode");
    evaluate->add_option("--radius", eval_radius)->capture_default_str();
    evaluate->add_option("--radius-mode", eval_mode, "frames | meters")->capture_default_str();
    evaluate->add_option("--query-origin", eval_query_origin, "source frame of matrix row 0")->capture_default_str();
    evaluate->add_option("--ref-origin", eval_ref_origin, "source frame of matrix column 0")->capture_default_str();
    evaluate->add_option("--out-dir", eval_out)->capture_default_str();
    eval_flags.add_transform(evaluate);
    eval_flags.add_match(evaluate);

    // calibrate
    auto* calibrate = app.add_subcommand("calibrate", "estimate the sequential span from a self-distance profile");
    std::string cal_in;
    std::string cal_profile;
    std::size_t cal_dmax = 0;
    double cal_threshold = kDefaultSpanThreshold;
    double cal_multiplier = 1.0;
    calibrate->add_option("--input", cal_in)->required();
    calibrate->add_option("--d-max", cal_dmax, "largest frame offset (default T/4, at most 512)");
    calibrate->add_option("--threshold", cal_threshold)->capture_default_str();
    calibrate->add_option("--multiplier", cal_multiplier, "scale applied to the lower bound")->capture_default_str();
    calibrate->add_option("--profile-out", cal_profile, "offset,median_distance CSV");

    // rank-dims
    auto* rank = app.add_subcommand("rank-dims", "rank dimensions by matched-pair activation products");
    std::string rank_ref;
    std::string rank_query;
    std::string rank_gt;
    std::string rank_out;
    std::size_t rank_k = 10;
    rank->add_option("--ref", rank_ref)->required();
    rank->add_option("--query", rank_query)->required();
    rank->add_option("--gt", rank_gt, "query_idx,ref_idx CSV (default: identity)");
    rank->add_option("--top-k", rank_k)->capture_default_str();
    rank->add_option("--output", rank_out, "rank,dim,score CSV (default: stdout)");

    // shuffle
    auto* shuffle = app.add_subcommand("shuffle", "apply one random permutation to both traverses");
    std::string sh_ref;
    std::string sh_query;
    std::string sh_gt;
    std::string sh_out = ".";
    std::uint64_t sh_seed = 0;
    std::string sh_dtype = "f64";
    shuffle->add_option("--ref", sh_ref)->required();
    shuffle->add_option("--query", sh_query)->required();
    shuffle->add_option("--gt", sh_gt, "query_idx,ref_idx CSV (default: identity)");
    shuffle->add_option("--seed", sh_seed)->capture_default_str();
    shuffle->add_option("--out-dir", sh_out)->capture_default_str();
    shuffle->add_option("--dtype", sh_dtype, "f32 | f64")->capture_default_str();

    // run
    auto* run = app.add_subcommand("run", "full pipeline: transform, match, evaluate");
    OptionFlags run_flags;
    std::string run_config;
    std::string run_ref;
    std::string run_query;
    std::string run_gt;
    std::string run_ref_pos;
    std::string run_query_pos;
    std::string run_out = ".";
    std::string run_mode = "frames";
    double run_radius = 0.0;
    bool run_exclude = false;
    run->add_option("--config", run_config, "JSON run configuration; flags given explicitly override it");
    auto* o_ref = run->add_option("--ref", run_ref);
    auto* o_query = run->add_option("--query", run_query);
    auto* o_gt = run->add_option("--gt", run_gt);
    auto* o_ref_pos = run->add_option("--ref-positions", run_ref_pos);
    auto* o_query_pos = run->add_option("--query-positions", run_query_pos);
    auto* o_out = run->add_option("--out-dir", run_out)->capture_default_str();
    auto* o_radius = run->add_option("--radius", run_radius)->capture_default_str();
    auto* o_mode = run->add_option("--radius-mode", run_mode, "frames | meters")->capture_default_str();
    auto* o_exclude = run->add_flag("--exclude-padding", run_exclude, "score only unpadded query frames");
    run_flags.add_transform(run);
    run_flags.add_match(run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*synth) {
            if (!synth_warp.empty()) sp.warp = parse_warp(synth_warp);
            const auto pair = generate_traverse_pair(sp);
            if (synth_format != "dvpr" && synth_format != "csv") {
                throw ConfigError("--format must be dvpr or csv");
            }
            const fs::path dir = synth_dir;
            fs::create_directories(dir);
            const std::string ext = synth_format == "csv" ? ".csv" : ".dvpr";
            io::write_descriptors(dir / ("ref" + ext), pair.ref);
            io::write_descriptors(dir / ("query" + ext), pair.query);
            io::write_ground_truth(dir / "gt.csv", pair.gt);
            io::write_positions(dir / "ref_positions.csv", *pair.ref.positions());
            io::write_positions(dir / "query_positions.csv", *pair.query.positions());
            std::cout << "wrote " << (dir / ("ref" + ext)).string() << ", " << (dir / ("query" + ext)).string()
                      << ", gt.csv, ref_positions.csv, query_positions.csv\n";
        } else if (*transform) {
            const auto options = transform_flags.resolve();
            const auto dtype = parse_dtype(transform_dtype);
            const auto out = transform_series(io::read_descriptors(transform_in), options);
            if (options.transform == TransformKind::MultiDelta) {
                for (std::size_t i = 0; i < out.members.size(); ++i) {
                    const auto p = span_path(transform_out, out.spans[i]);
                    io::write_descriptors(p, out.members[i], dtype);
                    std::cout << p.string() << '\n';
                }
            } else {
                io::write_descriptors(transform_out, out.members.front(), dtype);
                std::cout << transform_out << '\n';
            }
            std::cout << "origin=" << out.origin << '\n';
        } else if (*match) {
            const auto options = match_flags.resolve();
            TransformedSeries q;
            TransformedSeries r;
            for (const auto& p : match_query) q.members.push_back(io::read_descriptors(p));
            for (const auto& p : match_ref) r.members.push_back(io::read_descriptors(p));
            const auto m = match_series(q, r, options);
            io::write_matrix(match_out, m.values, io::DType::Float64);
            if (!match_pca_out.empty()) {
                if (options.pca_k == 0) throw ConfigError("--save-pca needs --pca-k");
                const auto& fit = options.pca_fit == PcaFitSource::Query ? q.members.front() : r.members.front();
                if (options.pca_fit == PcaFitSource::Both) {
                    throw ConfigError("--save-pca supports reference or query fits");
                }
                io::write_pca_model(match_pca_out,
                                    pca_fit(fit, options.pca_k, PcaOptions{options.pca_center, options.pca_whiten}));
            }
        } else if (*evaluate) {
            const auto options = eval_flags.resolve();
            const auto mode = parse_radius_mode(eval_mode);
            const DistanceMatrix m{io::read_matrix(eval_matrix)};
            const std::size_t queries = m.query_count() + eval_query_origin;
            const std::size_t refs = m.ref_count() + eval_ref_origin;
            std::optional<PositionMatrix> positions;
            if (!eval_ref_positions.empty()) positions = io::read_positions(eval_ref_positions);
            if (mode == RadiusMode::Meters && !positions) {
                throw ConfigError("meters radius mode requires --ref-positions");
            }
            const auto gt = load_gt(eval_gt, queries, refs, mode, eval_radius);
            const auto ev = evaluate_matrix(m, gt, positions, eval_query_origin, eval_ref_origin);
            write_outputs(eval_out, ev, options);
            std::cout << summary_json(ev.curve, options).dump() << '\n';
        } else if (*calibrate) {
            const auto series = io::read_descriptors(cal_in);
            const std::size_t d_max = cal_dmax > 0 ? cal_dmax : default_profile_depth(series.frame_count());
            const auto profile = self_distance_profile(series, d_max);
            if (!cal_profile.empty()) io::write_profile_csv(cal_profile, profile);
            if (!(cal_multiplier > 0.0)) throw ConfigError("--multiplier must be > 0");
            const auto bound = estimate_span(profile, cal_threshold);
            const auto span = static_cast<std::size_t>(std::ceil(static_cast<double>(bound) * cal_multiplier));
            std::cout << nlohmann::json{{"span_lower_bound", bound},
                                        {"span", span},
                                        {"threshold", cal_threshold},
                                        {"d_max", d_max}}
                             .dump()
                      << '\n';
        } else if (*rank) {
            const auto ref = io::read_descriptors(rank_ref);
            const auto query = io::read_descriptors(rank_query);
            const auto gt = load_gt(rank_gt, query.frame_count(), ref.frame_count(), RadiusMode::Frames, 0.0);
            const auto dims = rank_dimensions(ref, query, gt, rank_k);
            const auto scores = dimension_scores(ref, query, gt);
            std::ostringstream csv;
            csv << "rank,dim,score\n";
            for (std::size_t i = 0; i < dims.size(); ++i) {
                csv << i << ',' << dims[i] << ',' << io::format_number(scores(static_cast<Eigen::Index>(dims[i])))
                    << '\n';
            }
            if (rank_out.empty()) {
                std::cout << csv.str();
            } else {
                std::ofstream out(rank_out, std::ios::trunc);
                out << csv.str();
                if (!out) throw DataError(fmt::format("cannot write '{}'", rank_out));
            }
        } else if (*shuffle) {
            const auto dtype = parse_dtype(sh_dtype);
            const auto ref = io::read_descriptors(sh_ref);
            const auto query = io::read_descriptors(sh_query);
            const auto gt = load_gt(sh_gt, query.frame_count(), ref.frame_count(), RadiusMode::Frames, 0.0);
            const auto out = apply_permutation(ref, query, gt, sh_seed);
            const fs::path dir = sh_out;
            fs::create_directories(dir);
            io::write_descriptors(dir / "ref.dvpr", out.ref, dtype);
            io::write_descriptors(dir / "query.dvpr", out.query, dtype);
            io::write_ground_truth(dir / "gt.csv", out.gt);
            std::cout << "wrote " << dir.string() << "/{ref.dvpr,query.dvpr,gt.csv}\n";
        } else if (*run) {
            RunConfig cfg;
            if (!run_config.empty()) {
                std::ifstream in(run_config);
                if (!in) throw ConfigError(fmt::format("cannot open config '{}'", run_config));
                nlohmann::json j;
                try {
                    j = nlohmann::json::parse(in);
                } catch (const nlohmann::json::exception& e) {
                    throw ConfigError(fmt::format("{}: {}", run_config, e.what()));
                }
                cfg = run_config_from_json(j);
            }
            const bool explicit_config = !run_config.empty();
            const auto given = [&](const CLI::Option* opt) { return !explicit_config || opt->count() > 0; };
            if (o_ref->count()) cfg.ref_path = run_ref;
            if (o_query->count()) cfg.query_path = run_query;
            if (o_gt->count()) cfg.gt_path = run_gt;
            if (o_ref_pos->count()) cfg.ref_positions_path = run_ref_pos;
            if (o_query_pos->count()) cfg.query_positions_path = run_query_pos;
            if (given(o_out)) cfg.output_dir = run_out;
            if (given(o_radius)) cfg.radius = run_radius;
            if (given(o_mode)) cfg.radius_mode = parse_radius_mode(run_mode);
            if (given(o_exclude)) cfg.options.exclude_padding = run_exclude;

            const auto flags = run_flags.resolve();
            auto& o = cfg.options;
            if (given(run->get_option("--transform"))) o.transform = flags.transform;
            if (given(run->get_option("--window"))) o.window = flags.window;
            if (given(run->get_option("--spans"))) o.spans = flags.spans;
            if (given(run->get_option("--padding"))) o.padding = flags.padding;
            if (given(run->get_option("--seqmatch"))) o.seqmatch_length = flags.seqmatch_length;
            if (given(run->get_option("--pca-k"))) o.pca_k = flags.pca_k;
            if (given(run->get_option("--pca-fit"))) o.pca_fit = flags.pca_fit;
            if (given(run->get_option("--no-pca-center"))) o.pca_center = flags.pca_center;
            if (given(run->get_option("--pca-whiten"))) o.pca_whiten = flags.pca_whiten;

            const auto result = run_pipeline(cfg);
            write_json(cfg.output_dir / "config.json", to_json(cfg));
            std::cout << summary_json(result.evaluation.curve, cfg.options).dump() << '\n';
        }
    } catch (const ConfigError& e) {
        std::cerr << "deltavpr: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "deltavpr: data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "deltavpr: " << e.what() << '\n';
        return kExitData;
    }
    return 0;
}
