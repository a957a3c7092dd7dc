#include "deltavpr/deltavpr.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace deltavpr;

namespace {

GroundTruth make_gt(std::vector<std::size_t> gt, double radius, const std::string& mode) {
    return GroundTruth{std::move(gt), parse_radius_mode(mode), radius};
}

std::optional<PositionMatrix> to_positions(const std::optional<Matrix>& m) {
    if (!m) return std::nullopt;
    return PositionMatrix(*m);
}

py::dict curve_dict(const PrCurve& c) {
    std::vector<double> thresholds, precision, recall;
    for (const auto& p : c.points) {
        thresholds.push_back(p.threshold);
        precision.push_back(p.precision);
        recall.push_back(p.recall);
    }
    py::dict d;
    d["threshold"] = thresholds;
    d["precision"] = precision;
    d["recall"] = recall;
    d["precision_at_full_recall"] = c.precision_at_full_recall;
    d["max_f1"] = c.max_f1;
    return d;
}

py::dict pair_dict(const TraversePair& p) {
    py::dict d;
    d["ref"] = p.ref.data();
    d["query"] = p.query.data();
    d["gt"] = p.gt.ref_index;
    d["ref_positions"] = Matrix(*p.ref.positions());
    d["query_positions"] = Matrix(*p.query.positions());
    return d;
}

} // namespace

PYBIND11_MODULE(_deltavpr, m) {
    m.doc() = "Delta descriptors: change-based place representations";

    auto base = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<DataError>(m, "DataError", base.ptr());

    m.def(
        "smooth", [](const Matrix& x, std::size_t window) { return smooth(DescriptorSeries(x), window).data(); },
        py::arg("x"), py::arg("window"));
    m.def(
        "delta",
        [](const Matrix& x, std::size_t window, const std::string& padding) {
            return delta(DescriptorSeries(x), DeltaConfig{window, parse_padding(padding), {}}).data();
        },
        py::arg("x"), py::arg("window") = 16, py::arg("padding") = "edge");
    m.def(
        "delta_bank",
        [](const Matrix& x, std::vector<std::size_t> spans) {
            std::vector<Matrix> out;
            for (const auto& e : delta_bank(DescriptorSeries(x), DeltaConfig{spans.front(), {}, spans})) {
                out.push_back(e.series.data());
            }
            return out;
        },
        py::arg("x"), py::arg("spans"));
    m.def(
        "distance_matrix",
        [](const Matrix& q, const Matrix& r) { return distance_matrix(DescriptorSeries(q), DescriptorSeries(r)).values; },
        py::arg("query"), py::arg("ref"));
    m.def(
        "seq_match", [](const Matrix& d, std::size_t length) { return seq_match(DistanceMatrix{d}, length).values; },
        py::arg("distances"), py::arg("length"));
    m.def(
        "multi_delta_distance",
        [](const Matrix& q, const Matrix& r, std::vector<std::size_t> spans) {
            if (spans.empty()) throw ConfigError("spans must not be empty");
            const DeltaConfig cfg{spans.front(), Padding::EdgeReplicate, spans};
            return multi_delta_distance(delta_bank(DescriptorSeries(q), cfg), delta_bank(DescriptorSeries(r), cfg))
                .values;
        },
        py::arg("query"), py::arg("ref"), py::arg("spans"));
    m.def(
        "retrieve_best",
        [](const Matrix& d) {
            const auto best = retrieve_best(DistanceMatrix{d});
            return py::make_tuple(best.ref_index, best.distance);
        },
        py::arg("distances"), "Best reference index and distance per query row.");

    py::class_<PcaModel>(m, "PcaModel")
        .def_readonly("mean", &PcaModel::mean)
        .def_readonly("components", &PcaModel::components)
        .def_readonly("explained_variance", &PcaModel::explained_variance)
        .def_readonly("whiten", &PcaModel::whiten)
        .def_property_readonly("k", &PcaModel::k);
    m.def(
        "pca_fit",
        [](const Matrix& x, std::size_t k, bool center, bool whiten) {
            return pca_fit(DescriptorSeries(x), k, PcaOptions{center, whiten});
        },
        py::arg("x"), py::arg("k"), py::arg("center") = true, py::arg("whiten") = false);
    m.def(
        "pca_transform",
        [](const PcaModel& model, const Matrix& x) { return pca_transform(model, DescriptorSeries(x)).data(); },
        py::arg("model"), py::arg("x"));

    m.def(
        "self_distance_profile",
        [](const Matrix& x, std::optional<std::size_t> d_max) {
            const DescriptorSeries s(x);
            return self_distance_profile(s, d_max.value_or(default_profile_depth(s.frame_count()))).median_distance;
        },
        py::arg("x"), py::arg("d_max") = py::none(), "Median distance at offsets 1..d_max.");
    m.def(
        "estimate_span",
        [](const Matrix& x, std::optional<std::size_t> d_max, double threshold) {
            const DescriptorSeries s(x);
            return estimate_span(self_distance_profile(s, d_max.value_or(default_profile_depth(s.frame_count()))),
                                 threshold);
        },
        py::arg("x"), py::arg("d_max") = py::none(), py::arg("threshold") = kDefaultSpanThreshold);

    m.def(
        "evaluate_pr",
        [](std::vector<std::size_t> ref_index, std::vector<double> distance, std::vector<std::size_t> gt,
           double radius, const std::string& radius_mode, const std::optional<Matrix>& ref_positions) {
            MatchSet matches{std::move(ref_index), std::move(distance)};
            return curve_dict(evaluate_pr(matches, make_gt(std::move(gt), radius, radius_mode),
                                          to_positions(ref_positions)));
        },
        py::arg("ref_index"), py::arg("distance"), py::arg("gt"), py::arg("radius") = 0.0,
        py::arg("radius_mode") = "frames", py::arg("ref_positions") = py::none());
    m.def(
        "rank_dimensions",
        [](const Matrix& ref, const Matrix& query, std::vector<std::size_t> gt, std::size_t top_k) {
            return rank_dimensions(DescriptorSeries(ref), DescriptorSeries(query), make_gt(std::move(gt), 0, "frames"),
                                   top_k);
        },
        py::arg("ref"), py::arg("query"), py::arg("gt"), py::arg("top_k"));

    m.def(
        "time_warp",
        [](const Matrix& x, const std::vector<std::pair<double, double>>& points) {
            std::vector<WarpPoint> warp;
            for (const auto& [s, t] : points) warp.push_back({s, t});
            return time_warp(DescriptorSeries(x), warp).data();
        },
        py::arg("x"), py::arg("control_points"), "control_points are (source, target) pairs.");
    m.def(
        "generate_traverse_pair",
        [](std::size_t frames, std::size_t dims, std::size_t latent_smooth_window, double offset_scale,
           double noise_scale, std::uint64_t seed, const std::vector<std::pair<double, double>>& warp,
           std::size_t offset_segments, double frame_spacing) {
            SynthParams p;
            p.frames = frames;
            p.dims = dims;
            p.latent_smooth_window = latent_smooth_window;
            p.offset_scale = offset_scale;
            p.noise_scale = noise_scale;
            p.seed = seed;
            for (const auto& [s, t] : warp) p.warp.push_back({s, t});
            p.offset_segments = offset_segments;
            p.frame_spacing = frame_spacing;
            return pair_dict(generate_traverse_pair(p));
        },
        py::arg("frames") = 2000, py::arg("dims") = 128, py::arg("latent_smooth_window") = 20,
        py::arg("offset_scale") = 0.0, py::arg("noise_scale") = 0.0, py::arg("seed") = 0,
        py::arg("warp") = std::vector<std::pair<double, double>>{}, py::arg("offset_segments") = 1,
        py::arg("frame_spacing") = 1.0);
    m.def(
        "apply_permutation",
        [](const Matrix& ref, const Matrix& query, std::vector<std::size_t> gt, std::uint64_t seed) {
            const auto out = apply_permutation(DescriptorSeries(ref), DescriptorSeries(query),
                                               make_gt(std::move(gt), 0, "frames"), seed);
            return py::make_tuple(out.ref.data(), out.query.data(), out.gt.ref_index);
        },
        py::arg("ref"), py::arg("query"), py::arg("gt"), py::arg("seed"));

    m.def(
        "read_descriptors", [](const std::filesystem::path& p) { return io::read_descriptors(p).data(); },
        py::arg("path"));
    m.def(
        "write_descriptors",
        [](const std::filesystem::path& p, const Matrix& x, const std::string& dtype) {
            if (dtype != "f32" && dtype != "f64") throw ConfigError("dtype must be f32 or f64");
            io::write_descriptors(p, DescriptorSeries(x), dtype == "f32" ? io::DType::Float32 : io::DType::Float64);
        },
        py::arg("path"), py::arg("x"), py::arg("dtype") = "f32");

    m.def(
        "run_pair",
        [](const Matrix& ref, const Matrix& query, std::optional<std::vector<std::size_t>> gt,
           const std::string& transform, std::size_t window, std::vector<std::size_t> spans,
           const std::string& padding, std::size_t seqmatch_length, std::size_t pca_k, double radius) {
            PipelineOptions o;
            o.transform = parse_transform(transform);
            o.window = window;
            o.spans = std::move(spans);
            o.padding = parse_padding(padding);
            o.seqmatch_length = seqmatch_length;
            o.pca_k = pca_k;
            const DescriptorSeries r(ref);
            const DescriptorSeries q(query);
            const GroundTruth truth = gt ? make_gt(std::move(*gt), radius, "frames") : [&] {
                auto id = identity_ground_truth(q.frame_count());
                id.radius = radius;
                return id;
            }();
            const auto result = run_pair(r, q, truth, o);
            py::dict d = curve_dict(result.evaluation.curve);
            d["distances"] = result.distances.values;
            d["query_frames"] = result.evaluation.query_frames;
            d["matches"] = result.evaluation.matches.ref_index;
            d["correct"] = result.evaluation.correct;
            return d;
        },
        py::arg("ref"), py::arg("query"), py::arg("gt") = py::none(), py::arg("transform") = "delta",
        py::arg("window") = 16, py::arg("spans") = std::vector<std::size_t>{}, py::arg("padding") = "edge",
        py::arg("seqmatch_length") = 1, py::arg("pca_k") = 0, py::arg("radius") = 0.0);
}
