#include "deltavpr/io.hpp"

#include "deltavpr/error.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace deltavpr::io {

namespace fs = std::filesystem;

std::size_t dtype_size(DType dtype) {
    switch (dtype) {
    case DType::Float32:
        return 4;
    case DType::Float64:
        return 8;
    }
    throw DataError("unsupported dtype");
}

namespace {

template <typename U>
void put_le(std::vector<std::uint8_t>& out, U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
    }
}

template <typename U>
U get_le(const std::uint8_t* p) {
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
        value |= static_cast<U>(p[i]) << (8 * i);
    }
    return value;
}

std::vector<std::uint8_t> slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(fmt::format("cannot open '{}'", path.string()));
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", path.string()));
    }
    return out;
}

void finish(std::ofstream& out, const fs::path& path) {
    out.flush();
    if (!out) {
        throw DataError(fmt::format("error while writing '{}'", path.string()));
    }
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

bool parse_double(std::string_view field, double& value) {
    if (!field.empty() && field.front() == '+') field.remove_prefix(1);
    const auto* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, value);
    return ec == std::errc() && ptr == end && !field.empty();
}

/// Numeric rows of a CSV file; a first line that does not parse is a header.
std::vector<std::vector<double>> read_numeric_rows(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError(fmt::format("cannot open '{}'", path.string()));
    }
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        std::vector<double> values(fields.size());
        bool ok = true;
        for (std::size_t i = 0; i < fields.size() && ok; ++i) ok = parse_double(fields[i], values[i]);
        if (!ok) {
            if (rows.empty() && line_no == 1) continue;
            throw DataError(fmt::format("{}:{}: non-numeric field", path.string(), line_no));
        }
        if (!rows.empty() && values.size() != rows.front().size()) {
            throw DataError(fmt::format("{}:{}: expected {} columns, found {}", path.string(), line_no,
                                        rows.front().size(), values.size()));
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw DataError(fmt::format("'{}' contains no data rows", path.string()));
    }
    return rows;
}

bool has_csv_extension(const fs::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext == ".csv";
}

} // namespace

std::string format_number(double value) { return fmt::format("{}", value); }

std::vector<std::uint8_t> encode_matrix(const Matrix& m, DType dtype) {
    const auto rows = static_cast<std::uint64_t>(m.rows());
    const auto cols = static_cast<std::uint64_t>(m.cols());
    std::vector<std::uint8_t> out;
    out.reserve(kHeaderSize + rows * cols * dtype_size(dtype));
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_le<std::uint32_t>(out, kFormatVersion);
    put_le<std::uint64_t>(out, rows);
    put_le<std::uint64_t>(out, cols);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dtype));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (dtype == DType::Float32) {
                put_le(out, std::bit_cast<std::uint32_t>(static_cast<float>(m(i, j))));
            } else {
                put_le(out, std::bit_cast<std::uint64_t>(m(i, j)));
            }
        }
    }
    return out;
}

Matrix decode_matrix(std::span<const std::uint8_t> bytes, const std::string& source) {
    if (bytes.size() < kHeaderSize) {
        throw DataError(fmt::format("{}: truncated header (expected {} bytes, got {})", source, kHeaderSize,
                                    bytes.size()));
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw DataError(fmt::format("{}: bad magic (not a DVPR descriptor file)", source));
    }
    const auto version = get_le<std::uint32_t>(bytes.data() + 4);
    if (version != kFormatVersion) {
        throw DataError(fmt::format("{}: unsupported format version {}", source, version));
    }
    const auto rows = get_le<std::uint64_t>(bytes.data() + 8);
    const auto cols = get_le<std::uint64_t>(bytes.data() + 16);
    const auto code = get_le<std::uint32_t>(bytes.data() + 24);
    if (code != static_cast<std::uint32_t>(DType::Float32) && code != static_cast<std::uint32_t>(DType::Float64)) {
        throw DataError(fmt::format("{}: unsupported dtype code {}", source, code));
    }
    const auto dtype = static_cast<DType>(code);
    const std::size_t width = dtype_size(dtype);
    if (cols != 0 && rows > (std::uint64_t{1} << 40) / cols) {
        throw DataError(fmt::format("{}: implausible shape {}x{}", source, rows, cols));
    }
    const std::uint64_t expected = kHeaderSize + rows * cols * width;
    if (bytes.size() != expected) {
        throw DataError(fmt::format("{}: {} payload (expected {} bytes, got {})", source,
                                    bytes.size() < expected ? "truncated" : "oversized", expected,
                                    bytes.size()));
    }

    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const std::uint8_t* p = bytes.data() + kHeaderSize;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j, p += width) {
            m(i, j) = dtype == DType::Float32 ? static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(p)))
                                             : std::bit_cast<double>(get_le<std::uint64_t>(p));
        }
    }
    return m;
}

Matrix read_matrix(const fs::path& path) { return decode_matrix(slurp(path), path.string()); }

void write_matrix(const fs::path& path, const Matrix& m, DType dtype) {
    const auto bytes = encode_matrix(m, dtype);
    auto out = open_out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    finish(out, path);
}

Matrix read_csv_matrix(const fs::path& path) {
    const auto rows = read_numeric_rows(path);
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

DescriptorSeries read_descriptors(const fs::path& path) {
    Matrix m = has_csv_extension(path) ? read_csv_matrix(path) : read_matrix(path);
    try {
        return DescriptorSeries(std::move(m));
    } catch (const DataError& e) {
        throw DataError(fmt::format("{}: {}", path.string(), e.what()));
    }
}

void write_descriptors(const fs::path& path, const DescriptorSeries& series, DType dtype) {
    if (!has_csv_extension(path)) {
        write_matrix(path, series.data(), dtype);
        return;
    }
    auto out = open_out(path);
    for (std::size_t d = 0; d < series.dim(); ++d) out << (d ? ",d" : "d") << d;
    out << '\n';
    for (Eigen::Index t = 0; t < series.data().rows(); ++t) {
        for (Eigen::Index d = 0; d < series.data().cols(); ++d) {
            out << (d ? "," : "") << format_number(series.data()(t, d));
        }
        out << '\n';
    }
    finish(out, path);
}

PositionMatrix read_positions(const fs::path& path) {
    const Matrix m = read_csv_matrix(path);
    if (m.cols() != 2) {
        throw DataError(fmt::format("{}: positions need 2 columns (x,y), found {}", path.string(), m.cols()));
    }
    return m;
}

void write_positions(const fs::path& path, const PositionMatrix& positions) {
    auto out = open_out(path);
    out << "x,y\n";
    for (Eigen::Index t = 0; t < positions.rows(); ++t) {
        out << format_number(positions(t, 0)) << ',' << format_number(positions(t, 1)) << '\n';
    }
    finish(out, path);
}

GroundTruth read_ground_truth(const fs::path& path, RadiusMode mode, double radius) {
    const auto rows = read_numeric_rows(path);
    if (rows.front().size() != 2) {
        throw DataError(fmt::format("{}: ground truth needs 2 columns (query_idx,ref_idx)", path.string()));
    }
    GroundTruth gt;
    gt.radius_mode = mode;
    gt.radius = radius;
    gt.ref_index.assign(rows.size(), 0);
    std::vector<bool> seen(rows.size(), false);
    for (const auto& row : rows) {
        const double q = row[0];
        const double r = row[1];
        if (q < 0 || r < 0 || q != std::floor(q) || r != std::floor(r) || q >= static_cast<double>(rows.size())) {
            throw DataError(fmt::format("{}: invalid pair ({}, {})", path.string(), q, r));
        }
        const auto qi = static_cast<std::size_t>(q);
        if (seen[qi]) {
            throw DataError(fmt::format("{}: query {} listed twice", path.string(), qi));
        }
        seen[qi] = true;
        gt.ref_index[qi] = static_cast<std::size_t>(r);
    }
    return gt;
}

void write_ground_truth(const fs::path& path, const GroundTruth& gt) {
    auto out = open_out(path);
    out << "query_idx,ref_idx\n";
    for (std::size_t q = 0; q < gt.ref_index.size(); ++q) {
        out << q << ',' << gt.ref_index[q] << '\n';
    }
    finish(out, path);
}

void write_matches_csv(const fs::path& path, const MatchSet& matches, const std::vector<bool>& correct,
                       std::span<const std::size_t> query_indices) {
    if (correct.size() != matches.size() || (!query_indices.empty() && query_indices.size() != matches.size())) {
        throw DataError("match, correctness and query index counts differ");
    }
    auto out = open_out(path);
    out << "query_idx,ref_idx,distance,correct\n";
    for (std::size_t q = 0; q < matches.size(); ++q) {
        out << (query_indices.empty() ? q : query_indices[q]) << ',' << matches.ref_index[q] << ','
            << format_number(matches.distance[q]) << ',' << (correct[q] ? 1 : 0) << '\n';
    }
    finish(out, path);
}

void write_pr_csv(const fs::path& path, const PrCurve& curve) {
    auto out = open_out(path);
    out << "threshold,precision,recall\n";
    for (const auto& p : curve.points) {
        out << format_number(p.threshold) << ',' << format_number(p.precision) << ',' << format_number(p.recall)
            << '\n';
    }
    finish(out, path);
}

void write_profile_csv(const fs::path& path, const SelfDistanceProfile& profile) {
    auto out = open_out(path);
    out << "offset,median_distance\n";
    for (std::size_t i = 0; i < profile.size(); ++i) {
        out << profile.offsets[i] << ',' << format_number(profile.median_distance[i]) << '\n';
    }
    finish(out, path);
}

void write_pca_model(const fs::path& path, const PcaModel& model) {
    const auto dims = static_cast<Eigen::Index>(model.input_dim());
    const auto k = static_cast<Eigen::Index>(model.k());
    Matrix packed(k + 1, dims + 1);
    packed(0, 0) = model.whiten ? 1.0 : 0.0;
    packed.row(0).tail(dims) = model.mean.transpose();
    packed.col(0).tail(k) = model.explained_variance;
    packed.bottomRightCorner(k, dims) = model.components.transpose();
    write_matrix(path, packed, DType::Float64);
}

PcaModel read_pca_model(const fs::path& path) {
    const Matrix packed = read_matrix(path);
    if (packed.rows() < 2 || packed.cols() < 2) {
        throw DataError(fmt::format("{}: not a PCA model", path.string()));
    }
    const Eigen::Index k = packed.rows() - 1;
    const Eigen::Index dims = packed.cols() - 1;
    PcaModel model;
    model.whiten = packed(0, 0) != 0.0;
    model.mean = packed.row(0).tail(dims).transpose();
    model.explained_variance = packed.col(0).tail(k);
    model.components = packed.bottomRightCorner(k, dims).transpose();
    return model;
}

} // namespace deltavpr::io
