#pragma once

#include "deltavpr/calibration.hpp"
#include "deltavpr/evaluation.hpp"
#include "deltavpr/matching.hpp"
#include "deltavpr/reduction.hpp"
#include "deltavpr/series.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace deltavpr::io {

// Descriptor container, all fields little-endian:
//
//   offset  size  field
//        0     4  magic "DVPR"
//        4     4  format_version (u32, currently 1)
//        8     8  T, frame count (u64)
//       16     8  D, dimension (u64)
//       24     4  dtype (u32): 1 = float32, 2 = float64
//       28     -  payload, T*D values, row-major
inline constexpr char kMagic[4] = {'D', 'V', 'P', 'R'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kHeaderSize = 28;

enum class DType : std::uint32_t { Float32 = 1, Float64 = 2 };

std::size_t dtype_size(DType dtype);

/// Encodes a matrix in the container format.
std::vector<std::uint8_t> encode_matrix(const Matrix& m, DType dtype = DType::Float32);
/// Decodes a container; `source` names the input in error messages.
Matrix decode_matrix(std::span<const std::uint8_t> bytes, const std::string& source = "<buffer>");

Matrix read_matrix(const std::filesystem::path& path);
void write_matrix(const std::filesystem::path& path, const Matrix& m, DType dtype = DType::Float32);

/// Reads a .dvpr container, or a CSV (one frame per line, optional header)
/// when the extension is .csv.
DescriptorSeries read_descriptors(const std::filesystem::path& path);
void write_descriptors(const std::filesystem::path& path, const DescriptorSeries& series,
                       DType dtype = DType::Float32);

/// Numeric CSV with an optional non-numeric header line.
Matrix read_csv_matrix(const std::filesystem::path& path);

/// Two-column x,y CSV in meters.
PositionMatrix read_positions(const std::filesystem::path& path);
void write_positions(const std::filesystem::path& path, const PositionMatrix& positions);

/// query_idx,ref_idx CSV. Rows may come in any order but must cover every
/// query index exactly once.
GroundTruth read_ground_truth(const std::filesystem::path& path, RadiusMode mode, double radius);
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& gt);

/// query_idx,ref_idx,distance,correct. `query_indices` labels each match
/// row; empty means 0..n-1.
void write_matches_csv(const std::filesystem::path& path, const MatchSet& matches,
                       const std::vector<bool>& correct, std::span<const std::size_t> query_indices = {});
/// threshold,precision,recall
void write_pr_csv(const std::filesystem::path& path, const PrCurve& curve);
/// offset,median_distance
void write_profile_csv(const std::filesystem::path& path, const SelfDistanceProfile& profile);

/// PCA model as one float64 container of shape (k + 1) x (D + 1): row 0
/// holds [whiten flag, mean], row i holds [variance_i, component_i].
void write_pca_model(const std::filesystem::path& path, const PcaModel& model);
PcaModel read_pca_model(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double value);

} // namespace deltavpr::io
