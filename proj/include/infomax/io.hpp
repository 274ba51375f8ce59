#ifndef INFOMAX_IO_HPP
#define INFOMAX_IO_HPP

#include "infomax/core.hpp"
#include "infomax/pipeline.hpp"
#include "infomax/scoring.hpp"

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace infomax::io {

inline constexpr std::string_view kToolVersion = "infomax 0.1.0";

// Embedding file: "EMB1", u32 version = 1, u64 n, u64 dim, then n * dim
// little-endian float32 values in row-major order.
inline constexpr char kEmbeddingMagic[4] = {'E', 'M', 'B', '1'};
inline constexpr std::uint32_t kEmbeddingVersion = 1;

std::string encode_embeddings(const EmbeddingMatrix& embeddings);
EmbeddingMatrix decode_embeddings(std::string_view bytes);

EmbeddingMatrix read_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& embeddings);

/// `index,score` rows with an optional header line.
std::vector<ScoreRow> parse_score_table(std::string_view text);
std::string format_score_table(const ScoreVector& scores);

ScoreVector read_scores(const std::filesystem::path& path);
void write_scores(const std::filesystem::path& path, const ScoreVector& scores);

/// `row,col,weight` rows with an optional header line; the symmetric closure
/// is taken on load.
SparseSimilarity parse_similarity_table(std::string_view text, Index n);
std::string format_similarity_table(const SparseSimilarity& similarity);

SparseSimilarity read_similarity(const std::filesystem::path& path, Index n);
void write_similarity(const std::filesystem::path& path, const SparseSimilarity& similarity);

struct SelectionFile {
  IndexList selected;
  double objective = 0.0;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::vector<double> trace;
  std::string tool_version{kToolVersion};
  /// Optional diagnostics block.
  nlohmann::ordered_json metrics;
};

/// Throws FormatError describing the first violation of the selection schema.
void validate_selection_json(const nlohmann::ordered_json& doc);

nlohmann::ordered_json to_json(const SelectionFile& file);
SelectionFile selection_from_json(const nlohmann::ordered_json& doc);

SelectionFile read_selection(const std::filesystem::path& path);
void write_selection(const std::filesystem::path& path, const SelectionFile& file);

nlohmann::ordered_json to_json(const MetricsReport& report);
std::string format_histogram_csv(const MetricsReport& report);

/// Writes through a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace infomax::io

#endif  // INFOMAX_IO_HPP
