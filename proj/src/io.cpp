#include "infomax/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace infomax::io {

namespace {

template <typename T>
void put_le(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i)
    out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF));
}

template <typename T>
T get_le(std::string_view bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  return static_cast<T>(v);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if (s.front() == '+') s.remove_prefix(1);
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

struct CsvLine {
  std::vector<std::string_view> fields;
  Index line_no;
};

// Splits into comma-separated records, dropping blank lines and an optional
// header (a first line whose first field is not numeric).
std::vector<CsvLine> split_csv(std::string_view text, std::size_t columns, std::string_view what) {
  std::vector<CsvLine> lines;
  Index line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty()) continue;

    CsvLine rec{{}, line_no};
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      rec.fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (rec.fields.size() != columns)
      throw FormatError(std::string(what) + " line " + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " comma-separated fields, got " +
                        std::to_string(rec.fields.size()));
    double probe = 0.0;
    if (lines.empty() && line_no == 1 && !parse_number(rec.fields[0], probe)) continue;
    lines.push_back(std::move(rec));
  }
  return lines;
}

[[noreturn]] void bad_field(std::string_view what, Index line_no, std::string_view field) {
  throw FormatError(std::string(what) + " line " + std::to_string(line_no) + ": cannot parse '" +
                    std::string(field) + "'");
}

}  // namespace

std::string encode_embeddings(const EmbeddingMatrix& embeddings) {
  std::string out;
  const auto n = static_cast<std::uint64_t>(embeddings.n());
  const auto dim = static_cast<std::uint64_t>(embeddings.dim());
  out.reserve(24 + n * dim * 4);
  out.append(kEmbeddingMagic, 4);
  put_le(out, kEmbeddingVersion);
  put_le(out, n);
  put_le(out, dim);
  const auto& data = embeddings.data();
  for (Index r = 0; r < embeddings.n(); ++r)
    for (Index c = 0; c < embeddings.dim(); ++c) put_le(out, std::bit_cast<std::uint32_t>(data(r, c)));
  return out;
}

EmbeddingMatrix decode_embeddings(std::string_view bytes) {
  if (bytes.size() < 24) throw FormatError("embedding file shorter than its 24-byte header");
  if (std::memcmp(bytes.data(), kEmbeddingMagic, 4) != 0) throw FormatError("embedding file has bad magic");
  const auto version = get_le<std::uint32_t>(bytes, 4);
  if (version != kEmbeddingVersion)
    throw FormatError("unsupported embedding file version " + std::to_string(version));
  const auto n = get_le<std::uint64_t>(bytes, 8);
  const auto dim = get_le<std::uint64_t>(bytes, 16);
  if (n == 0 || dim == 0) throw FormatError("embedding file declares n or dim = 0");
  if (dim > (bytes.size() - 24) / 4 || n > (bytes.size() - 24) / 4 / dim ||
      n * dim * 4 != bytes.size() - 24)
    throw FormatError("embedding payload is " + std::to_string(bytes.size() - 24) +
                      " bytes but header declares n = " + std::to_string(n) + ", dim = " +
                      std::to_string(dim));
  EmbeddingMatrix::Storage data(static_cast<Index>(n), static_cast<Index>(dim));
  std::size_t offset = 24;
  for (Index r = 0; r < data.rows(); ++r)
    for (Index c = 0; c < data.cols(); ++c, offset += 4)
      data(r, c) = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
  try {
    return EmbeddingMatrix(std::move(data), false);
  } catch (const InputError& e) {
    throw FormatError(std::string("embedding file: ") + e.what());
  }
}

EmbeddingMatrix read_embeddings(const std::filesystem::path& path) {
  return decode_embeddings(read_file(path));
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& embeddings) {
  write_file_atomic(path, encode_embeddings(embeddings));
}

std::vector<ScoreRow> parse_score_table(std::string_view text) {
  std::vector<ScoreRow> rows;
  for (const auto& rec : split_csv(text, 2, "score table")) {
    ScoreRow row{0, 0.0, rec.line_no};
    if (!parse_number(rec.fields[0], row.index)) bad_field("score table", rec.line_no, rec.fields[0]);
    if (!parse_number(rec.fields[1], row.score)) bad_field("score table", rec.line_no, rec.fields[1]);
    rows.push_back(row);
  }
  return rows;
}

std::string format_score_table(const ScoreVector& scores) {
  std::string out = "index,score\n";
  for (Index i = 0; i < scores.n(); ++i)
    out += std::to_string(i) + "," + format_double(scores.values[i]) + "\n";
  return out;
}

ScoreVector read_scores(const std::filesystem::path& path) {
  const auto rows = parse_score_table(read_file(path));
  if (rows.empty()) throw FormatError(path.string() + ": score table has no rows");
  try {
    return load_scores(rows);
  } catch (const InputError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_scores(const std::filesystem::path& path, const ScoreVector& scores) {
  write_file_atomic(path, format_score_table(scores));
}

SparseSimilarity parse_similarity_table(std::string_view text, Index n) {
  std::vector<SparseSimilarity::Entry> entries;
  for (const auto& rec : split_csv(text, 3, "similarity table")) {
    SparseSimilarity::Entry e{0, 0, 0.0};
    if (!parse_number(rec.fields[0], e.row)) bad_field("similarity table", rec.line_no, rec.fields[0]);
    if (!parse_number(rec.fields[1], e.col)) bad_field("similarity table", rec.line_no, rec.fields[1]);
    if (!parse_number(rec.fields[2], e.weight)) bad_field("similarity table", rec.line_no, rec.fields[2]);
    entries.push_back(e);
  }
  try {
    return SparseSimilarity::from_entries(n, entries);
  } catch (const InputError& e) {
    throw FormatError(std::string("similarity table: ") + e.what());
  }
}

std::string format_similarity_table(const SparseSimilarity& similarity) {
  std::string out = "row,col,weight\n";
  for (Index r = 0; r < similarity.n(); ++r) {
    const auto cols = similarity.row_cols(r);
    const auto w = similarity.row_weights(r);
    for (std::size_t j = 0; j < cols.size(); ++j)
      out += std::to_string(r) + "," + std::to_string(cols[j]) + "," + format_double(w[j]) + "\n";
  }
  return out;
}

SparseSimilarity read_similarity(const std::filesystem::path& path, Index n) {
  return parse_similarity_table(read_file(path), n);
}

void write_similarity(const std::filesystem::path& path, const SparseSimilarity& similarity) {
  write_file_atomic(path, format_similarity_table(similarity));
}

void validate_selection_json(const nlohmann::ordered_json& doc) {
  auto fail = [](const std::string& msg) { throw FormatError("selection file: " + msg); };
  if (!doc.is_object()) fail("document must be an object");
  for (const char* key : {"selected", "objective", "params", "trace", "tool_version"})
    if (!doc.contains(key)) fail(std::string("missing required key '") + key + "'");

  const auto& selected = doc["selected"];
  if (!selected.is_array()) fail("'selected' must be an array");
  std::int64_t prev = -1;
  for (const auto& v : selected) {
    if (!v.is_number_integer()) fail("'selected' entries must be integers");
    const auto idx = v.get<std::int64_t>();
    if (idx < 0) fail("'selected' entries must be >= 0");
    if (idx <= prev) fail("'selected' must be strictly ascending");
    prev = idx;
  }
  if (!doc["objective"].is_number()) fail("'objective' must be a number");
  if (!doc["params"].is_object()) fail("'params' must be an object");
  if (!doc["trace"].is_array()) fail("'trace' must be an array");
  for (const auto& v : doc["trace"])
    if (!v.is_number()) fail("'trace' entries must be numbers");
  if (!doc["tool_version"].is_string()) fail("'tool_version' must be a string");
  if (doc.contains("metrics") && !doc["metrics"].is_object()) fail("'metrics' must be an object");
}

nlohmann::ordered_json to_json(const SelectionFile& file) {
  nlohmann::ordered_json doc;
  doc["tool_version"] = file.tool_version;
  doc["selected"] = file.selected;
  doc["objective"] = file.objective;
  doc["params"] = file.params;
  doc["trace"] = file.trace;
  if (!file.metrics.is_null()) doc["metrics"] = file.metrics;
  return doc;
}

SelectionFile selection_from_json(const nlohmann::ordered_json& doc) {
  validate_selection_json(doc);
  SelectionFile file;
  file.selected = doc["selected"].get<IndexList>();
  file.objective = doc["objective"].get<double>();
  file.params = doc["params"];
  file.trace = doc["trace"].get<std::vector<double>>();
  file.tool_version = doc["tool_version"].get<std::string>();
  if (doc.contains("metrics")) file.metrics = doc["metrics"];
  return file;
}

SelectionFile read_selection(const std::filesystem::path& path) {
  nlohmann::ordered_json doc;
  try {
    doc = nlohmann::ordered_json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return selection_from_json(doc);
}

void write_selection(const std::filesystem::path& path, const SelectionFile& file) {
  const auto doc = to_json(file);
  validate_selection_json(doc);
  write_file_atomic(path, doc.dump(2) + "\n");
}

nlohmann::ordered_json to_json(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["objective"] = report.objective;
  doc["coverage_mean"] = report.coverage_mean;
  doc["coverage_max"] = report.coverage_max;
  const auto& q = report.score_quantiles;
  doc["score_quantiles"] = {{"min", q[0]}, {"q25", q[1]}, {"median", q[2]}, {"q75", q[3]}, {"max", q[4]}};
  doc["score_histogram"] = {{"edges", report.histogram_edges}, {"counts", report.histogram_counts}};
  return doc;
}

std::string format_histogram_csv(const MetricsReport& report) {
  std::string out = "bin,lower,upper,count\n";
  for (int b = 0; b < kHistogramBins; ++b)
    out += std::to_string(b) + "," + format_double(report.histogram_edges[b]) + "," +
           format_double(report.histogram_edges[b + 1]) + "," +
           std::to_string(report.histogram_counts[b]) + "\n";
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw FormatError("write to " + tmp.string() + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw FormatError("cannot move output into place at " + path.string());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace infomax::io
