#include "doctest.h"
#include "test_support.hpp"

#include "infomax/io.hpp"
#include "infomax/rng.hpp"

#include <bit>
#include <unistd.h>

using namespace infomax;
using namespace infomax::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("infomax_io_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

}  // namespace

TEST_CASE("embedding header layout") {
  EmbeddingMatrix::Storage x(1, 2);
  x << 1.0f, -2.0f;
  const std::string bytes = io::encode_embeddings(EmbeddingMatrix(x));
  REQUIRE(bytes.size() == 32);
  CHECK(bytes.substr(0, 4) == "EMB1");
  CHECK(bytes.substr(4, 4) == std::string("\x01\x00\x00\x00", 4));
  CHECK(bytes.substr(8, 8) == std::string("\x01\0\0\0\0\0\0\0", 8));
  CHECK(bytes.substr(16, 8) == std::string("\x02\0\0\0\0\0\0\0", 8));
  // 1.0f = 0x3f800000, -2.0f = 0xc0000000, little-endian.
  CHECK(bytes.substr(24, 4) == std::string("\x00\x00\x80\x3f", 4));
  CHECK(bytes.substr(28, 4) == std::string("\x00\x00\x00\xc0", 4));
}

TEST_CASE("embedding round trip is bit exact") {
  TempDir dir;
  auto emb = gaussian_embeddings(37, 11, 4);
  EmbeddingMatrix::Storage x = emb.data();
  x(0, 0) = -0.0f;
  x(1, 1) = std::numeric_limits<float>::denorm_min();
  x(2, 2) = std::numeric_limits<float>::max();
  const EmbeddingMatrix special(x);
  const auto file = dir.path / "e.emb";
  io::write_embeddings(file, special);
  const auto back = io::read_embeddings(file);
  REQUIRE(back.n() == 37);
  REQUIRE(back.dim() == 11);
  for (Index r = 0; r < 37; ++r)
    for (Index c = 0; c < 11; ++c)
      CHECK(std::bit_cast<std::uint32_t>(back.data()(r, c)) == std::bit_cast<std::uint32_t>(x(r, c)));
}

TEST_CASE("embedding format errors") {
  const std::string good = io::encode_embeddings(gaussian_embeddings(3, 2, 1));
  CHECK_THROWS_AS(io::decode_embeddings(good.substr(0, 10)), FormatError);
  CHECK_THROWS_AS(io::decode_embeddings(good.substr(0, good.size() - 1)), FormatError);
  CHECK_THROWS_AS(io::decode_embeddings(good + "x"), FormatError);
  std::string magic = good;
  magic[0] = 'X';
  CHECK_THROWS_AS(io::decode_embeddings(magic), FormatError);
  std::string version = good;
  version[4] = 2;
  CHECK_THROWS_AS(io::decode_embeddings(version), FormatError);
  // A huge declared n must not overflow the size check.
  std::string huge = good;
  for (int i = 8; i < 16; ++i) huge[i] = '\xff';
  CHECK_THROWS_AS(io::decode_embeddings(huge), FormatError);
  std::string nan = good;
  nan.replace(24, 4, std::string("\x00\x00\xc0\x7f", 4));
  CHECK_THROWS_AS(io::decode_embeddings(nan), FormatError);
  CHECK_THROWS_AS(io::read_embeddings("/nonexistent/file.emb"), FormatError);
}

TEST_CASE("score table parsing") {
  const auto with_header = io::parse_score_table("index,score\n1,0.5\n0,0.25\n");
  REQUIRE(with_header.size() == 2);
  CHECK(with_header[0].index == 1);
  CHECK(with_header[0].line == 2);
  CHECK(load_scores(with_header).values == Eigen::Vector2d(0.25, 0.5));

  const auto bare = io::parse_score_table("0,1e-3\r\n1, 2\n\n");
  CHECK(load_scores(bare).values == Eigen::Vector2d(1e-3, 2.0));

  CHECK_THROWS_AS(io::parse_score_table("0,0.1\n1\n"), FormatError);
  CHECK_THROWS_AS(io::parse_score_table("0,0.1\n1,abc\n"), FormatError);
  CHECK_THROWS_AS(io::parse_score_table("0,0.1\nindex,score\n"), FormatError);
  try {
    io::parse_score_table("0,0.1\n1,0.2,0.3\n");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("score files round trip bit exactly") {
  TempDir dir;
  const auto v = uniform_values(40, 3);
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), 40);
  x[0] = 1.0 / 3.0;
  x[1] = -1e-300;
  const ScoreVector scores(x);
  io::write_scores(dir.path / "s.csv", scores);
  const auto back = io::read_scores(dir.path / "s.csv");
  for (Index i = 0; i < 40; ++i) CHECK(bits(back.values[i]) == bits(x[i]));

  io::write_file_atomic(dir.path / "dup.csv", "0,1\n0,2\n");
  CHECK_THROWS_AS(io::read_scores(dir.path / "dup.csv"), FormatError);
  io::write_file_atomic(dir.path / "empty.csv", "index,score\n");
  CHECK_THROWS_AS(io::read_scores(dir.path / "empty.csv"), FormatError);
}

TEST_CASE("similarity table takes the symmetric closure") {
  const auto k = io::parse_similarity_table("row,col,weight\n0,2,0.5\n1,0,0.25\n", 3);
  CHECK(k.at(2, 0) == 0.5);
  CHECK(k.at(0, 1) == 0.25);
  CHECK(k.nnz() == 4);
  const auto again = io::parse_similarity_table(io::format_similarity_table(k), 3);
  CHECK(std::ranges::equal(again.weights(), k.weights()));
  CHECK_THROWS_AS(io::parse_similarity_table("0,0,0.5\n", 3), FormatError);
  CHECK_THROWS_AS(io::parse_similarity_table("0,5,0.5\n", 3), FormatError);
  CHECK_THROWS_AS(io::parse_similarity_table("0,1,2.0\n", 3), FormatError);
}

TEST_CASE("selection file round trip") {
  TempDir dir;
  Rng rng(9);
  io::SelectionFile file;
  file.selected = {0, 3, 17, 1000000007};
  file.objective = 1.0 / 7.0;
  file.params = {{"alpha", 0.3}, {"k", 5}, {"temperature", "auto"}};
  for (int i = 0; i < 50; ++i) file.trace.push_back(std::ldexp(rng.uniform(), -static_cast<int>(rng.below(900))));
  file.trace.push_back(5e-324);
  file.metrics = {{"coverage_mean", 0.1}};
  io::write_selection(dir.path / "sel.json", file);
  const auto back = io::read_selection(dir.path / "sel.json");
  CHECK(back.selected == file.selected);
  CHECK(bits(back.objective) == bits(file.objective));
  REQUIRE(back.trace.size() == file.trace.size());
  for (std::size_t i = 0; i < file.trace.size(); ++i) CHECK(bits(back.trace[i]) == bits(file.trace[i]));
  CHECK(back.params == file.params);
  CHECK(back.tool_version == io::kToolVersion);
  CHECK(back.metrics == file.metrics);

  // Re-serializing gives the same bytes.
  io::write_selection(dir.path / "again.json", back);
  CHECK(io::read_file(dir.path / "again.json") == io::read_file(dir.path / "sel.json"));
}

TEST_CASE("selection schema violations") {
  using nlohmann::ordered_json;
  const ordered_json good = io::to_json(io::SelectionFile{{1, 2}, 0.5, ordered_json::object(), {0.1}});
  CHECK_NOTHROW(io::validate_selection_json(good));

  auto broken = [&](auto edit) {
    ordered_json doc = good;
    edit(doc);
    return doc;
  };
  CHECK_THROWS_AS(io::validate_selection_json(broken([](auto& d) { d.erase("trace"); })), FormatError);
  CHECK_THROWS_AS(io::validate_selection_json(broken([](auto& d) { d["selected"] = {2, 1}; })), FormatError);
  CHECK_THROWS_AS(io::validate_selection_json(broken([](auto& d) { d["selected"] = {1, 1}; })), FormatError);
  CHECK_THROWS_AS(io::validate_selection_json(broken([](auto& d) { d["selected"] = {-1}; })), FormatError);
  CHECK_THROWS_AS(io::validate_selection_json(broken([](auto& d) { d["objective"] = "x"; })), FormatError);
  CHECK_THROWS_AS(io::validate_selection_json(broken([](auto& d) { d["params"] = 3; })), FormatError);
  CHECK_THROWS_AS(io::validate_selection_json(ordered_json::array()), FormatError);

  TempDir dir;
  io::write_file_atomic(dir.path / "bad.json", "{not json");
  CHECK_THROWS_AS(io::read_selection(dir.path / "bad.json"), FormatError);
}

TEST_CASE("metrics export") {
  MetricsReport r;
  r.objective = 2.5;
  for (int b = 0; b <= kHistogramBins; ++b) r.histogram_edges[b] = b * 0.05;
  r.histogram_counts[3] = 4;
  const auto doc = io::to_json(r);
  CHECK(doc["score_histogram"]["counts"][3] == 4);
  CHECK(doc["score_quantiles"].contains("median"));
  const auto csv = io::format_histogram_csv(r);
  CHECK(csv.rfind("bin,lower,upper,count\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == kHistogramBins + 1);
  CHECK(csv.find("\n3,0.15000000000000002,0.2,4\n") != std::string::npos);
}

TEST_CASE("atomic writes leave no temp file behind") {
  TempDir dir;
  io::write_file_atomic(dir.path / "a.txt", "one");
  io::write_file_atomic(dir.path / "a.txt", "two");
  CHECK(io::read_file(dir.path / "a.txt") == "two");
  CHECK(std::distance(fs::directory_iterator(dir.path), fs::directory_iterator()) == 1);
  CHECK_THROWS_AS(io::write_file_atomic(dir.path / "missing" / "a.txt", "x"), FormatError);
}
