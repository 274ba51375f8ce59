#include "doctest.h"
#include "test_support.hpp"

#include "infomax/simgraph.hpp"

#include <cmath>
#include <numbers>

using namespace infomax;
using namespace infomax::testing;

namespace {

EmbeddingMatrix rows(std::initializer_list<std::initializer_list<float>> values, bool normalized = false) {
  EmbeddingMatrix::Storage data(static_cast<Index>(values.size()),
                                static_cast<Index>(values.begin()->size()));
  Index r = 0;
  for (const auto& row : values) {
    Index c = 0;
    for (float v : row) data(r, c++) = v;
    ++r;
  }
  return EmbeddingMatrix(std::move(data), normalized);
}

EmbeddingMatrix on_circle(std::initializer_list<double> degrees) {
  EmbeddingMatrix::Storage data(static_cast<Index>(degrees.size()), 2);
  Index r = 0;
  for (double deg : degrees) {
    const double rad = deg * std::numbers::pi / 180.0;
    data(r, 0) = static_cast<float>(std::cos(rad));
    data(r, 1) = static_cast<float>(std::sin(rad));
    ++r;
  }
  return EmbeddingMatrix(std::move(data), true);
}

}  // namespace

TEST_CASE("l2_normalize") {
  const auto unit = l2_normalize(rows({{3, 4}, {1, 0}}));
  CHECK(unit.normalized());
  CHECK(unit.data()(0, 0) == doctest::Approx(0.6));
  CHECK(unit.data()(0, 1) == doctest::Approx(0.8));
  CHECK(unit.data()(1, 0) == 1.0f);
  CHECK(unit.data()(1, 1) == 0.0f);

  try {
    l2_normalize(rows({{1, 1}, {0, 0}}));
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("row 1") != std::string::npos);
  }
}

TEST_CASE("kNN on tiny hand-checked configurations") {
  SUBCASE("identical vectors") {
    const auto k = build_knn_similarity(rows({{1, 0}, {1, 0}}, true), {1, true});
    CHECK(k.nnz() == 2);
    CHECK(k.at(0, 1) == 1.0);
  }
  SUBCASE("orthogonal vectors clamp to zero") {
    const auto k = build_knn_similarity(rows({{1, 0}, {0, 1}}, true), {1, true});
    CHECK(k.nnz() == 2);
    CHECK(k.at(0, 1) == 0.0);
  }
  SUBCASE("three directions on the circle") {
    const auto k = build_knn_similarity(on_circle({0, 10, 90}), {1, true});
    CHECK(k.at(0, 1) == doctest::Approx(std::cos(10.0 * std::numbers::pi / 180)).epsilon(1e-6));
    CHECK(k.at(1, 2) == doctest::Approx(std::cos(80.0 * std::numbers::pi / 180)).epsilon(1e-6));
    CHECK(k.at(0, 2) == 0.0);
    CHECK(k.row_cols(0).size() == 1);
    CHECK(k.row_cols(1).size() == 2);
    CHECK(k.row_cols(2).size() == 1);
  }
  SUBCASE("negative cosine survives without clamping") {
    const auto k = build_knn_similarity(rows({{1, 0}, {-1, 0}}, true), {1, false});
    CHECK(k.at(0, 1) == -1.0);
    const auto clamped = build_knn_similarity(rows({{1, 0}, {-1, 0}}, true), {1, true});
    CHECK(clamped.at(0, 1) == 0.0);
  }
}

TEST_CASE("kNN preconditions") {
  const auto unit = on_circle({0, 10, 90});
  CHECK_THROWS_AS(build_knn_similarity(unit, {3, true}), InputError);
  CHECK_THROWS_AS(build_knn_similarity(unit, {0, true}), InputError);
  CHECK_THROWS_AS(build_knn_similarity(rows({{3, 4}, {1, 0}}), {1, true}), InputError);
}

TEST_CASE("kNN ties go to the lower column") {
  // Rows 1, 2 and 3 are identical, so row 0 sees a three-way tie.
  const auto unit = rows({{1, 0}, {0, 1}, {0, 1}, {0, 1}}, true);
  const auto knn = directed_knn(unit, {2, true});
  CHECK(knn.row(0)[0] == 1);
  CHECK(knn.row(0)[1] == 2);
  CHECK(knn.row(3)[0] == 1);
  CHECK(knn.row(3)[1] == 2);
}

TEST_CASE("kNN graph properties on random embeddings") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Index n = 150 + 150 * static_cast<Index>(seed);
    const Index k = 5;
    const auto unit = l2_normalize(gaussian_embeddings(n, 16, seed));
    const auto knn = directed_knn(unit, {k, true});
    const auto oracle = sorted_knn_oracle(unit, k);
    for (Index z = 0; z < n; ++z) {
      const auto got = knn.row(z);
      CHECK(std::vector<Index>(got.begin(), got.end()) == oracle[z]);
    }

    const auto sim = symmetrize_knn(knn);
    CHECK_NOTHROW(SparseSimilarity(sim.n(), {sim.row_offsets().begin(), sim.row_offsets().end()},
                                   {sim.col_indices().begin(), sim.col_indices().end()},
                                   {sim.weights().begin(), sim.weights().end()}));
    for (Index z = 0; z < n; ++z) {
      CHECK(static_cast<Index>(sim.row_cols(z).size()) >= k);
      for (double w : sim.row_weights(z)) {
        CHECK(w >= 0.0);
        CHECK(w <= 1.0);
      }
      // Max-union: every directed edge survives with at least its own weight.
      for (Index j = 0; j < k; ++j) CHECK(sim.at(z, knn.row(z)[j]) >= knn.row_weights(z)[j]);
    }

    const auto again = build_knn_similarity(unit, {k, true});
    CHECK(std::ranges::equal(again.row_offsets(), sim.row_offsets()));
    CHECK(std::ranges::equal(again.col_indices(), sim.col_indices()));
    CHECK(std::ranges::equal(again.weights(), sim.weights()));
  }
}
