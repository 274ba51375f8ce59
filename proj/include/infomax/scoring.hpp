#ifndef INFOMAX_SCORING_HPP
#define INFOMAX_SCORING_HPP

#include "infomax/core.hpp"

#include <cstdint>

namespace infomax {

struct KMeansParams {
  Index clusters = 1;
  int max_iters = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

struct KMeansResult {
  RowMatrix<double> centroids;
  std::vector<Index> assignment;
  /// Distance from each sample to its assigned centroid.
  Eigen::VectorXd distances;
  /// Sum of squared distances after every assignment step.
  std::vector<double> inertia;
  int iterations = 0;
};

namespace detail {
KMeansResult lloyd_kmeans(const RowMatrix<double>& points, const KMeansParams& params);
}

/// Lloyd iterations from a k-means++ seeding (Euclidean). A cluster that
/// empties is reseeded at the sample farthest from its current centroid.
template <typename Scalar>
KMeansResult kmeans(const EmbeddingMatrixT<Scalar>& embeddings, const KMeansParams& params) {
  return detail::lloyd_kmeans(embeddings.data().template cast<double>(), params);
}

/// Self-supervised prototype score: distance from each sample to its k-means
/// centroid. Raw (not normalized).
template <typename Scalar>
ScoreVector ssp_scores(const EmbeddingMatrixT<Scalar>& embeddings, const KMeansParams& params) {
  return ScoreVector(kmeans(embeddings, params).distances, false);
}

/// Min-max map to [0, 1]; a constant vector maps to 0.5 everywhere.
ScoreVector normalize_scores(const ScoreVector& scores);

/// One parsed `index,score` record; `line` is the 1-based source line used in
/// error messages.
struct ScoreRow {
  Index index;
  double score;
  Index line;
};

/// Dense vector in index order. Indices must cover 0..n-1 exactly once.
ScoreVector load_scores(std::span<const ScoreRow> rows);

}  // namespace infomax

#endif  // INFOMAX_SCORING_HPP
