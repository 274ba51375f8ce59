#ifndef INFOMAX_SIMGRAPH_HPP
#define INFOMAX_SIMGRAPH_HPP

#include "infomax/core.hpp"

namespace infomax {

struct KnnParams {
  Index k = 5;
  bool clamp_negative = true;
};

/// Per-sample top-k neighbor lists before symmetrization. Row z holds its k
/// neighbors ordered by decreasing similarity (ties to the lower index).
///
/// This is also the extension point for approximate neighbor search: any
/// backend that fills a DirectedKnn can be turned into a SparseSimilarity
/// with symmetrize_knn().
struct DirectedKnn {
  Index n = 0;
  Index k = 0;
  std::vector<int> neighbors;  // n * k
  std::vector<double> weights;  // n * k, clamped when requested

  std::span<const int> row(Index z) const {
    return std::span<const int>(neighbors).subspan(static_cast<std::size_t>(z * k),
                                                   static_cast<std::size_t>(k));
  }
  std::span<const double> row_weights(Index z) const {
    return std::span<const double>(weights).subspan(static_cast<std::size_t>(z * k),
                                                    static_cast<std::size_t>(k));
  }
};

namespace detail {
RowMatrix<double> l2_normalize_rows(RowMatrix<double> rows);
DirectedKnn exact_knn(const RowMatrix<double>& unit_rows, const KnnParams& params);
}  // namespace detail

/// Scales every row to unit L2 norm. Throws InputError naming the first
/// zero-norm row.
template <typename Scalar>
EmbeddingMatrixT<Scalar> l2_normalize(const EmbeddingMatrixT<Scalar>& embeddings) {
  RowMatrix<double> unit = detail::l2_normalize_rows(embeddings.data().template cast<double>());
  return EmbeddingMatrixT<Scalar>(unit.template cast<Scalar>(), true);
}

/// Exact brute-force top-k by inner product on normalized embeddings.
template <typename Scalar>
DirectedKnn directed_knn(const EmbeddingMatrixT<Scalar>& embeddings, const KnnParams& params) {
  if (!embeddings.normalized()) throw InputError("kNN similarity requires normalized embeddings");
  return detail::exact_knn(embeddings.data().template cast<double>(), params);
}

/// Max-union symmetrization: K[z][s] = K[s][z] = max of the two directed
/// weights, with an edge present when either direction is.
SparseSimilarity symmetrize_knn(const DirectedKnn& knn);

template <typename Scalar>
SparseSimilarity build_knn_similarity(const EmbeddingMatrixT<Scalar>& embeddings,
                                      const KnnParams& params) {
  return symmetrize_knn(directed_knn(embeddings, params));
}

}  // namespace infomax

#endif  // INFOMAX_SIMGRAPH_HPP
