#include "infomax/simgraph.hpp"

#include <algorithm>
#include <limits>

namespace infomax {
namespace detail {

RowMatrix<double> l2_normalize_rows(RowMatrix<double> rows) {
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    const double norm = rows.row(r).norm();
    if (!(norm > 0.0)) throw InputError("row " + std::to_string(r) + " has zero L2 norm");
    rows.row(r) /= norm;
  }
  return rows;
}

namespace {

constexpr Eigen::Index kRowTile = 256;
constexpr Eigen::Index kColTile = 2048;

// Sorted best-first buffer of k candidates for one query row.
struct TopK {
  double* sims;
  int* cols;
  Index k;

  bool beats_worst(double s, int c) const {
    const double ws = sims[k - 1];
    return s > ws || (s == ws && c < cols[k - 1]);
  }

  void insert(double s, int c) {
    Index pos = k - 1;
    while (pos > 0 && (s > sims[pos - 1] || (s == sims[pos - 1] && c < cols[pos - 1]))) {
      sims[pos] = sims[pos - 1];
      cols[pos] = cols[pos - 1];
      --pos;
    }
    sims[pos] = s;
    cols[pos] = c;
  }
};

}  // namespace

DirectedKnn exact_knn(const RowMatrix<double>& unit_rows, const KnnParams& params) {
  const Index n = unit_rows.rows();
  const Index k = params.k;
  if (k < 1 || k >= n)
    throw InputError("k = " + std::to_string(k) + " must satisfy 1 <= k < n = " + std::to_string(n));
  if (n > std::numeric_limits<int>::max()) throw InputError("too many samples for 32-bit indices");

  DirectedKnn out;
  out.n = n;
  out.k = k;
  out.neighbors.assign(static_cast<std::size_t>(n * k), std::numeric_limits<int>::max());
  std::vector<double> raw(static_cast<std::size_t>(n * k), -std::numeric_limits<double>::infinity());

  RowMatrix<double> block;
  for (Eigen::Index r0 = 0; r0 < n; r0 += kRowTile) {
    const Eigen::Index rows = std::min<Eigen::Index>(kRowTile, n - r0);
    for (Eigen::Index c0 = 0; c0 < n; c0 += kColTile) {
      const Eigen::Index cols = std::min<Eigen::Index>(kColTile, n - c0);
      block.noalias() = unit_rows.middleRows(r0, rows) * unit_rows.middleRows(c0, cols).transpose();
      for (Eigen::Index i = 0; i < rows; ++i) {
        const Index z = r0 + i;
        TopK top{raw.data() + z * k, out.neighbors.data() + z * k, k};
        for (Eigen::Index j = 0; j < cols; ++j) {
          const int s = static_cast<int>(c0 + j);
          if (s == z) continue;
          const double sim = block(i, j);
          if (top.beats_worst(sim, s)) top.insert(sim, s);
        }
      }
    }
  }

  out.weights.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    double w = std::min(raw[i], 1.0);
    if (params.clamp_negative) w = std::max(w, 0.0);
    out.weights[i] = std::max(w, -1.0);
  }
  return out;
}

}  // namespace detail

SparseSimilarity symmetrize_knn(const DirectedKnn& knn) {
  std::vector<SparseSimilarity::Entry> entries;
  entries.reserve(knn.neighbors.size());
  for (Index z = 0; z < knn.n; ++z) {
    const auto nbrs = knn.row(z);
    const auto w = knn.row_weights(z);
    for (Index j = 0; j < knn.k; ++j) entries.push_back({z, nbrs[j], w[j]});
  }
  return SparseSimilarity::from_entries(knn.n, entries);
}

}  // namespace infomax
