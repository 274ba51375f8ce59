#include "infomax/core.hpp"

#include <algorithm>
#include <numeric>

namespace infomax {

ScoreVector::ScoreVector(Eigen::VectorXd v, bool is_normalized)
    : values(std::move(v)), normalized(is_normalized) {
  if (!values.allFinite()) throw InputError("score vector contains non-finite values");
  if (normalized && values.size() > 0 && (values.minCoeff() < 0.0 || values.maxCoeff() > 1.0))
    throw InputError("score vector flagged normalized but leaves [0, 1]");
}

SparseSimilarity::SparseSimilarity(Index n, std::vector<int> row_offsets,
                                   std::vector<int> col_indices, std::vector<double> weights)
    : n_(n),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      weights_(std::move(weights)) {
  if (n_ < 0) throw InputError("similarity order must be nonnegative");
  if (static_cast<Index>(row_offsets_.size()) != n_ + 1 || row_offsets_.front() != 0)
    throw InputError("row_offsets must have n + 1 entries starting at 0");
  if (col_indices_.size() != weights_.size() ||
      static_cast<std::size_t>(row_offsets_.back()) != col_indices_.size())
    throw InputError("CSR arrays have inconsistent lengths");

  for (Index r = 0; r < n_; ++r) {
    if (row_offsets_[r + 1] < row_offsets_[r]) throw InputError("row_offsets must be nondecreasing");
    const auto cols = row_cols(r);
    const auto w = row_weights(r);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const int c = cols[j];
      if (c < 0 || c >= n_) throw InputError("column index out of range in row " + std::to_string(r));
      if (c == r) throw InputError("diagonal entry stored in row " + std::to_string(r));
      if (j > 0 && cols[j - 1] >= c)
        throw InputError("columns not strictly increasing in row " + std::to_string(r));
      if (!(w[j] >= -1.0 && w[j] <= 1.0))
        throw InputError("weight outside [-1, 1] in row " + std::to_string(r));
    }
  }
  for (Index r = 0; r < n_; ++r) {
    const auto cols = row_cols(r);
    const auto w = row_weights(r);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const auto mirror = row_cols(cols[j]);
      const auto it = std::lower_bound(mirror.begin(), mirror.end(), static_cast<int>(r));
      if (it == mirror.end() || *it != r || row_weights(cols[j])[it - mirror.begin()] != w[j])
        throw InputError("similarity is not symmetric at (" + std::to_string(r) + ", " +
                         std::to_string(cols[j]) + ")");
    }
  }
}

SparseSimilarity SparseSimilarity::empty(Index n) {
  return SparseSimilarity(n, std::vector<int>(static_cast<std::size_t>(n) + 1, 0), {}, {});
}

SparseSimilarity SparseSimilarity::from_entries(Index n, std::span<const Entry> entries) {
  struct Directed {
    int row, col;
    double weight;
  };
  std::vector<Directed> all;
  all.reserve(entries.size() * 2);
  for (const auto& e : entries) {
    if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
      throw InputError("similarity entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                       ") out of range for n = " + std::to_string(n));
    if (e.row == e.col) throw InputError("diagonal similarity entry at " + std::to_string(e.row));
    all.push_back({static_cast<int>(e.row), static_cast<int>(e.col), e.weight});
    all.push_back({static_cast<int>(e.col), static_cast<int>(e.row), e.weight});
  }
  std::sort(all.begin(), all.end(), [](const Directed& a, const Directed& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<int> offsets(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> cols;
  std::vector<double> weights;
  cols.reserve(all.size());
  weights.reserve(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!cols.empty() && i > 0 && all[i - 1].row == all[i].row && all[i - 1].col == all[i].col) {
      weights.back() = std::max(weights.back(), all[i].weight);
      continue;
    }
    cols.push_back(all[i].col);
    weights.push_back(all[i].weight);
    ++offsets[all[i].row + 1];
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseSimilarity(n, std::move(offsets), std::move(cols), std::move(weights));
}

double SparseSimilarity::at(Index r, Index c) const {
  const auto cols = row_cols(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<int>(c));
  if (it == cols.end() || *it != c) return 0.0;
  return row_weights(r)[it - cols.begin()];
}

SparseSimilarity::EigenView SparseSimilarity::view() const {
  return EigenView(n_, n_, nnz(), row_offsets_.data(), col_indices_.data(), weights_.data());
}

Eigen::MatrixXd SparseSimilarity::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n_, n_);
  for (Index r = 0; r < n_; ++r) {
    const auto cols = row_cols(r);
    const auto w = row_weights(r);
    for (std::size_t j = 0; j < cols.size(); ++j) dense(r, cols[j]) = w[j];
  }
  return dense;
}

SelectionProblem::SelectionProblem(ScoreVector scores, SparseSimilarity similarity, Index budget,
                                   double alpha)
    : scores_(std::move(scores)), similarity_(std::move(similarity)), budget_(budget), alpha_(alpha) {
  if (scores_.n() != similarity_.n())
    throw InputError("score count " + std::to_string(scores_.n()) + " does not match similarity order " +
                     std::to_string(similarity_.n()));
  if (budget_ < 1 || budget_ > scores_.n())
    throw InputError("budget " + std::to_string(budget_) + " outside [1, " +
                     std::to_string(scores_.n()) + "]");
  if (!(alpha_ >= 0.0) || !std::isfinite(alpha_)) throw InputError("alpha must be finite and >= 0");
}

void check_selection(Index n, std::span<const Index> selected) {
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  for (const Index i : selected) {
    if (i < 0 || i >= n)
      throw InputError("index " + std::to_string(i) + " out of range [0, " + std::to_string(n) + ")");
    if (seen[i]) throw InputError("duplicate index " + std::to_string(i));
    seen[i] = true;
  }
}

double evaluate_objective(const SelectionProblem& problem, std::span<const Index> selected) {
  check_selection(problem.n(), selected);
  IndexList sorted(selected.begin(), selected.end());
  std::sort(sorted.begin(), sorted.end());

  const auto& scores = problem.scores().values;
  const auto& k = problem.similarity();
  std::vector<bool> member(static_cast<std::size_t>(problem.n()), false);
  for (const Index z : sorted) member[z] = true;

  double linear = 0.0;
  double pairwise = 0.0;
  for (const Index z : sorted) {
    linear += scores[z];
    const auto cols = k.row_cols(z);
    const auto w = k.row_weights(z);
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (member[cols[j]]) pairwise += w[j];
  }
  return linear - problem.alpha() * pairwise;
}

IndexList top_indices(const Eigen::Ref<const Eigen::VectorXd>& values, Index count) {
  const Index n = values.size();
  if (count < 0 || count > n) throw InputError("top-count outside [0, n]");
  IndexList order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::partial_sort(order.begin(), order.begin() + count, order.end(), [&](Index a, Index b) {
    return values[a] != values[b] ? values[a] > values[b] : a < b;
  });
  order.resize(static_cast<std::size_t>(count));
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace infomax
