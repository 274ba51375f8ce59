#ifndef INFOMAX_CORE_HPP
#define INFOMAX_CORE_HPP

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace infomax {

using Index = std::int64_t;
using IndexList = std::vector<Index>;

// Caller supplied something that violates a precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// An exhaustive search would exceed its configured budget.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value left the domain of a numeric routine (e.g. log of zero).
class NumericDomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Malformed or unreadable file.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Row-major n x dim feature table. Storage is usually float; every numeric
/// routine widens to double on use.
template <typename Scalar = float>
class EmbeddingMatrixT {
 public:
  using Storage = RowMatrix<Scalar>;

  EmbeddingMatrixT() = default;

  explicit EmbeddingMatrixT(Storage data, bool normalized = false)
      : data_(std::move(data)), normalized_(normalized) {
    if (data_.rows() < 1 || data_.cols() < 1)
      throw InputError("embedding matrix must have n >= 1 and dim >= 1");
    if (!data_.allFinite()) throw InputError("embedding matrix contains non-finite values");
    if (normalized_) {
      for (Eigen::Index r = 0; r < data_.rows(); ++r) {
        const double norm = data_.row(r).template cast<double>().norm();
        if (std::abs(norm - 1.0) > 1e-6)
          throw InputError("row " + std::to_string(r) + " is flagged normalized but has norm " +
                           std::to_string(norm));
      }
    }
  }

  Index n() const { return data_.rows(); }
  Index dim() const { return data_.cols(); }
  bool normalized() const { return normalized_; }
  const Storage& data() const { return data_; }
  auto row(Index i) const { return data_.row(i); }

 private:
  Storage data_;
  bool normalized_ = false;
};

using EmbeddingMatrix = EmbeddingMatrixT<float>;

/// Per-sample information scores.
struct ScoreVector {
  Eigen::VectorXd values;
  bool normalized = false;

  ScoreVector() = default;
  explicit ScoreVector(Eigen::VectorXd v, bool is_normalized = false);

  Index n() const { return values.size(); }
};

/// Symmetric pairwise-redundancy matrix with zero diagonal in CSR layout.
/// Explicit zero weights are kept (an edge may exist with weight 0). Weights
/// lie in [0, 1] for clamped kNN graphs; unclamped graphs may carry negative
/// cosines, so the type itself accepts [-1, 1].
class SparseSimilarity {
 public:
  using EigenView = Eigen::Map<const Eigen::SparseMatrix<double, Eigen::RowMajor, int>>;

  SparseSimilarity() = default;

  /// Validates symmetry, zero diagonal, weight range and strictly increasing
  /// columns per row.
  SparseSimilarity(Index n, std::vector<int> row_offsets, std::vector<int> col_indices,
                   std::vector<double> weights);

  /// An n x n matrix without any stored entry.
  static SparseSimilarity empty(Index n);

  /// Builds from (row, col, weight) entries; each entry is mirrored and
  /// duplicates collapse to the larger weight.
  struct Entry {
    Index row;
    Index col;
    double weight;
  };
  static SparseSimilarity from_entries(Index n, std::span<const Entry> entries);

  Index n() const { return n_; }
  Index nnz() const { return static_cast<Index>(weights_.size()); }
  std::span<const int> row_offsets() const { return row_offsets_; }
  std::span<const int> col_indices() const { return col_indices_; }
  std::span<const double> weights() const { return weights_; }

  std::span<const int> row_cols(Index r) const {
    return std::span<const int>(col_indices_).subspan(row_offsets_[r],
                                                      row_offsets_[r + 1] - row_offsets_[r]);
  }
  std::span<const double> row_weights(Index r) const {
    return std::span<const double>(weights_).subspan(row_offsets_[r],
                                                     row_offsets_[r + 1] - row_offsets_[r]);
  }

  /// Stored weight or 0 when absent.
  double at(Index r, Index c) const;

  EigenView view() const;

  Eigen::MatrixXd to_dense() const;

 private:
  Index n_ = 0;
  std::vector<int> row_offsets_{0};
  std::vector<int> col_indices_;
  std::vector<double> weights_;
};

/// One instance of the cardinality-constrained quadratic selection problem.
class SelectionProblem {
 public:
  SelectionProblem(ScoreVector scores, SparseSimilarity similarity, Index budget, double alpha);

  Index n() const { return scores_.n(); }
  const ScoreVector& scores() const { return scores_; }
  const SparseSimilarity& similarity() const { return similarity_; }
  Index budget() const { return budget_; }
  double alpha() const { return alpha_; }

 private:
  ScoreVector scores_;
  SparseSimilarity similarity_;
  Index budget_;
  double alpha_;
};

struct SelectionResult {
  IndexList selected;
  Eigen::VectorXd probabilities;
  double objective = 0.0;
  std::vector<double> trace;
};

/// sum_{z in S} I(z) - alpha * sum_{z != s in S} K[z][s], where the pair sum
/// runs over ordered pairs (each unordered pair counted twice).
double evaluate_objective(const SelectionProblem& problem, std::span<const Index> selected);

/// Throws InputError on out-of-range or duplicate indices.
void check_selection(Index n, std::span<const Index> selected);

/// Indices of the `count` largest values, ties to the lower index, returned
/// sorted ascending.
IndexList top_indices(const Eigen::Ref<const Eigen::VectorXd>& values, Index count);

}  // namespace infomax

#endif  // INFOMAX_CORE_HPP
