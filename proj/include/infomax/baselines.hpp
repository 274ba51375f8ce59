#ifndef INFOMAX_BASELINES_HPP
#define INFOMAX_BASELINES_HPP

#include "infomax/core.hpp"

#include <cstdint>
#include <string_view>

namespace infomax {

enum class BaselineMethod { random, top_score, k_center, moderate, ccs, d2_greedy };

BaselineMethod parse_baseline_method(std::string_view name);
std::string_view to_string(BaselineMethod method);

struct BaselineSpec {
  BaselineMethod method = BaselineMethod::top_score;
  std::uint64_t seed = 0;
  Index bins = 10;
  double gamma = 1.0;
};

/// Greedy farthest-point sequence. radii[i] is the covering radius once the
/// first i + 1 centers are chosen.
struct KCenterTrace {
  IndexList centers;
  std::vector<double> radii;
};

namespace detail {
KCenterTrace k_center_greedy(const RowMatrix<double>& points, Index count, Index first);
}

template <typename Scalar>
KCenterTrace k_center_greedy(const EmbeddingMatrixT<Scalar>& embeddings, Index count, Index first) {
  return detail::k_center_greedy(embeddings.data().template cast<double>(), count, first);
}

/// Equal-width bin index of every score over [min, max].
std::vector<Index> ccs_bin_of(const Eigen::VectorXd& scores, Index bins);

/// Per-bin sample counts for a budget p: floor(p / bins) per nonempty bin, the
/// remainder to the most populated bins, then round-robin refill of any
/// deficit left by bins that are too small.
std::vector<Index> ccs_allocation(std::span<const Index> bin_sizes, Index budget);

/// Runs one reference pruning method. `embeddings` is required for k_center.
SelectionResult baseline_select(const BaselineSpec& spec, const SelectionProblem& problem,
                                const EmbeddingMatrix* embeddings = nullptr);

}  // namespace infomax

#endif  // INFOMAX_BASELINES_HPP
