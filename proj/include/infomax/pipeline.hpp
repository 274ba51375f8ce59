#ifndef INFOMAX_PIPELINE_HPP
#define INFOMAX_PIPELINE_HPP

#include "infomax/core.hpp"
#include "infomax/scoring.hpp"
#include "infomax/simgraph.hpp"
#include "infomax/solver.hpp"

#include <array>
#include <cstdint>
#include <optional>

namespace infomax {

enum class ScoreSource { external, ssp };

struct PipelineConfig {
  /// Exactly one of ratio or budget.
  std::optional<double> ratio;
  std::optional<Index> budget;
  Index partitions = 1;
  KnnParams knn;
  SolverParams solver;
  std::uint64_t seed = 0;
  ScoreSource score_source = ScoreSource::external;
  KMeansParams kmeans;

  /// Resolved budget for n samples; ratio rounds half up.
  Index resolve_budget(Index n) const;
};

inline constexpr int kHistogramBins = 20;

struct MetricsReport {
  double objective = 0.0;
  double coverage_mean = 0.0;
  double coverage_max = 0.0;
  /// min, q25, median, q75, max of the selected raw scores.
  std::array<double, 5> score_quantiles{};
  std::array<double, kHistogramBins + 1> histogram_edges{};
  std::array<Index, kHistogramBins> histogram_counts{};
};

struct PipelineOutput {
  SelectionResult result;
  MetricsReport metrics;
  ScoreVector raw_scores;
  std::vector<IndexList> partitions;
  std::vector<Index> partition_budgets;
};

/// Seeded random split into d parts whose sizes differ by at most one, larger
/// parts first. Each part is sorted ascending.
std::vector<IndexList> partition_dataset(Index n, Index d, std::uint64_t seed);

/// floor(p * n_i / n) per part, then one extra to each part in order until the
/// total reaches p.
std::vector<Index> partition_budgets(std::span<const IndexList> parts, Index n, Index budget);

/// Selection diagnostics against raw scores. `objective` is passed through.
MetricsReport selection_metrics(std::span<const Index> selected, const EmbeddingMatrix& embeddings,
                                const ScoreVector& raw_scores, double objective);

/// Coverage (Euclidean, on the embeddings as given), score quantiles and a
/// 20-bin histogram over the full raw-score range.
MetricsReport evaluate_selection(std::span<const Index> selected, const EmbeddingMatrix& embeddings,
                                 const SelectionProblem& problem, const ScoreVector& raw_scores);

/// Distance from every sample to its nearest selected sample.
Eigen::VectorXd coverage_distances(std::span<const Index> selected, const EmbeddingMatrix& embeddings);

/// Full selection: scores, normalization, partitioning, per-part kNN + solve,
/// merge and metrics.
PipelineOutput run_pipeline(const PipelineConfig& config, const EmbeddingMatrix& embeddings,
                            const std::optional<ScoreVector>& scores);

}  // namespace infomax

#endif  // INFOMAX_PIPELINE_HPP
