#include "infomax/pipeline.hpp"

#include "infomax/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace infomax {

Index PipelineConfig::resolve_budget(Index n) const {
  if (ratio.has_value() == budget.has_value())
    throw InputError("exactly one of ratio or budget must be given");
  Index p = 0;
  if (ratio) {
    if (!(*ratio > 0.0 && *ratio < 1.0)) throw InputError("ratio must lie in (0, 1)");
    p = static_cast<Index>(std::floor(*ratio * static_cast<double>(n) + 0.5));
  } else {
    p = *budget;
  }
  if (p < 1 || p > n)
    throw InputError("budget " + std::to_string(p) + " outside [1, " + std::to_string(n) + "]");
  return p;
}

std::vector<IndexList> partition_dataset(Index n, Index d, std::uint64_t seed) {
  if (n < 1) throw InputError("cannot partition an empty dataset");
  if (d < 1 || d > n)
    throw InputError("partitions d = " + std::to_string(d) + " must satisfy 1 <= d <= n = " +
                     std::to_string(n));
  IndexList perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Rng rng(seed);
  rng.shuffle(perm);

  std::vector<IndexList> parts(static_cast<std::size_t>(d));
  const Index base = n / d;
  const Index extra = n % d;
  Index pos = 0;
  for (Index i = 0; i < d; ++i) {
    const Index size = base + (i < extra ? 1 : 0);
    parts[i].assign(perm.begin() + pos, perm.begin() + pos + size);
    std::sort(parts[i].begin(), parts[i].end());
    pos += size;
  }
  return parts;
}

std::vector<Index> partition_budgets(std::span<const IndexList> parts, Index n, Index budget) {
  std::vector<Index> out;
  out.reserve(parts.size());
  Index assigned = 0;
  for (const auto& part : parts) {
    // Integer floor(p * n_i / n) without going through floating point.
    const auto share = static_cast<Index>(static_cast<__int128>(budget) *
                                          static_cast<Index>(part.size()) / n);
    out.push_back(share);
    assigned += share;
  }
  for (std::size_t i = 0; assigned < budget; i = (i + 1) % out.size()) {
    if (out[i] < static_cast<Index>(parts[i].size())) {
      ++out[i];
      ++assigned;
    }
  }
  return out;
}

Eigen::VectorXd coverage_distances(std::span<const Index> selected, const EmbeddingMatrix& embeddings) {
  const Index n = embeddings.n();
  if (selected.empty()) throw InputError("coverage needs a nonempty selection");
  check_selection(n, selected);

  const RowMatrix<double> points = embeddings.data().cast<double>();
  RowMatrix<double> centers(static_cast<Index>(selected.size()), points.cols());
  for (std::size_t j = 0; j < selected.size(); ++j) centers.row(j) = points.row(selected[j]);
  const Eigen::VectorXd center_sq = centers.rowwise().squaredNorm();

  Eigen::VectorXd out(n);
  constexpr Index kTile = 512;
  Eigen::MatrixXd dots;
  for (Index r0 = 0; r0 < n; r0 += kTile) {
    const Index rows = std::min(kTile, n - r0);
    dots.noalias() = points.middleRows(r0, rows) * centers.transpose();
    for (Index i = 0; i < rows; ++i) {
      const double self = points.row(r0 + i).squaredNorm();
      const double best = ((center_sq.transpose().array() - 2.0 * dots.row(i).array()) + self).minCoeff();
      out[r0 + i] = std::sqrt(std::max(best, 0.0));
    }
  }
  for (const Index i : selected) out[i] = 0.0;
  return out;
}

namespace {

double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

MetricsReport selection_metrics(std::span<const Index> selected, const EmbeddingMatrix& embeddings,
                                const ScoreVector& raw_scores, double objective) {
  if (selected.empty()) throw InputError("metrics need a nonempty selection");
  if (raw_scores.n() != embeddings.n()) throw InputError("score count does not match embeddings");
  check_selection(embeddings.n(), selected);

  MetricsReport report;
  report.objective = objective;
  const Eigen::VectorXd cover = coverage_distances(selected, embeddings);
  report.coverage_mean = cover.mean();
  report.coverage_max = cover.maxCoeff();

  std::vector<double> chosen;
  chosen.reserve(selected.size());
  for (const Index i : selected) chosen.push_back(raw_scores.values[i]);
  std::sort(chosen.begin(), chosen.end());
  report.score_quantiles = {chosen.front(), quantile(chosen, 0.25), quantile(chosen, 0.5),
                            quantile(chosen, 0.75), chosen.back()};

  const double lo = raw_scores.values.minCoeff();
  const double hi = raw_scores.values.maxCoeff();
  const double width = (hi - lo) / kHistogramBins;
  for (int b = 0; b <= kHistogramBins; ++b) report.histogram_edges[b] = lo + width * b;
  report.histogram_edges[kHistogramBins] = hi;
  for (const double s : chosen) {
    int b = width > 0.0 ? static_cast<int>(std::floor((s - lo) / width)) : 0;
    b = std::clamp(b, 0, kHistogramBins - 1);
    ++report.histogram_counts[b];
  }
  return report;
}

MetricsReport evaluate_selection(std::span<const Index> selected, const EmbeddingMatrix& embeddings,
                                 const SelectionProblem& problem, const ScoreVector& raw_scores) {
  if (selected.empty()) throw InputError("metrics need a nonempty selection");
  return selection_metrics(selected, embeddings, raw_scores, evaluate_objective(problem, selected));
}

PipelineOutput run_pipeline(const PipelineConfig& config, const EmbeddingMatrix& embeddings,
                            const std::optional<ScoreVector>& scores) {
  const Index n = embeddings.n();
  config.solver.validate();
  const Index budget = config.resolve_budget(n);

  PipelineOutput out;
  if (config.score_source == ScoreSource::ssp) {
    out.raw_scores = ssp_scores(embeddings, config.kmeans);
  } else {
    if (!scores) throw InputError("external score source selected but no scores given");
    if (scores->n() != n)
      throw InputError("score count " + std::to_string(scores->n()) + " does not match n = " +
                       std::to_string(n));
    out.raw_scores = *scores;
  }
  const ScoreVector normalized = normalize_scores(out.raw_scores);
  const EmbeddingMatrix unit = embeddings.normalized() ? embeddings : l2_normalize(embeddings);

  out.partitions = partition_dataset(n, config.partitions, config.seed);
  out.partition_budgets = partition_budgets(out.partitions, n, budget);

  auto& result = out.result;
  result.probabilities = Eigen::VectorXd::Zero(n);
  result.trace.assign(static_cast<std::size_t>(config.solver.iters), 0.0);
  for (std::size_t part = 0; part < out.partitions.size(); ++part) {
    const IndexList& members = out.partitions[part];
    const Index local_budget = out.partition_budgets[part];
    if (local_budget == 0) continue;
    const auto size = static_cast<Index>(members.size());

    EmbeddingMatrix::Storage rows(size, unit.dim());
    Eigen::VectorXd local_scores(size);
    for (Index i = 0; i < size; ++i) {
      rows.row(i) = unit.row(members[i]);
      local_scores[i] = normalized.values[members[i]];
    }
    SparseSimilarity sim = SparseSimilarity::empty(size);
    if (size > 1) {
      KnnParams knn = config.knn;
      knn.k = std::min(knn.k, size - 1);
      sim = build_knn_similarity(EmbeddingMatrix(std::move(rows), true), knn);
    }
    const SelectionProblem problem(ScoreVector(std::move(local_scores), true), std::move(sim),
                                   local_budget, config.solver.alpha);

    SolverParams params = config.solver;
    params.seed = config.solver.seed + part;
    const SelectionResult local = solve(problem, params);

    const double weight = static_cast<double>(local_budget) / static_cast<double>(budget);
    for (Index i = 0; i < size; ++i) result.probabilities[members[i]] = weight * local.probabilities[i];
    for (std::size_t t = 0; t < local.trace.size(); ++t) result.trace[t] += weight * local.trace[t];
    for (const Index i : local.selected) result.selected.push_back(members[i]);
    result.objective += local.objective;
  }
  std::sort(result.selected.begin(), result.selected.end());

  out.metrics = selection_metrics(result.selected, embeddings, out.raw_scores, result.objective);
  return out;
}

}  // namespace infomax
