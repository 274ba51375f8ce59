#include "infomax/baselines.hpp"

#include "infomax/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace infomax {

BaselineMethod parse_baseline_method(std::string_view name) {
  if (name == "random") return BaselineMethod::random;
  if (name == "top_score") return BaselineMethod::top_score;
  if (name == "k_center") return BaselineMethod::k_center;
  if (name == "moderate") return BaselineMethod::moderate;
  if (name == "ccs") return BaselineMethod::ccs;
  if (name == "d2_greedy") return BaselineMethod::d2_greedy;
  throw InputError("unknown baseline method '" + std::string(name) + "'");
}

std::string_view to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::random: return "random";
    case BaselineMethod::top_score: return "top_score";
    case BaselineMethod::k_center: return "k_center";
    case BaselineMethod::moderate: return "moderate";
    case BaselineMethod::ccs: return "ccs";
    case BaselineMethod::d2_greedy: return "d2_greedy";
  }
  return "unknown";
}

namespace detail {

KCenterTrace k_center_greedy(const RowMatrix<double>& points, Index count, Index first) {
  const Index n = points.rows();
  if (count < 1 || count > n) throw InputError("k-center count outside [1, n]");
  if (first < 0 || first >= n) throw InputError("k-center first index out of range");

  KCenterTrace out;
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  std::vector<bool> is_center(static_cast<std::size_t>(n), false);
  Index next = first;
  for (Index c = 0; c < count; ++c) {
    out.centers.push_back(next);
    is_center[next] = true;
    nearest = nearest.cwiseMin((points.rowwise() - points.row(next)).rowwise().squaredNorm());
    out.radii.push_back(std::sqrt(nearest.maxCoeff()));
    // Farthest non-center; duplicates of a center sit at distance 0 but stay eligible.
    Index far = -1;
    for (Index i = 0; i < n; ++i)
      if (!is_center[i] && (far < 0 || nearest[i] > nearest[far])) far = i;
    next = far;
  }
  return out;
}

}  // namespace detail

std::vector<Index> ccs_bin_of(const Eigen::VectorXd& scores, Index bins) {
  if (bins < 1) throw InputError("CCS needs bins >= 1");
  std::vector<Index> bin(static_cast<std::size_t>(scores.size()), 0);
  if (scores.size() == 0) return bin;
  const double lo = scores.minCoeff();
  const double hi = scores.maxCoeff();
  if (!(hi > lo)) return bin;
  const double width = (hi - lo) / static_cast<double>(bins);
  for (Index i = 0; i < scores.size(); ++i) {
    const auto b = static_cast<Index>(std::floor((scores[i] - lo) / width));
    bin[i] = std::clamp<Index>(b, 0, bins - 1);
  }
  return bin;
}

std::vector<Index> ccs_allocation(std::span<const Index> bin_sizes, Index budget) {
  const Index bins = static_cast<Index>(bin_sizes.size());
  const Index total = std::accumulate(bin_sizes.begin(), bin_sizes.end(), Index{0});
  if (budget < 0 || budget > total) throw InputError("CCS budget outside [0, total samples]");

  std::vector<Index> nonempty;
  for (Index b = 0; b < bins; ++b)
    if (bin_sizes[b] > 0) nonempty.push_back(b);

  std::vector<Index> alloc(static_cast<std::size_t>(bins), 0);
  if (nonempty.empty()) return alloc;
  const Index base = budget / bins;
  for (const Index b : nonempty) alloc[b] = base;

  std::vector<Index> by_population = nonempty;
  std::stable_sort(by_population.begin(), by_population.end(),
                   [&](Index a, Index b) { return bin_sizes[a] > bin_sizes[b]; });
  Index remainder = budget - base * static_cast<Index>(nonempty.size());
  for (std::size_t i = 0; remainder > 0; i = (i + 1) % by_population.size(), --remainder)
    ++alloc[by_population[i]];

  Index deficit = 0;
  for (Index b = 0; b < bins; ++b) {
    if (alloc[b] > bin_sizes[b]) {
      deficit += alloc[b] - bin_sizes[b];
      alloc[b] = bin_sizes[b];
    }
  }
  while (deficit > 0) {
    for (Index b = 0; b < bins && deficit > 0; ++b) {
      if (alloc[b] < bin_sizes[b]) {
        ++alloc[b];
        --deficit;
      }
    }
  }
  return alloc;
}

namespace {

IndexList random_select(Index n, Index p, Rng& rng) {
  IndexList pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < p; ++i) {
    const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(p));
  return pool;
}

IndexList moderate_select(const Eigen::VectorXd& scores, Index p) {
  std::vector<double> sorted(scores.data(), scores.data() + scores.size());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
  // Negate so that top_indices picks the smallest distances.
  return top_indices(-(scores.array() - median).abs().matrix(), p);
}

IndexList ccs_select(const Eigen::VectorXd& scores, Index p, Index bins, Rng& rng) {
  const auto bin = ccs_bin_of(scores, bins);
  std::vector<IndexList> members(static_cast<std::size_t>(bins));
  for (Index i = 0; i < scores.size(); ++i) members[bin[i]].push_back(i);
  std::vector<Index> sizes;
  for (const auto& m : members) sizes.push_back(static_cast<Index>(m.size()));
  const auto alloc = ccs_allocation(sizes, p);

  IndexList out;
  for (Index b = 0; b < bins; ++b) {
    auto& pool = members[b];
    const Index take = alloc[b];
    for (Index i = 0; i < take; ++i) {
      const auto j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(pool.size()) -
                                                      static_cast<std::uint64_t>(i)));
      std::swap(pool[i], pool[j]);
      out.push_back(pool[i]);
    }
  }
  return out;
}

IndexList d2_greedy_select(const Eigen::VectorXd& scores, const SparseSimilarity& sim, Index p,
                           double gamma) {
  struct Item {
    double score;
    Index index;
    bool operator<(const Item& o) const {
      return score != o.score ? score < o.score : index > o.index;
    }
  };
  Eigen::VectorXd current = scores;
  std::vector<bool> picked(static_cast<std::size_t>(scores.size()), false);
  std::priority_queue<Item> heap;
  for (Index i = 0; i < scores.size(); ++i) heap.push({current[i], i});

  IndexList out;
  while (static_cast<Index>(out.size()) < p) {
    const Item top = heap.top();
    heap.pop();
    if (picked[top.index] || top.score != current[top.index]) continue;
    picked[top.index] = true;
    out.push_back(top.index);
    const auto cols = sim.row_cols(top.index);
    const auto w = sim.row_weights(top.index);
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const Index s = cols[j];
      if (picked[s]) continue;
      const double decayed = current[s] * std::exp(-gamma * w[j]);
      if (decayed != current[s]) {
        current[s] = decayed;
        heap.push({decayed, s});
      }
    }
  }
  return out;
}

}  // namespace

SelectionResult baseline_select(const BaselineSpec& spec, const SelectionProblem& problem,
                                const EmbeddingMatrix* embeddings) {
  if (spec.bins < 1) throw InputError("bins must be >= 1");
  if (!(spec.gamma >= 0.0)) throw InputError("gamma must be >= 0");
  const Index n = problem.n();
  const Index p = problem.budget();
  const auto& scores = problem.scores().values;
  Rng rng(spec.seed);

  IndexList chosen;
  switch (spec.method) {
    case BaselineMethod::random:
      chosen = random_select(n, p, rng);
      break;
    case BaselineMethod::top_score:
      chosen = top_indices(scores, p);
      break;
    case BaselineMethod::k_center: {
      if (embeddings == nullptr) throw InputError("k_center requires embeddings");
      if (embeddings->n() != n) throw InputError("embedding count does not match the problem");
      Index first = 0;
      scores.maxCoeff(&first);
      chosen = k_center_greedy(*embeddings, p, first).centers;
      break;
    }
    case BaselineMethod::moderate:
      chosen = moderate_select(scores, p);
      break;
    case BaselineMethod::ccs:
      chosen = ccs_select(scores, p, spec.bins, rng);
      break;
    case BaselineMethod::d2_greedy:
      chosen = d2_greedy_select(scores, problem.similarity(), p, spec.gamma);
      break;
  }

  SelectionResult out;
  std::sort(chosen.begin(), chosen.end());
  out.selected = std::move(chosen);
  out.probabilities = Eigen::VectorXd::Zero(n);
  for (const Index i : out.selected) out.probabilities[i] = 1.0 / static_cast<double>(p);
  out.objective = evaluate_objective(problem, out.selected);
  return out;
}

}  // namespace infomax
