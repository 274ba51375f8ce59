#include "infomax/oracle.hpp"

#include <limits>

namespace infomax {

std::uint64_t binomial(std::uint64_t n, std::uint64_t p) {
  if (p > n) return 0;
  p = std::min(p, n - p);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= p; ++i) {
    acc = acc * (n - p + i) / i;
    if (acc > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(acc);
}

OracleResult brute_force_optimum(const SelectionProblem& problem, const OracleLimit& limit) {
  const Index n = problem.n();
  const Index p = problem.budget();
  const std::uint64_t count = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(p));
  if (count > limit.max_combinations)
    throw CapacityError("C(" + std::to_string(n) + ", " + std::to_string(p) + ") = " +
                        std::to_string(count) + " exceeds the limit of " +
                        std::to_string(limit.max_combinations) + " combinations");

  const auto& scores = problem.scores().values;
  const auto& sim = problem.similarity();
  constexpr Index kDenseLimit = 2048;
  const Eigen::MatrixXd dense = n <= kDenseLimit ? sim.to_dense() : Eigen::MatrixXd();
  auto weight = [&](Index a, Index b) { return n <= kDenseLimit ? dense(a, b) : sim.at(a, b); };
  const double two_alpha = 2.0 * problem.alpha();

  // prefix[i] holds the objective of the first i + 1 chosen indices.
  std::vector<Index> combo(static_cast<std::size_t>(p));
  std::vector<double> prefix(static_cast<std::size_t>(p));
  auto refresh_from = [&](Index j) {
    for (Index i = j; i < p; ++i) {
      double v = (i > 0 ? prefix[i - 1] : 0.0) + scores[combo[i]];
      double overlap = 0.0;
      for (Index s = 0; s < i; ++s) overlap += weight(combo[s], combo[i]);
      prefix[i] = v - two_alpha * overlap;
    }
  };

  for (Index i = 0; i < p; ++i) combo[i] = i;
  refresh_from(0);

  OracleResult best;
  best.selected = combo;
  best.objective = prefix[p - 1];
  best.evaluated = 1;

  while (true) {
    Index j = p - 1;
    while (j >= 0 && combo[j] == n - p + j) --j;
    if (j < 0) break;
    ++combo[j];
    for (Index i = j + 1; i < p; ++i) combo[i] = combo[i - 1] + 1;
    refresh_from(j);
    ++best.evaluated;
    if (prefix[p - 1] > best.objective) {
      best.objective = prefix[p - 1];
      best.selected = combo;
    }
  }

  best.objective = evaluate_objective(problem, best.selected);
  return best;
}

}  // namespace infomax
