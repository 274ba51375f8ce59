#ifndef INFOMAX_SOLVER_HPP
#define INFOMAX_SOLVER_HPP

#include "infomax/core.hpp"

#include <cstdint>
#include <optional>

namespace infomax {

struct SolverParams {
  int iters = 20;
  double alpha = 0.3;
  /// Softmax temperature; empty means auto, max(1, p / 10).
  std::optional<double> temperature;
  double jitter_eps = 1e-6;
  std::uint64_t seed = 0;

  void validate() const;
  double resolved_temperature(Index budget) const;
};

struct SolverState {
  Eigen::VectorXd x;
  int iteration = 0;
};

/// Entropy weight and proximal step of the general mirror-descent update.
struct GeneralizedParams {
  double lambda = 1.0;
  double beta = 1e9;
};

/// exp(v - max v) / sum exp(v - max v).
template <typename Derived>
Eigen::VectorXd softmax(const Eigen::MatrixBase<Derived>& v) {
  const double shift = v.maxCoeff();
  Eigen::VectorXd e = (v.template cast<double>().array() - shift).exp().matrix();
  return e / e.sum();
}

/// The relaxed-problem gradient direction I - 2 alpha K x.
Eigen::VectorXd gradient(const SelectionProblem& problem, const Eigen::VectorXd& x);

/// x' = softmax((p I - 2 p alpha K x) / tau).
SolverState infomax_step(const SolverState& state, const SelectionProblem& problem,
                         const SolverParams& params);

/// x' proportional to exp(c1 (I - 2 alpha K x) + c2 (log(x / p) - x)) with
/// c1 = beta p / (lambda beta - 1) and c2 = 1 / (1 - lambda beta). lambda = 1
/// and beta -> infinity reduce to infomax_step at tau = 1.
SolverState generalized_step(const SolverState& state, const SelectionProblem& problem,
                             const GeneralizedParams& gen, const SolverParams& params);

/// Uniform start with multiplicative seeded jitter, renormalized.
SolverState initial_state(Index n, const SolverParams& params);

/// Runs `params.iters` steps and keeps the `p` largest final probabilities.
SelectionResult solve(const SelectionProblem& problem, const SolverParams& params);

/// Graph-cut conditional gain weight lambda expressed as the pairwise weight
/// of the quadratic objective: lambda / (p - 1).
double alpha_from_lambda(double lambda, Index p);

}  // namespace infomax

#endif  // INFOMAX_SOLVER_HPP
