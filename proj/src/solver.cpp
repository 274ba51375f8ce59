#include "infomax/solver.hpp"

#include "infomax/rng.hpp"

#include <algorithm>

namespace infomax {

namespace {

void check_state(const SolverState& state, const SelectionProblem& problem) {
  if (state.x.size() != problem.n())
    throw InputError("state has " + std::to_string(state.x.size()) + " entries but problem has n = " +
                     std::to_string(problem.n()));
  if (!problem.scores().normalized)
    throw InputError("solver requires scores normalized to [0, 1]");
}

}  // namespace

void SolverParams::validate() const {
  if (iters < 1) throw InputError("iters must be >= 1");
  if (!(alpha >= 0.0)) throw InputError("alpha must be >= 0");
  if (temperature && !(*temperature > 0.0)) throw InputError("temperature must be > 0");
  if (!(jitter_eps >= 0.0)) throw InputError("jitter must be >= 0");
}

double SolverParams::resolved_temperature(Index budget) const {
  if (temperature) return *temperature;
  return std::max(1.0, static_cast<double>(budget) / 10.0);
}

Eigen::VectorXd gradient(const SelectionProblem& problem, const Eigen::VectorXd& x) {
  Eigen::VectorXd kx = problem.similarity().view() * x;
  return problem.scores().values - 2.0 * problem.alpha() * kx;
}

SolverState infomax_step(const SolverState& state, const SelectionProblem& problem,
                         const SolverParams& params) {
  check_state(state, problem);
  const double p = static_cast<double>(problem.budget());
  const double tau = params.resolved_temperature(problem.budget());
  Eigen::VectorXd u = p * gradient(problem, state.x);
  return {softmax(u / tau), state.iteration + 1};
}

SolverState generalized_step(const SolverState& state, const SelectionProblem& problem,
                             const GeneralizedParams& gen, const SolverParams& /*params*/) {
  check_state(state, problem);
  const double lb = gen.lambda * gen.beta;
  if (lb == 1.0) throw InputError("generalized step requires lambda * beta != 1");
  if (!(state.x.array() > 0.0).all())
    throw NumericDomainError("generalized step takes log of the iterate; every entry must be > 0");

  const double p = static_cast<double>(problem.budget());
  const double c1 = gen.beta * p / (lb - 1.0);
  const double c2 = 1.0 / (1.0 - lb);
  Eigen::VectorXd v = c1 * gradient(problem, state.x) +
                      c2 * ((state.x.array() / p).log() - state.x.array()).matrix();
  return {softmax(v), state.iteration + 1};
}

SolverState initial_state(Index n, const SolverParams& params) {
  if (n < 1) throw InputError("initial state needs n >= 1");
  Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
  if (params.jitter_eps > 0.0) {
    Rng rng(params.seed);
    for (Index i = 0; i < n; ++i) x[i] += params.jitter_eps * rng.uniform();
  }
  return {x / x.sum(), 0};
}

SelectionResult solve(const SelectionProblem& problem, const SolverParams& params) {
  params.validate();
  SolverState state = initial_state(problem.n(), params);
  check_state(state, problem);

  SelectionResult out;
  out.trace.reserve(static_cast<std::size_t>(params.iters));
  for (int t = 0; t < params.iters; ++t) {
    SolverState next = infomax_step(state, problem, params);
    out.trace.push_back((next.x - state.x).lpNorm<1>());
    state = std::move(next);
  }

  out.selected = top_indices(state.x, problem.budget());
  out.probabilities = std::move(state.x);
  out.objective = evaluate_objective(problem, out.selected);
  return out;
}

double alpha_from_lambda(double lambda, Index p) {
  if (p < 2) throw InputError("alpha_from_lambda needs p >= 2, got " + std::to_string(p));
  return lambda / static_cast<double>(p - 1);
}

}  // namespace infomax
