#include "infomax/scoring.hpp"

#include "infomax/rng.hpp"

#include <limits>

namespace infomax {
namespace detail {

namespace {

RowMatrix<double> seed_plus_plus(const RowMatrix<double>& points, Index clusters, Rng& rng) {
  const Index n = points.rows();
  RowMatrix<double> centroids(clusters, points.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);

  Index first = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
  centroids.row(0) = points.row(first);
  chosen[first] = true;

  Eigen::VectorXd nearest_sq = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (Index c = 1; c < clusters; ++c) {
    const double total = nearest_sq.sum();
    Index pick = -1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += nearest_sq[i];
        if (nearest_sq[i] > 0.0 && acc > target) {
          pick = i;
          break;
        }
      }
      // Rounding can leave the target past the last accumulated weight.
      if (pick < 0)
        for (Index i = n - 1; i >= 0; --i)
          if (nearest_sq[i] > 0.0) {
            pick = i;
            break;
          }
    } else {
      for (Index i = 0; i < n; ++i)
        if (!chosen[i]) {
          pick = i;
          break;
        }
    }
    chosen[pick] = true;
    centroids.row(c) = points.row(pick);
    nearest_sq = nearest_sq.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

// Nearest centroid per point (ties to the lower cluster); returns inertia.
double assign(const RowMatrix<double>& points, const RowMatrix<double>& centroids,
              std::vector<Index>& assignment, Eigen::VectorXd& sq_dist) {
  double inertia = 0.0;
  for (Index i = 0; i < points.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    Index arg = 0;
    for (Index c = 0; c < centroids.rows(); ++c) {
      const double d = (points.row(i) - centroids.row(c)).squaredNorm();
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    assignment[i] = arg;
    sq_dist[i] = best;
    inertia += best;
  }
  return inertia;
}

}  // namespace

KMeansResult lloyd_kmeans(const RowMatrix<double>& points, const KMeansParams& params) {
  const Index n = points.rows();
  const Index c = params.clusters;
  if (c < 1) throw InputError("k-means needs at least one cluster");
  if (c > n)
    throw InputError("clusters = " + std::to_string(c) + " exceeds sample count " + std::to_string(n));
  if (params.max_iters < 1) throw InputError("k-means max_iters must be >= 1");

  Rng rng(params.seed);
  KMeansResult out;
  out.centroids = seed_plus_plus(points, c, rng);
  out.assignment.assign(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd sq_dist(n);

  out.inertia.push_back(assign(points, out.centroids, out.assignment, sq_dist));
  for (int iter = 0; iter < params.max_iters; ++iter) {
    RowMatrix<double> sums = RowMatrix<double>::Zero(c, points.cols());
    std::vector<Index> counts(static_cast<std::size_t>(c), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(out.assignment[i]) += points.row(i);
      ++counts[out.assignment[i]];
    }

    RowMatrix<double> next(c, points.cols());
    std::vector<bool> taken(static_cast<std::size_t>(n), false);
    for (Index k = 0; k < c; ++k) {
      if (counts[k] > 0) {
        next.row(k) = sums.row(k) / static_cast<double>(counts[k]);
        continue;
      }
      Index far = -1;
      for (Index i = 0; i < n; ++i)
        if (!taken[i] && (far < 0 || sq_dist[i] > sq_dist[far])) far = i;
      taken[far] = true;
      next.row(k) = points.row(far);
    }

    const double shift = (next - out.centroids).rowwise().norm().maxCoeff();
    out.centroids = std::move(next);
    out.iterations = iter + 1;
    out.inertia.push_back(assign(points, out.centroids, out.assignment, sq_dist));
    if (shift <= params.tol) break;
  }

  out.distances = sq_dist.cwiseSqrt();
  return out;
}

}  // namespace detail

ScoreVector normalize_scores(const ScoreVector& scores) {
  const Index n = scores.n();
  if (n == 0) return ScoreVector(Eigen::VectorXd(), true);
  const double lo = scores.values.minCoeff();
  const double hi = scores.values.maxCoeff();
  if (!(hi > lo)) return ScoreVector(Eigen::VectorXd::Constant(n, 0.5), true);
  Eigen::VectorXd out = (scores.values.array() - lo) / (hi - lo);
  // Guard the endpoints against rounding.
  out = out.cwiseMax(0.0).cwiseMin(1.0);
  return ScoreVector(std::move(out), true);
}

ScoreVector load_scores(std::span<const ScoreRow> rows) {
  const Index n = static_cast<Index>(rows.size());
  Eigen::VectorXd values(n);
  std::vector<Index> seen_at(static_cast<std::size_t>(n), 0);
  for (const auto& row : rows) {
    const std::string where = "line " + std::to_string(row.line);
    if (row.index < 0 || row.index >= n)
      throw InputError(where + ": index " + std::to_string(row.index) + " outside [0, " +
                       std::to_string(n) + "); some index is missing");
    if (seen_at[row.index] != 0)
      throw InputError(where + ": duplicate index " + std::to_string(row.index) + " (first on line " +
                       std::to_string(seen_at[row.index]) + ")");
    if (!std::isfinite(row.score))
      throw InputError(where + ": non-finite score for index " + std::to_string(row.index));
    seen_at[row.index] = row.line > 0 ? row.line : 1;
    values[row.index] = row.score;
  }
  return ScoreVector(std::move(values), false);
}

}  // namespace infomax
