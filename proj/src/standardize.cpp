#include "condinv/standardize.hpp"

#include "condinv/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace condinv {
namespace {

constexpr double kZeroNorm = 1e-15;

inline double standardize_value(double x, double mean, double std, double epsilon) {
  return std <= epsilon ? 0.0 : (x - mean) / std;
}

void check_dim(const StandardizationStats& stats, Eigen::Index d, const char* what) {
  if (stats.dim() != d)
    throw ModelError(std::string(what) + ": model fitted on d=" + std::to_string(stats.dim()) +
                     ", descriptors have d=" + std::to_string(d));
}

/// Index of the largest entry of each row; ties go to the lowest column.
std::vector<int> row_argmax(const DescriptorMatrix& sims) {
  std::vector<int> best(static_cast<std::size_t>(sims.rows()));
  for (Eigen::Index i = 0; i < sims.rows(); ++i) {
    Eigen::Index arg = 0;
    double value = sims(i, 0);
    for (Eigen::Index c = 1; c < sims.cols(); ++c) {
      if (sims(i, c) > value) {
        value = sims(i, c);
        arg = c;
      }
    }
    best[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return best;
}

// Greedy k-means++: each step draws 2 + floor(ln k) candidates with
// probability proportional to cosine distance and keeps the one that lowers
// the total distance most.
DescriptorMatrix kmeanspp_init(const DescriptorMatrix& x, int k, std::uint64_t seed) {
  const Eigen::Index n = x.rows();
  CounterRng rng(seed);
  DescriptorMatrix centroids(k, x.cols());
  std::vector<bool> chosen(static_cast<std::size_t>(n), false);
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));

  auto distances_to = [&](Eigen::Index i) -> VectorXd {
    return (1.0 - (x * x.row(i).transpose()).array()).cwiseMax(0.0).matrix();
  };

  const auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centroids.row(0) = x.row(first);
  chosen[static_cast<std::size_t>(first)] = true;
  VectorXd dist = distances_to(first);
  dist(first) = 0.0;

  for (int c = 1; c < k; ++c) {
    const double total = dist.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      double best_potential = std::numeric_limits<double>::infinity();
      VectorXd best_dist;
      for (int t = 0; t < trials; ++t) {
        const double target = rng.uniform() * total;
        double cumulative = 0.0;
        Eigen::Index candidate = -1;
        for (Eigen::Index i = 0; i < n; ++i) {
          if (chosen[static_cast<std::size_t>(i)] || dist(i) <= 0.0) continue;
          cumulative += dist(i);
          candidate = i;
          if (cumulative > target) break;
        }
        if (candidate < 0) continue;
        VectorXd merged = dist.cwiseMin(distances_to(candidate));
        merged(candidate) = 0.0;
        const double potential = merged.sum();
        if (potential < best_potential) {
          best_potential = potential;
          best_dist = std::move(merged);
          pick = candidate;
        }
      }
      if (pick >= 0) dist = std::move(best_dist);
    }
    if (pick < 0) {
      // Every remaining point coincides with a centroid.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[static_cast<std::size_t>(i)]) {
          pick = i;
          break;
        }
      }
      dist = dist.cwiseMin(distances_to(pick));
      dist(pick) = 0.0;
    }
    centroids.row(c) = x.row(pick);
    chosen[static_cast<std::size_t>(pick)] = true;
  }
  return centroids;
}

}  // namespace

StandardizationStats fit_std(const DescriptorSet& set) { return fit_std(set.data()); }

DescriptorMatrix apply_std(const StandardizationStats& stats, const DescriptorMatrix& data) {
  check_dim(stats, data.cols(), "apply_std");
  DescriptorMatrix out(data.rows(), data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i)
    for (Eigen::Index j = 0; j < data.cols(); ++j)
      out(i, j) = standardize_value(data(i, j), stats.mean(j), stats.std(j), stats.epsilon);
  return out;
}

DescriptorSet apply_std(const StandardizationStats& stats, const DescriptorSet& set) {
  return set.with_data(apply_std(stats, set.data()));
}

DescriptorMatrix unit_rows(const DescriptorMatrix& data) {
  DescriptorMatrix out(data.rows(), data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const double norm = data.row(i).norm();
    if (!(norm >= kZeroNorm)) throw DataError("zero-norm descriptor at row " + std::to_string(i));
    out.row(i) = data.row(i) / norm;
  }
  return out;
}

double cosine_objective(const DescriptorMatrix& unit, const DescriptorMatrix& centroids,
                        const std::vector<int>& assignments) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < unit.rows(); ++i)
    total += 1.0 - unit.row(i).dot(centroids.row(assignments[static_cast<std::size_t>(i)]));
  return total;
}

ClusterModel kmeans_cosine(const DescriptorSet& set, const KMeansOptions& options) {
  const Eigen::Index n = set.rows();
  const int k = options.k;
  if (k < 1) throw ArgumentError("k must be at least 1");
  if (k > n)
    throw ArgumentError("k=" + std::to_string(k) + " exceeds the number of descriptors " +
                        std::to_string(n));
  if (options.max_iters < 1) throw ArgumentError("max_iters must be at least 1");

  const DescriptorMatrix x = unit_rows(set.data());
  DescriptorMatrix centroids = kmeanspp_init(x, k, options.seed);

  ClusterModel model;
  model.rng_seed = options.seed;
  std::vector<int> assign(static_cast<std::size_t>(n), -1);

  for (int iter = 1; iter <= options.max_iters; ++iter) {
    const DescriptorMatrix sims = x * centroids.transpose();
    std::vector<int> next = row_argmax(sims);

    // Reseed empty clusters with the point farthest from its own centroid.
    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    for (int a : next) ++counts[static_cast<std::size_t>(a)];
    std::vector<bool> moved(static_cast<std::size_t>(n), false);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) continue;
      Eigen::Index far = -1;
      double far_dist = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = next[static_cast<std::size_t>(i)];
        if (moved[static_cast<std::size_t>(i)] || counts[static_cast<std::size_t>(a)] < 2) continue;
        const double dist = 1.0 - sims(i, a);
        if (dist > far_dist) {
          far_dist = dist;
          far = i;
        }
      }
      if (far < 0) continue;
      --counts[static_cast<std::size_t>(next[static_cast<std::size_t>(far)])];
      next[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      moved[static_cast<std::size_t>(far)] = true;
      centroids.row(c) = x.row(far);
    }

    const bool changed = next != assign;
    assign = std::move(next);

    DescriptorMatrix sums = DescriptorMatrix::Zero(k, x.cols());
    for (Eigen::Index i = 0; i < n; ++i) sums.row(assign[static_cast<std::size_t>(i)]) += x.row(i);
    for (int c = 0; c < k; ++c) {
      const double norm = sums.row(c).norm();
      if (norm >= kZeroNorm) centroids.row(c) = sums.row(c) / norm;
    }

    model.objective_history.push_back(cosine_objective(x, centroids, assign));
    model.iterations_run = iter;
    if (!changed) break;
  }

  model.centroids = std::move(centroids);
  model.assignments = assign;
  model.stats.reserve(static_cast<std::size_t>(k));
  for (int c = 0; c < k; ++c) {
    std::vector<Eigen::Index> members;
    for (Eigen::Index i = 0; i < n; ++i)
      if (assign[static_cast<std::size_t>(i)] == c) members.push_back(i);
    if (members.empty()) {
      // Only reachable when every point is already a singleton elsewhere.
      StandardizationStats empty;
      empty.mean = VectorXd::Zero(set.dim());
      empty.std = VectorXd::Zero(set.dim());
      model.stats.push_back(std::move(empty));
      continue;
    }
    model.stats.push_back(fit_std(set.data()(members, Eigen::all)));
  }
  return model;
}

ClusterModel fit_kstd(const DescriptorSet& set, int k, std::uint64_t seed, int max_iters) {
  return kmeans_cosine(set, KMeansOptions{k, seed, max_iters});
}

std::vector<int> assign_clusters(const ClusterModel& model, const DescriptorMatrix& data) {
  if (data.cols() != model.dim())
    throw ModelError("k-std model fitted on d=" + std::to_string(model.dim()) +
                     ", descriptors have d=" + std::to_string(data.cols()));
  const DescriptorMatrix x = unit_rows(data);
  return row_argmax(x * model.centroids.transpose());
}

DescriptorSet apply_kstd(const ClusterModel& model, const DescriptorSet& set) {
  const auto assign = assign_clusters(model, set.data());
  const auto& data = set.data();
  DescriptorMatrix out(data.rows(), data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    const auto& stats = model.stats[static_cast<std::size_t>(assign[static_cast<std::size_t>(i)])];
    for (Eigen::Index j = 0; j < data.cols(); ++j)
      out(i, j) = standardize_value(data(i, j), stats.mean(j), stats.std(j), stats.epsilon);
  }
  return set.with_data(std::move(out));
}

}  // namespace condinv
