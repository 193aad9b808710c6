#pragma once

#include "condinv/types.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace condinv {

/// Per-column mean and population standard deviation.
///
/// Columns whose entries are all equal get std exactly 0 and mean equal to
/// that value, so they standardize to exact zeros.
template <typename Derived>
StandardizationStats fit_std(const Eigen::MatrixBase<Derived>& data) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (n < 1 || d < 1) throw ArgumentError("fit_std: empty descriptor matrix");
  StandardizationStats stats;
  stats.mean.resize(d);
  stats.std.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const auto col = data.col(j);
    const Scalar first = col(0);
    if ((col.array() == first).all()) {
      stats.mean(j) = static_cast<double>(first);
      stats.std(j) = 0.0;
      continue;
    }
    double sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) sum += static_cast<double>(col(i));
    const double mean = sum / static_cast<double>(n);
    double sq = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double c = static_cast<double>(col(i)) - mean;
      sq += c * c;
    }
    stats.mean(j) = mean;
    stats.std(j) = std::sqrt(sq / static_cast<double>(n));
  }
  return stats;
}

StandardizationStats fit_std(const DescriptorSet& set);

/// (x - mean) / std per column; columns with std <= epsilon map to 0.
DescriptorMatrix apply_std(const StandardizationStats& stats, const DescriptorMatrix& data);
DescriptorSet apply_std(const StandardizationStats& stats, const DescriptorSet& set);

/// Spherical k-means state plus per-cluster standardization statistics.
struct ClusterModel {
  DescriptorMatrix centroids;  // K x d, unit rows
  std::vector<StandardizationStats> stats;
  std::uint64_t rng_seed = 0;
  int iterations_run = 0;

  // Fit diagnostics; empty for deserialized models.
  std::vector<int> assignments;
  std::vector<double> objective_history;

  int k() const { return static_cast<int>(centroids.rows()); }
  Eigen::Index dim() const { return centroids.cols(); }
};

struct KMeansOptions {
  int k = 1;
  std::uint64_t seed = 0;
  int max_iters = 100;
};

/// Spherical k-means with greedy k-means++ seeding under cosine distance.
///
/// Rows are unit-normalized for clustering; statistics are taken from the
/// original member rows. Empty clusters are reseeded with the point farthest
/// from its own centroid. Stops when assignments repeat or max_iters is hit.
ClusterModel kmeans_cosine(const DescriptorSet& set, const KMeansOptions& options);

ClusterModel fit_kstd(const DescriptorSet& set, int k, std::uint64_t seed, int max_iters = 100);

/// Nearest centroid by cosine (ties to the lowest index) for each row.
std::vector<int> assign_clusters(const ClusterModel& model, const DescriptorMatrix& data);

/// Standardizes each row with the statistics of its nearest cluster. Row order is preserved.
DescriptorSet apply_kstd(const ClusterModel& model, const DescriptorSet& set);

/// Sum over rows of 1 - cos(row, assigned centroid).
double cosine_objective(const DescriptorMatrix& unit_rows, const DescriptorMatrix& centroids,
                        const std::vector<int>& assignments);

/// Rows divided by their Euclidean norm. Throws DataError on a zero-norm row.
DescriptorMatrix unit_rows(const DescriptorMatrix& data);

}  // namespace condinv
