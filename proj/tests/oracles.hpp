#pragma once

// Independent reference computations used to check the library.
// Written as plain loops on purpose: none of them share code with src/.

#include "condinv/matcheval.hpp"
#include "condinv/types.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using condinv::DescriptorMatrix;

inline DescriptorMatrix random_matrix(std::mt19937_64& gen, Eigen::Index n, Eigen::Index d,
                                      double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  DescriptorMatrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < d; ++j) m(i, j) = normal(gen);
  return m;
}

inline double cosine(const DescriptorMatrix& a, Eigen::Index i, const DescriptorMatrix& b,
                     Eigen::Index j) {
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    dot += a(i, c) * b(j, c);
    na += a(i, c) * a(i, c);
    nb += b(j, c) * b(j, c);
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline DescriptorMatrix cosine_matrix(const DescriptorMatrix& a, const DescriptorMatrix& b) {
  DescriptorMatrix out(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j) out(i, j) = cosine(a, i, b, j);
  return out;
}

inline double column_mean(const DescriptorMatrix& m, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += m(i, j);
  return s / static_cast<double>(m.rows());
}

inline double column_population_std(const DescriptorMatrix& m, Eigen::Index j) {
  const double mu = column_mean(m, j);
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) s += (m(i, j) - mu) * (m(i, j) - mu);
  return std::sqrt(s / static_cast<double>(m.rows()));
}

/// max |A^T A - I| with a triple loop.
inline double gram_identity_error(const Eigen::MatrixXd& a) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index r = 0; r < a.rows(); ++r) s += a(r, i) * a(r, j);
      worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
    }
  return worst;
}

/// Labels: 1 positive, 0 negative, -1 excluded (masked or undefined).
/// Each positive's precision is counted by direct comparison against every
/// other candidate, so no sort is involved.
inline double exhaustive_ap(const DescriptorMatrix& scores,
                            const std::vector<std::vector<int>>& labels) {
  struct Item {
    double s;
    Eigen::Index q;
    Eigen::Index r;
    bool pos;
  };
  std::vector<Item> items;
  for (Eigen::Index i = 0; i < scores.rows(); ++i)
    for (Eigen::Index j = 0; j < scores.cols(); ++j) {
      const int l = labels[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (l < 0 || std::isnan(scores(i, j))) continue;
      items.push_back({scores(i, j), i, j, l > 0});
    }
  auto before = [](const Item& a, const Item& b) {
    if (a.s > b.s) return true;
    if (a.s < b.s) return false;
    if (a.q != b.q) return a.q < b.q;
    return a.r < b.r;
  };
  double sum = 0.0;
  std::size_t positives = 0;
  for (const auto& x : items) {
    if (!x.pos) continue;
    ++positives;
    std::size_t ahead = 0;
    std::size_t hits_ahead = 0;
    for (const auto& y : items)
      if (before(y, x)) {
        ++ahead;
        if (y.pos) ++hits_ahead;
      }
    sum += static_cast<double>(hits_ahead + 1) / static_cast<double>(ahead + 1);
  }
  if (positives == 0) return std::numeric_limits<double>::quiet_NaN();
  return sum / static_cast<double>(positives);
}

/// Sum of cosine distances of each row to the normalized mean of its group.
inline double partition_distortion(const DescriptorMatrix& x, const std::vector<int>& groups, int k) {
  double total = 0.0;
  for (int g = 0; g < k; ++g) {
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(x.cols());
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (groups[static_cast<std::size_t>(i)] == g) sum += x.row(i) / x.row(i).norm();
    if (sum.norm() == 0.0) continue;
    const Eigen::RowVectorXd c = sum / sum.norm();
    for (Eigen::Index i = 0; i < x.rows(); ++i)
      if (groups[static_cast<std::size_t>(i)] == g) total += 1.0 - x.row(i).dot(c) / x.row(i).norm();
  }
  return total;
}

/// Best split of the rows into two non-empty groups, by exhaustive search.
/// Row 0 is always in group 0.
inline std::vector<int> best_two_partition(const DescriptorMatrix& x) {
  const auto n = static_cast<unsigned>(x.rows());
  std::vector<int> best;
  double best_cost = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> groups(n, 0);
    for (unsigned i = 1; i < n; ++i) groups[i] = (mask >> (i - 1)) & 1u;
    const double cost = partition_distortion(x, groups, 2);
    if (cost < best_cost) {
      best_cost = cost;
      best = groups;
    }
  }
  return best;
}

inline std::vector<char> file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("condinv_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace oracle
