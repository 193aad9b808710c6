#pragma once

#include "condinv/transform.hpp"
#include "condinv/types.hpp"

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace condinv {

inline constexpr double kMinDescriptorNorm = 1e-15;

/// a·b / (|a||b|). Throws UndefinedSimilarity when either norm is below 1e-15.
template <typename DerivedA, typename DerivedB>
double cosine_similarity(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  if (a.size() != b.size()) throw ArgumentError("cosine_similarity: dimension mismatch");
  const double na = a.template cast<double>().norm();
  const double nb = b.template cast<double>().norm();
  if (na < kMinDescriptorNorm || nb < kMinDescriptorNorm)
    throw UndefinedSimilarity("cosine_similarity: zero-norm descriptor");
  return a.template cast<double>().dot(b.template cast<double>()) / (na * nb);
}

struct SimilarityMatrix {
  DescriptorMatrix scores;  // NaN where undefined
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> defined;
  std::vector<IndexPair> masked;

  Eigen::Index num_queries() const { return scores.rows(); }
  Eigen::Index num_references() const { return scores.cols(); }
  std::size_t num_undefined() const {
    return static_cast<std::size_t>((!defined).count());
  }
};

SimilarityMatrix similarity_matrix(const DescriptorMatrix& query, const DescriptorMatrix& reference,
                                   const GroundTruth* gt = nullptr);
SimilarityMatrix similarity_matrix(const DescriptorSet& query, const DescriptorSet& reference,
                                   const GroundTruth* gt = nullptr);

/// Wraps raw scores; NaN entries become undefined.
SimilarityMatrix similarity_from_scores(DescriptorMatrix scores, const GroundTruth* gt = nullptr);

enum class ApMode { pooled, per_query };

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

struct EvalResult {
  double avg_precision = 0.0;
  std::vector<PrPoint> pr_curve;
  std::size_t num_positives = 0;
  std::size_t num_pairs_evaluated = 0;
  std::size_t num_undefined = 0;
};

/// Ranks unmasked, defined pairs by descending score, ties by ascending
/// (query, reference), and averages precision at each positive.
///
/// Pooled mode ranks every pair together; per-query mode averages the AP of
/// each query row that has at least one positive and leaves pr_curve empty.
EvalResult average_precision(const SimilarityMatrix& sim, const GroundTruth& gt,
                             ApMode mode = ApMode::pooled);

/// Fits per the method's fit-set policy, transforms, scores and evaluates.
EvalResult evaluate_pipeline(const DescriptorSet& query, const DescriptorSet& reference,
                             const TransformSpec& spec, const GroundTruth& gt,
                             ApMode mode = ApMode::pooled);

/// Same with an already fitted model applied to both sets.
EvalResult evaluate_pipeline(const DescriptorSet& query, const DescriptorSet& reference,
                             const TransformModel& model, const GroundTruth& gt,
                             ApMode mode = ApMode::pooled);

/// "metric,value" CSV.
void save_eval_result(const EvalResult& result, const std::filesystem::path& path);
/// "recall,precision" CSV.
void save_pr_curve(const EvalResult& result, const std::filesystem::path& path);

}  // namespace condinv
