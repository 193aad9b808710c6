#include "condinv/matcheval.hpp"

#include "condinv/io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <string>

namespace condinv {
namespace {

struct RankedPair {
  double score;
  std::uint32_t query;
  std::uint32_t reference;
  bool positive;
};

bool ranks_before(const RankedPair& a, const RankedPair& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.query != b.query) return a.query < b.query;
  return a.reference < b.reference;
}

/// Sum of precision at each positive hit over an already sorted ranking.
double accumulate_ap(const std::vector<RankedPair>& ranked, std::size_t positives,
                     std::vector<PrPoint>* curve) {
  std::size_t hits = 0;
  double sum = 0.0;
  for (std::size_t k = 0; k < ranked.size(); ++k) {
    if (!ranked[k].positive) continue;
    ++hits;
    const double precision = static_cast<double>(hits) / static_cast<double>(k + 1);
    sum += precision;
    if (curve)
      curve->push_back({static_cast<double>(hits) / static_cast<double>(positives), precision});
  }
  return sum / static_cast<double>(positives);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace

SimilarityMatrix similarity_from_scores(DescriptorMatrix scores, const GroundTruth* gt) {
  SimilarityMatrix sim;
  sim.defined = scores.array().isFinite();
  sim.scores = std::move(scores);
  if (gt) {
    if (gt->num_queries != sim.scores.rows() || gt->num_references != sim.scores.cols())
      throw ArgumentError("ground truth shape does not match the similarity matrix");
    sim.masked = gt->mask;
  }
  return sim;
}

SimilarityMatrix similarity_matrix(const DescriptorMatrix& query, const DescriptorMatrix& reference,
                                   const GroundTruth* gt) {
  if (query.cols() != reference.cols())
    throw ArgumentError("query d=" + std::to_string(query.cols()) + " and reference d=" +
                        std::to_string(reference.cols()) + " differ");
  auto normalized = [](const DescriptorMatrix& m, std::vector<bool>& ok) {
    DescriptorMatrix out(m.rows(), m.cols());
    ok.assign(static_cast<std::size_t>(m.rows()), true);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double norm = m.row(i).norm();
      if (norm < kMinDescriptorNorm) {
        ok[static_cast<std::size_t>(i)] = false;
        out.row(i).setZero();
      } else {
        out.row(i) = m.row(i) / norm;
      }
    }
    return out;
  };
  std::vector<bool> q_ok;
  std::vector<bool> r_ok;
  const DescriptorMatrix qn = normalized(query, q_ok);
  const DescriptorMatrix rn = normalized(reference, r_ok);
  DescriptorMatrix scores = qn * rn.transpose();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    if (!q_ok[static_cast<std::size_t>(i)]) {
      scores.row(i).setConstant(nan);
      continue;
    }
    for (Eigen::Index j = 0; j < scores.cols(); ++j)
      if (!r_ok[static_cast<std::size_t>(j)]) scores(i, j) = nan;
  }
  return similarity_from_scores(std::move(scores), gt);
}

SimilarityMatrix similarity_matrix(const DescriptorSet& query, const DescriptorSet& reference,
                                   const GroundTruth* gt) {
  return similarity_matrix(query.data(), reference.data(), gt);
}

EvalResult average_precision(const SimilarityMatrix& sim, const GroundTruth& gt, ApMode mode) {
  const auto nq = sim.num_queries();
  const auto nr = sim.num_references();
  if (gt.num_queries != nq || gt.num_references != nr)
    throw ArgumentError("ground truth is " + std::to_string(gt.num_queries) + "x" +
                        std::to_string(gt.num_references) + ", similarity matrix is " +
                        std::to_string(nq) + "x" + std::to_string(nr));
  auto labels = gt.labels();
  for (const auto& [q, r] : sim.masked) {
    if (q >= nq || r >= nr) throw ArgumentError("masked pair out of bounds");
    labels(q, r) = -1;
  }

  EvalResult result;
  result.num_undefined = sim.num_undefined();

  auto collect_row = [&](Eigen::Index i, std::vector<RankedPair>& out, std::size_t& positives) {
    for (Eigen::Index j = 0; j < nr; ++j) {
      if (labels(i, j) < 0 || !sim.defined(i, j)) continue;
      const bool positive = labels(i, j) > 0;
      positives += positive ? 1 : 0;
      out.push_back({sim.scores(i, j), static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j),
                     positive});
    }
  };

  if (mode == ApMode::pooled) {
    std::vector<RankedPair> ranked;
    ranked.reserve(static_cast<std::size_t>(nq * nr));
    std::size_t positives = 0;
    for (Eigen::Index i = 0; i < nq; ++i) collect_row(i, ranked, positives);
    if (positives == 0) throw EvaluationError("no unmasked positive pairs to evaluate");
    std::sort(ranked.begin(), ranked.end(), ranks_before);
    result.num_positives = positives;
    result.num_pairs_evaluated = ranked.size();
    result.avg_precision = accumulate_ap(ranked, positives, &result.pr_curve);
    return result;
  }

  double sum = 0.0;
  std::size_t rows_with_positives = 0;
  std::vector<RankedPair> ranked;
  for (Eigen::Index i = 0; i < nq; ++i) {
    ranked.clear();
    std::size_t positives = 0;
    collect_row(i, ranked, positives);
    result.num_pairs_evaluated += ranked.size();
    if (positives == 0) continue;
    std::sort(ranked.begin(), ranked.end(), ranks_before);
    result.num_positives += positives;
    sum += accumulate_ap(ranked, positives, nullptr);
    ++rows_with_positives;
  }
  if (rows_with_positives == 0) throw EvaluationError("no unmasked positive pairs to evaluate");
  result.avg_precision = sum / static_cast<double>(rows_with_positives);
  return result;
}

EvalResult evaluate_pipeline(const DescriptorSet& query, const DescriptorSet& reference,
                             const TransformSpec& spec, const GroundTruth& gt, ApMode mode) {
  const auto transformed = fit_apply_pair(spec, query, reference);
  const auto sim = similarity_matrix(transformed.query, transformed.reference, &gt);
  return average_precision(sim, gt, mode);
}

EvalResult evaluate_pipeline(const DescriptorSet& query, const DescriptorSet& reference,
                             const TransformModel& model, const GroundTruth& gt, ApMode mode) {
  const auto q = apply_transform(model, query);
  const auto r = same_contents(query, reference) ? q : apply_transform(model, reference);
  const auto sim = similarity_matrix(q, r, &gt);
  return average_precision(sim, gt, mode);
}

void save_eval_result(const EvalResult& result, const std::filesystem::path& path) {
  std::string text = "metric,value\n";
  text += "avg_precision," + format_double(result.avg_precision) + "\n";
  text += "num_positives," + std::to_string(result.num_positives) + "\n";
  text += "num_pairs_evaluated," + std::to_string(result.num_pairs_evaluated) + "\n";
  text += "num_undefined," + std::to_string(result.num_undefined) + "\n";
  write_text(path, text);
}

void save_pr_curve(const EvalResult& result, const std::filesystem::path& path) {
  std::string text = "recall,precision\n";
  for (const auto& point : result.pr_curve)
    text += format_double(point.recall) + "," + format_double(point.precision) + "\n";
  write_text(path, text);
}

}  // namespace condinv
