#include "condinv/pca.hpp"

#include "condinv/standardize.hpp"

#include <Eigen/SVD>

#include <string>

namespace condinv {
namespace {

constexpr double kDegenerateScale = 1e-12;

void check_dim(const PcaModel& model, Eigen::Index d) {
  if (model.dim() != d)
    throw ModelError("pca model fitted on d=" + std::to_string(model.dim()) +
                     ", descriptors have d=" + std::to_string(d));
}

void validate_window(int p, int q, int rank) {
  if (p < 0) throw ArgumentError("p must be non-negative");
  if (q > rank)
    throw ArgumentError("q=" + std::to_string(q) + " exceeds the economic SVD rank " +
                        std::to_string(rank) + " (min of descriptor count and dimension)");
  if (p >= q)
    throw ArgumentError("window needs p < q (p=" + std::to_string(p) + ", q=" + std::to_string(q) + ")");
}

}  // namespace

double orthonormality_error(const Eigen::MatrixXd& v) {
  const Eigen::MatrixXd gram = v.transpose() * v;
  return (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
}

PcaModel fit_pca(const DescriptorSet& set, const PcaOptions& options) {
  const auto n = set.rows();
  const auto d = set.dim();
  const int rank = static_cast<int>(std::min(n, d));
  const int q = options.q.value_or(rank);
  validate_window(options.p, q, rank);

  PcaModel model;
  model.pre_stats = fit_std(set.data());
  const Eigen::MatrixXd standardized = apply_std(model.pre_stats, set.data());

  Eigen::BDCSVD<Eigen::MatrixXd> svd(standardized, Eigen::ComputeThinV);
  model.components = svd.matrixV().leftCols(rank);
  model.singular_values = svd.singularValues().head(rank);

  for (int j = 0; j < rank; ++j) {
    Eigen::Index arg = 0;
    model.components.col(j).cwiseAbs().maxCoeff(&arg);
    if (model.components(arg, j) < 0.0) model.components.col(j) *= -1.0;
  }

  const Eigen::MatrixXd coeffs = standardized * model.components;
  model.coeff_std.resize(rank);
  for (int j = 0; j < rank; ++j) {
    const double mean = coeffs.col(j).mean();
    model.coeff_std(j) = std::sqrt((coeffs.col(j).array() - mean).square().sum() / static_cast<double>(n));
  }

  model.p = options.p;
  model.q = q;
  model.whiten = options.whiten;
  return model;
}

PcaModel with_window(const PcaModel& model, int p, std::optional<int> q, bool whiten) {
  const int upper = q.value_or(model.rank());
  validate_window(p, upper, model.rank());
  PcaModel out = model;
  out.p = p;
  out.q = upper;
  out.whiten = whiten;
  return out;
}

DescriptorMatrix project(const PcaModel& model, const DescriptorMatrix& data) {
  check_dim(model, data.cols());
  const DescriptorMatrix standardized = apply_std(model.pre_stats, data);
  return standardized * model.components;
}

DescriptorSet project(const PcaModel& model, const DescriptorSet& set) {
  return set.with_data(project(model, set.data()));
}

DescriptorMatrix apply_window(const PcaModel& model, const DescriptorMatrix& data) {
  check_dim(model, data.cols());
  validate_window(model.p, model.q, model.rank());
  DescriptorMatrix out = project(model, data).middleCols(model.p, model.window_size());
  if (model.whiten) {
    for (int j = 0; j < model.window_size(); ++j) {
      const double scale = model.coeff_std(model.p + j);
      if (scale < kDegenerateScale)
        out.col(j).setZero();
      else
        out.col(j) /= scale;
    }
  }
  return out;
}

DescriptorSet apply_window(const PcaModel& model, const DescriptorSet& set) {
  return set.with_data(apply_window(model, set.data()));
}

}  // namespace condinv
