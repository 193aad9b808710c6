#pragma once

#include "condinv/types.hpp"

#include <optional>

namespace condinv {

/// Principal components of a standardized descriptor set and the kept window.
///
/// Window bounds follow 1-based component numbering: the output keeps
/// components p+1 .. q. Internally column j of `components` is component j+1.
struct PcaModel {
  Eigen::MatrixXd components;  // d x r, orthonormal columns
  VectorXd singular_values;    // r, non-increasing
  StandardizationStats pre_stats;
  int p = 0;
  int q = 0;
  bool whiten = false;
  VectorXd coeff_std;  // r, population std of each coefficient over the fit set

  Eigen::Index dim() const { return components.rows(); }
  int rank() const { return static_cast<int>(components.cols()); }
  int window_size() const { return q - p; }
};

struct PcaOptions {
  int p = 0;
  std::optional<int> q;  // nullopt keeps every component
  bool whiten = false;
};

/// Standardizes, takes the economic SVD and records coefficient scales.
/// Each component is sign-flipped so its largest-magnitude entry is positive.
PcaModel fit_pca(const DescriptorSet& set, const PcaOptions& options);

/// Same components, new window. Validates 0 <= p < q <= r.
PcaModel with_window(const PcaModel& model, int p, std::optional<int> q, bool whiten);

/// Standardize with pre_stats, then rotate into component space (all r coefficients).
DescriptorMatrix project(const PcaModel& model, const DescriptorMatrix& data);
DescriptorSet project(const PcaModel& model, const DescriptorSet& set);

/// Coefficients p+1 .. q, divided by their fit-set std when whitening.
/// Coefficients with std < 1e-12 map to 0 under whitening.
DescriptorMatrix apply_window(const PcaModel& model, const DescriptorMatrix& data);
DescriptorSet apply_window(const PcaModel& model, const DescriptorSet& set);

/// max |V^T V - I|.
double orthonormality_error(const Eigen::MatrixXd& v);

}  // namespace condinv
