#pragma once

#include "condinv/types.hpp"

#include <cstdint>

namespace condinv {

/// Dense random projection with unit-norm Gaussian rows.
struct ProjectionMatrix {
  DescriptorMatrix rows;  // m x d
  std::uint64_t seed = 0;

  Eigen::Index output_dim() const { return rows.rows(); }
  Eigen::Index input_dim() const { return rows.cols(); }
};

/// Rows are filled row-major from CounterRng(seed).normal(), then normalized.
ProjectionMatrix make_projection(Eigen::Index d, Eigen::Index m, std::uint64_t seed);

DescriptorMatrix apply_projection(const ProjectionMatrix& proj, const DescriptorMatrix& data);
DescriptorSet apply_projection(const ProjectionMatrix& proj, const DescriptorSet& set);

}  // namespace condinv
