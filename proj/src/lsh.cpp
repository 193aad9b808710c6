#include "condinv/lsh.hpp"

#include "condinv/random.hpp"

#include <string>

namespace condinv {

ProjectionMatrix make_projection(Eigen::Index d, Eigen::Index m, std::uint64_t seed) {
  if (d < 1 || m < 1) throw ArgumentError("projection dimensions must be at least 1");
  ProjectionMatrix proj;
  proj.seed = seed;
  proj.rows.resize(m, d);
  CounterRng rng(seed);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) proj.rows(i, j) = rng.normal();
    proj.rows.row(i) /= proj.rows.row(i).norm();
  }
  return proj;
}

DescriptorMatrix apply_projection(const ProjectionMatrix& proj, const DescriptorMatrix& data) {
  if (data.cols() != proj.input_dim())
    throw ModelError("projection expects d=" + std::to_string(proj.input_dim()) +
                     ", descriptors have d=" + std::to_string(data.cols()));
  return data * proj.rows.transpose();
}

DescriptorSet apply_projection(const ProjectionMatrix& proj, const DescriptorSet& set) {
  return set.with_data(apply_projection(proj, set.data()));
}

}  // namespace condinv
