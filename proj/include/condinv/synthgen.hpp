#pragma once

#include "condinv/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace condinv {

enum class Drift { none, discrete, continuous };

/// Additive condition-offset model: descriptor = place signature + offset + noise.
struct SynthConfig {
  int num_places = 200;
  int dim = 128;
  int num_conditions = 4;         // anchors generated when `anchors` is empty
  std::vector<VectorXd> anchors;  // explicit offsets, each of length dim
  double rho = 3.0;               // auto anchors have norm rho * sqrt(dim)
  int anchor_rank = 0;            // > 0 confines auto anchors to a random subspace of that rank
  Drift drift = Drift::discrete;
  int steps_per_transition = 50;  // continuous drift only
  double noise_sigma = 0.1;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Offset of one traversal: (1 - weight) * anchors[anchor] + weight * anchors[anchor + 1].
struct ConditionLabel {
  int traversal = 0;
  int anchor = 0;
  double weight = 0.0;
};

struct SynthDataset {
  DescriptorSet descriptors;  // traversal-major: all places of traversal 0, then 1, ...
  GroundTruth ground_truth;
  std::vector<ConditionLabel> conditions;  // one per row
  std::vector<VectorXd> anchors;
  int num_traversals = 0;
};

/// Number of traversals the config produces: 1 for none, C for discrete,
/// (C - 1) * steps + 1 for continuous.
int traversal_count(const SynthConfig& config);

/// Place signatures and anchors come from independent seeded streams, so
/// changing rho or noise leaves the place signatures unchanged.
SynthDataset generate(const SynthConfig& config);

enum class CombineMode { single, two, multi };

/// single: (query = sets[1], reference = sets[0]).
/// two / multi: query = reference = concatenation in order.
std::pair<DescriptorSet, DescriptorSet> combine(std::span<const DescriptorSet> sets, CombineMode mode);

/// "row,traversal,anchor,weight" CSV.
void save_conditions(const std::vector<ConditionLabel>& labels, const std::filesystem::path& path);

}  // namespace condinv
