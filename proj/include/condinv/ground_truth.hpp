#pragma once

#include "condinv/types.hpp"

#include <cstdint>

namespace condinv {

enum class GroundTruthLayout { aligned, concatenated };

struct GroundTruthSpec {
  std::uint32_t num_queries = 0;
  std::uint32_t num_references = 0;
  GroundTruthLayout layout = GroundTruthLayout::aligned;
  std::uint32_t places_per_segment = 0;
  std::uint32_t num_segments = 1;
  int tolerance = 0;
  bool exclude_self = false;
};

/// Aligned: positives are |i - j| <= tolerance.
/// Concatenated: positives are cross-segment pairs whose place index
/// (index mod places_per_segment) differs by at most tolerance; with
/// exclude_self every (i, i) pair is masked.
GroundTruth build_ground_truth(const GroundTruthSpec& spec);

}  // namespace condinv
