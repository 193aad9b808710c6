#include "condinv/ground_truth.hpp"

#include <algorithm>
#include <string>

namespace condinv {

GroundTruth build_ground_truth(const GroundTruthSpec& spec) {
  if (spec.tolerance < 0) throw ArgumentError("tolerance must be non-negative");
  GroundTruth gt;
  gt.num_queries = spec.num_queries;
  gt.num_references = spec.num_references;
  gt.tolerance = spec.tolerance;
  const auto tol = static_cast<std::int64_t>(spec.tolerance);

  if (spec.layout == GroundTruthLayout::aligned) {
    if (spec.num_queries != spec.num_references)
      throw ArgumentError("aligned ground truth needs equal query and reference counts");
    if (spec.exclude_self) throw ArgumentError("exclude_self applies to the concatenated layout only");
    const auto n = static_cast<std::int64_t>(spec.num_queries);
    for (std::int64_t i = 0; i < n; ++i) {
      for (std::int64_t j = std::max<std::int64_t>(0, i - tol); j <= std::min(n - 1, i + tol); ++j)
        gt.positives.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
    }
    return gt;
  }

  const std::uint64_t expected =
      static_cast<std::uint64_t>(spec.places_per_segment) * spec.num_segments;
  if (spec.places_per_segment == 0 || spec.num_segments == 0 || spec.num_queries != expected ||
      spec.num_references != expected) {
    throw ArgumentError("concatenated ground truth needs nq = nr = places_per_segment x num_segments (" +
                        std::to_string(spec.places_per_segment) + " x " +
                        std::to_string(spec.num_segments) + ")");
  }
  const auto places = static_cast<std::int64_t>(spec.places_per_segment);
  const auto segments = static_cast<std::int64_t>(spec.num_segments);
  for (std::int64_t i = 0; i < places * segments; ++i) {
    const std::int64_t seg_i = i / places;
    const std::int64_t place_i = i % places;
    for (std::int64_t seg_j = 0; seg_j < segments; ++seg_j) {
      if (seg_j == seg_i) continue;
      const std::int64_t lo = std::max<std::int64_t>(0, place_i - tol);
      const std::int64_t hi = std::min(places - 1, place_i + tol);
      for (std::int64_t place_j = lo; place_j <= hi; ++place_j)
        gt.positives.emplace_back(static_cast<std::uint32_t>(i),
                                  static_cast<std::uint32_t>(seg_j * places + place_j));
    }
    if (spec.exclude_self)
      gt.mask.emplace_back(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i));
  }
  std::sort(gt.positives.begin(), gt.positives.end());
  return gt;
}

}  // namespace condinv
