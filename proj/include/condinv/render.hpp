#pragma once

#include "condinv/matcheval.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace condinv {

enum class ImageFormat { pgm, ppm };

struct RenderedImage {
  std::vector<std::uint8_t> bytes;  // complete P5/P6 file
  bool constant = false;            // every rendered entry was equal
};

/// Min-max normalized heatmap over defined, unmasked entries.
/// PGM: gray = round(255 t), masked/undefined 0.
/// PPM: blue -> green -> red, masked/undefined white.
/// A constant matrix renders as 128 gray (PGM) or the mid colour (PPM).
RenderedImage render_similarity(const SimilarityMatrix& sim, ImageFormat format);

}  // namespace condinv
