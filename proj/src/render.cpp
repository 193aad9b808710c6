#include "condinv/render.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace condinv {
namespace {

std::uint8_t channel(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

std::array<std::uint8_t, 3> colormap(double t) {
  if (t < 0.5) {
    const double s = 2.0 * t;
    return {0, channel(255.0 * s), channel(255.0 * (1.0 - s))};
  }
  const double s = 2.0 * t - 1.0;
  return {channel(255.0 * s), channel(255.0 * (1.0 - s)), 0};
}

}  // namespace

RenderedImage render_similarity(const SimilarityMatrix& sim, ImageFormat format) {
  const auto rows = sim.num_queries();
  const auto cols = sim.num_references();
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> visible = sim.defined;
  for (const auto& [q, r] : sim.masked) visible(q, r) = false;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      if (visible(i, j)) {
        lo = std::min(lo, sim.scores(i, j));
        hi = std::max(hi, sim.scores(i, j));
      }

  RenderedImage image;
  image.constant = !(hi > lo);
  const bool gray = format == ImageFormat::pgm;
  const std::string header = std::string(gray ? "P5" : "P6") + "\n" + std::to_string(cols) + " " +
                             std::to_string(rows) + "\n255\n";
  image.bytes.assign(header.begin(), header.end());
  image.bytes.reserve(header.size() + static_cast<std::size_t>(rows * cols) * (gray ? 1 : 3));

  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!visible(i, j)) {
        if (gray)
          image.bytes.push_back(0);
        else
          image.bytes.insert(image.bytes.end(), {255, 255, 255});
        continue;
      }
      if (gray) {
        image.bytes.push_back(image.constant ? 128 : channel(255.0 * (sim.scores(i, j) - lo) / (hi - lo)));
      } else {
        const double t = image.constant ? 0.5 : (sim.scores(i, j) - lo) / (hi - lo);
        const auto rgb = colormap(t);
        image.bytes.insert(image.bytes.end(), rgb.begin(), rgb.end());
      }
    }
  }
  return image;
}

}  // namespace condinv
