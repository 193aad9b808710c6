#include "condinv/synthgen.hpp"

#include "condinv/ground_truth.hpp"
#include "condinv/io.hpp"
#include "condinv/random.hpp"

#include <Eigen/QR>

#include <cmath>
#include <fstream>
#include <string>

namespace condinv {
namespace {

// Independent streams derived from the user seed.
CounterRng stream(std::uint64_t seed, std::uint64_t which) {
  return CounterRng(CounterRng::mix(seed + which * 0x9e3779b97f4a7c15ULL));
}

std::vector<VectorXd> make_anchors(const SynthConfig& config) {
  if (!config.anchors.empty()) return config.anchors;
  const int d = config.dim;
  const double magnitude = config.rho * std::sqrt(static_cast<double>(d));
  CounterRng rng = stream(config.seed, 2);

  Eigen::MatrixXd basis;
  if (config.anchor_rank > 0) {
    Eigen::MatrixXd gauss(d, config.anchor_rank);
    for (int c = 0; c < config.anchor_rank; ++c)
      for (int j = 0; j < d; ++j) gauss(j, c) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    basis = qr.householderQ() * Eigen::MatrixXd::Identity(d, config.anchor_rank);
  }

  std::vector<VectorXd> anchors;
  for (int c = 0; c < config.num_conditions; ++c) {
    VectorXd direction(d);
    if (config.anchor_rank > 0) {
      VectorXd coeffs(config.anchor_rank);
      for (int r = 0; r < config.anchor_rank; ++r) coeffs(r) = rng.normal();
      direction = basis * coeffs;
    } else {
      for (int j = 0; j < d; ++j) direction(j) = rng.normal();
    }
    anchors.push_back(direction.normalized() * magnitude);
  }
  return anchors;
}

std::vector<ConditionLabel> traversal_labels(const SynthConfig& config, int conditions) {
  std::vector<ConditionLabel> labels;
  switch (config.drift) {
    case Drift::none:
      labels.push_back({0, 0, 0.0});
      break;
    case Drift::discrete:
      for (int t = 0; t < conditions; ++t) labels.push_back({t, t, 0.0});
      break;
    case Drift::continuous: {
      const int steps = config.steps_per_transition;
      const int count = (conditions - 1) * steps + 1;
      for (int t = 0; t < count; ++t) {
        const int anchor = std::min(t / steps, conditions - 2);
        const double weight = static_cast<double>(t - anchor * steps) / static_cast<double>(steps);
        labels.push_back({t, anchor, weight});
      }
      break;
    }
  }
  return labels;
}

}  // namespace

void SynthConfig::validate() const {
  if (num_places < 2) throw ArgumentError("synth needs at least 2 places");
  if (dim < 2) throw ArgumentError("synth needs dimension >= 2");
  if (!(rho >= 0.0)) throw ArgumentError("rho must be non-negative");
  if (!(noise_sigma >= 0.0)) throw ArgumentError("noise sigma must be non-negative");
  const int conditions = anchors.empty() ? num_conditions : static_cast<int>(anchors.size());
  if (conditions < 1) throw ArgumentError("synth needs at least one condition");
  for (const auto& a : anchors)
    if (a.size() != dim) throw ArgumentError("anchor length differs from dim");
  if (anchor_rank < 0 || anchor_rank > dim) throw ArgumentError("anchor rank must be in [0, dim]");
  if (drift == Drift::continuous) {
    if (steps_per_transition < 1) throw ArgumentError("continuous drift needs steps_per_transition >= 1");
    if (conditions < 2) throw ArgumentError("continuous drift needs at least 2 conditions");
  }
}

int traversal_count(const SynthConfig& config) {
  const int conditions = config.anchors.empty() ? config.num_conditions
                                                : static_cast<int>(config.anchors.size());
  switch (config.drift) {
    case Drift::none: return 1;
    case Drift::discrete: return conditions;
    case Drift::continuous: return (conditions - 1) * config.steps_per_transition + 1;
  }
  return 0;
}

SynthDataset generate(const SynthConfig& config) {
  config.validate();
  const int places = config.num_places;
  const int d = config.dim;

  DescriptorMatrix signatures(places, d);
  CounterRng place_rng = stream(config.seed, 1);
  for (int p = 0; p < places; ++p)
    for (int j = 0; j < d; ++j) signatures(p, j) = place_rng.normal();

  SynthDataset out;
  out.anchors = make_anchors(config);
  const auto traversals = traversal_labels(config, static_cast<int>(out.anchors.size()));
  out.num_traversals = static_cast<int>(traversals.size());

  const Eigen::Index rows = static_cast<Eigen::Index>(places) * out.num_traversals;
  DescriptorMatrix data(rows, d);
  std::vector<std::string> segments;
  segments.reserve(static_cast<std::size_t>(rows));
  out.conditions.reserve(static_cast<std::size_t>(rows));
  CounterRng noise_rng = stream(config.seed, 3);

  for (const auto& label : traversals) {
    VectorXd offset = out.anchors[static_cast<std::size_t>(label.anchor)];
    if (label.weight > 0.0) {
      offset = (1.0 - label.weight) * out.anchors[static_cast<std::size_t>(label.anchor)] +
               label.weight * out.anchors[static_cast<std::size_t>(label.anchor + 1)];
    }
    for (int p = 0; p < places; ++p) {
      const Eigen::Index row = static_cast<Eigen::Index>(label.traversal) * places + p;
      data.row(row) = signatures.row(p) + offset.transpose();
      if (config.noise_sigma > 0.0)
        for (int j = 0; j < d; ++j) data(row, j) += config.noise_sigma * noise_rng.normal();
      segments.push_back(std::to_string(label.traversal));
      out.conditions.push_back(label);
    }
  }

  out.descriptors = DescriptorSet(std::move(data), default_ids(static_cast<std::size_t>(rows)),
                                  std::move(segments), Role::union_set);
  GroundTruthSpec gt;
  gt.num_queries = gt.num_references = static_cast<std::uint32_t>(rows);
  gt.layout = GroundTruthLayout::concatenated;
  gt.places_per_segment = static_cast<std::uint32_t>(places);
  gt.num_segments = static_cast<std::uint32_t>(out.num_traversals);
  gt.exclude_self = true;
  out.ground_truth = build_ground_truth(gt);
  return out;
}

std::pair<DescriptorSet, DescriptorSet> combine(std::span<const DescriptorSet> sets, CombineMode mode) {
  if (mode == CombineMode::single) {
    if (sets.size() != 2) throw ArgumentError("single-condition combination needs exactly 2 sets");
  } else if (sets.size() < 2) {
    throw ArgumentError("two/multi-condition combination needs at least 2 sets");
  }
  for (const auto& s : sets) {
    if (s.rows() != sets[0].rows()) throw ArgumentError("sets differ in place count");
    if (s.dim() != sets[0].dim()) throw ArgumentError("sets differ in dimension");
  }
  if (mode == CombineMode::single)
    return {sets[1].with_role(Role::query), sets[0].with_role(Role::reference)};

  const Eigen::Index places = sets[0].rows();
  DescriptorMatrix data(places * static_cast<Eigen::Index>(sets.size()), sets[0].dim());
  std::vector<std::string> ids;
  std::vector<std::string> segments;
  for (std::size_t s = 0; s < sets.size(); ++s) {
    data.middleRows(static_cast<Eigen::Index>(s) * places, places) = sets[s].data();
    for (Eigen::Index i = 0; i < places; ++i) {
      ids.push_back(std::to_string(s) + ":" + sets[s].ids()[static_cast<std::size_t>(i)]);
      segments.push_back(sets[s].segments() ? (*sets[s].segments())[static_cast<std::size_t>(i)]
                                            : std::to_string(s));
    }
  }
  DescriptorSet joined(std::move(data), std::move(ids), std::move(segments), Role::union_set);
  return {joined.with_role(Role::query), joined.with_role(Role::reference)};
}

void save_conditions(const std::vector<ConditionLabel>& labels, const std::filesystem::path& path) {
  std::string text = "row,traversal,anchor,weight\n";
  for (std::size_t i = 0; i < labels.size(); ++i)
    text += std::to_string(i) + "," + std::to_string(labels[i].traversal) + "," +
            std::to_string(labels[i].anchor) + "," + format_double(labels[i].weight) + "\n";
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace condinv
