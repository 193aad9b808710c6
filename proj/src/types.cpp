#include "condinv/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <unordered_set>

namespace condinv {

std::string default_id(std::size_t row) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%07zu", row);
  return buf;
}

std::vector<std::string> default_ids(std::size_t n) {
  std::vector<std::string> ids;
  ids.reserve(n);
  for (std::size_t i = 0; i < n; ++i) ids.push_back(default_id(i));
  return ids;
}

void check_finite(const DescriptorMatrix& data) {
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (!std::isfinite(data(i, j))) {
        throw DataError("non-finite value at row " + std::to_string(i) + ", col " +
                        std::to_string(j));
      }
    }
  }
}

DescriptorSet::DescriptorSet(DescriptorMatrix data, std::vector<std::string> ids,
                             std::optional<std::vector<std::string>> segments, Role role)
    : data_(std::move(data)), ids_(std::move(ids)), segments_(std::move(segments)), role_(role) {
  if (data_.rows() < 1 || data_.cols() < 1)
    throw DataError("descriptor set needs at least one row and one column");
  check_finite(data_);
  if (ids_.size() != static_cast<std::size_t>(data_.rows()))
    throw DataError("id count " + std::to_string(ids_.size()) + " does not match row count " +
                    std::to_string(data_.rows()));
  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw DataError("duplicate descriptor id '" + id + "'");
  }
  if (segments_ && segments_->size() != ids_.size())
    throw DataError("segment count does not match row count");
}

DescriptorSet::DescriptorSet(DescriptorMatrix data, Role role)
    : DescriptorSet(data, default_ids(static_cast<std::size_t>(data.rows())), std::nullopt, role) {}

DescriptorSet DescriptorSet::with_data(DescriptorMatrix data) const {
  if (data.rows() != data_.rows()) throw DataError("with_data: row count changed");
  return DescriptorSet(std::move(data), ids_, segments_, role_);
}

DescriptorSet DescriptorSet::with_role(Role role) const {
  DescriptorSet copy = *this;
  copy.role_ = role;
  return copy;
}

DescriptorSet union_of(const DescriptorSet& a, const DescriptorSet& b) {
  if (a.dim() != b.dim()) throw ArgumentError("union_of: dimension mismatch");
  DescriptorMatrix data(a.rows() + b.rows(), a.dim());
  data.topRows(a.rows()) = a.data();
  data.bottomRows(b.rows()) = b.data();
  std::vector<std::string> ids;
  ids.reserve(static_cast<std::size_t>(data.rows()));
  for (const auto& id : a.ids()) ids.push_back("q:" + id);
  for (const auto& id : b.ids()) ids.push_back("r:" + id);
  std::optional<std::vector<std::string>> segments;
  if (a.segments() && b.segments()) {
    segments = *a.segments();
    segments->insert(segments->end(), b.segments()->begin(), b.segments()->end());
  }
  return DescriptorSet(std::move(data), std::move(ids), std::move(segments), Role::union_set);
}

bool same_contents(const DescriptorSet& a, const DescriptorSet& b) {
  if (&a == &b) return true;
  if (a.rows() != b.rows() || a.dim() != b.dim()) return false;
  return a.ids() == b.ids() && a.data() == b.data();
}

Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> GroundTruth::labels()
    const {
  Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> out =
      Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(
          num_queries, num_references);
  for (const auto& [q, r] : positives) out(q, r) = 1;
  for (const auto& [q, r] : mask) out(q, r) = -1;
  return out;
}

void GroundTruth::normalize() {
  if (tolerance < 0) throw ArgumentError("ground truth tolerance must be non-negative");
  auto tidy = [this](std::vector<IndexPair>& pairs) {
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    for (const auto& [q, r] : pairs) {
      if (q >= num_queries || r >= num_references)
        throw ArgumentError("ground-truth pair (" + std::to_string(q) + "," + std::to_string(r) +
                            ") out of bounds");
    }
  };
  tidy(positives);
  tidy(mask);
  std::vector<IndexPair> overlap;
  std::set_intersection(positives.begin(), positives.end(), mask.begin(), mask.end(),
                        std::back_inserter(overlap));
  if (!overlap.empty()) throw ArgumentError("ground truth pair is both positive and masked");
}

}  // namespace condinv
