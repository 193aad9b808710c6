#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace condinv {

/// Row-major dense matrix, one descriptor per row.
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DescriptorMatrix = RowMatrix<double>;
using VectorXd = Vector<double>;

// Error hierarchy. The CLI maps ArgumentError to exit code 2, everything else to 1.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct FormatError : Error {
  using Error::Error;
};
struct DataError : Error {
  using Error::Error;
};
struct ModelError : Error {
  using Error::Error;
};
struct ArgumentError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct EvaluationError : Error {
  using Error::Error;
};
struct UndefinedSimilarity : Error {
  using Error::Error;
};

enum class Role { query, reference, union_set };

/// A set of descriptors with row identities and optional segment labels.
///
/// Construction validates the invariants: at least one row and column, every
/// value finite, ids unique, segments (when present) one per row.
class DescriptorSet {
 public:
  DescriptorSet() = default;
  DescriptorSet(DescriptorMatrix data, std::vector<std::string> ids,
                std::optional<std::vector<std::string>> segments = std::nullopt,
                Role role = Role::union_set);

  /// Ids default to zero-padded row indices.
  explicit DescriptorSet(DescriptorMatrix data, Role role = Role::union_set);

  const DescriptorMatrix& data() const { return data_; }
  const std::vector<std::string>& ids() const { return ids_; }
  const std::optional<std::vector<std::string>>& segments() const { return segments_; }
  Role role() const { return role_; }

  Eigen::Index rows() const { return data_.rows(); }
  Eigen::Index dim() const { return data_.cols(); }

  /// Same ids, segments and role around new data with the same row count.
  DescriptorSet with_data(DescriptorMatrix data) const;
  DescriptorSet with_role(Role role) const;

 private:
  DescriptorMatrix data_;
  std::vector<std::string> ids_;
  std::optional<std::vector<std::string>> segments_;
  Role role_ = Role::union_set;
};

std::string default_id(std::size_t row);
std::vector<std::string> default_ids(std::size_t n);

/// Throws DataError naming the first non-finite entry.
void check_finite(const DescriptorMatrix& data);

/// Stacks rows of `a` above rows of `b`. Ids are prefixed "q:" and "r:" so they stay unique.
DescriptorSet union_of(const DescriptorSet& a, const DescriptorSet& b);

/// True when both sets hold the same ids and bit-identical data.
bool same_contents(const DescriptorSet& a, const DescriptorSet& b);

struct StandardizationStats {
  VectorXd mean;
  VectorXd std;
  double epsilon = 1e-12;

  Eigen::Index dim() const { return mean.size(); }
};

using IndexPair = std::pair<std::uint32_t, std::uint32_t>;

/// Positive and masked (query, reference) pairs. Both lists are kept sorted and unique.
struct GroundTruth {
  std::uint32_t num_queries = 0;
  std::uint32_t num_references = 0;
  std::vector<IndexPair> positives;
  std::vector<IndexPair> mask;
  int tolerance = 0;

  /// Dense Nq x Nr labels: 1 positive, -1 masked, 0 negative.
  Eigen::Matrix<std::int8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> labels() const;

  /// Sorts, dedups and checks bounds and positives ∩ mask = ∅.
  void normalize();
};

}  // namespace condinv
