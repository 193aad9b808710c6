#pragma once

#include "condinv/lsh.hpp"
#include "condinv/pca.hpp"
#include "condinv/standardize.hpp"
#include "condinv/types.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <utility>
#include <variant>

namespace condinv {

struct IdentityModel {};

enum class TransformKind { identity, std, kstd, pca, lsh };

/// A fitted transform. The payload alternative determines the kind.
class TransformModel {
 public:
  using Payload =
      std::variant<IdentityModel, StandardizationStats, ClusterModel, PcaModel, ProjectionMatrix>;

  TransformModel() = default;
  template <typename T>
    requires(!std::is_same_v<std::decay_t<T>, TransformModel> && std::is_constructible_v<Payload, T &&>)
  TransformModel(T&& payload) : payload_(std::forward<T>(payload)) {}  // NOLINT(implicit)

  TransformKind kind() const;
  const Payload& payload() const { return payload_; }

  /// Input dimension the model was fitted on; nullopt for identity.
  std::optional<Eigen::Index> fitted_dim() const;

 private:
  Payload payload_ = IdentityModel{};
};

/// Throws ModelError when the set dimension does not match the fitted dimension.
DescriptorSet apply_transform(const TransformModel& model, const DescriptorSet& set);

enum class Method { identity, std, kstd, dr, cr, drcr, lsh };

Method parse_method(std::string_view name);
std::string_view method_name(Method method);

/// Unfitted transform description: the method plus its parameters.
struct TransformSpec {
  Method method = Method::identity;
  int k = 1;
  int p = 0;
  std::optional<int> q;
  bool whiten = false;
  std::uint64_t seed = 0;
  int max_iters = 100;
  Eigen::Index lsh_dim = 0;

  /// Rejects parameters that make no sense for the method.
  void validate() const;
};

/// Fit on a single set.
TransformModel fit_transform(const TransformSpec& spec, const DescriptorSet& set);

struct TransformedPair {
  DescriptorSet query;
  DescriptorSet reference;
  TransformModel query_model;
  TransformModel reference_model;
};

/// Applies the method's fit-set policy and transforms both sets.
///
/// STD fits query and reference separately. K-STD and the PCA methods fit on
/// the union, or on the single set when query and reference are identical.
TransformedPair fit_apply_pair(const TransformSpec& spec, const DescriptorSet& query,
                               const DescriptorSet& reference);

// Binary model containers. Magic selects the kind on load:
// PRID identity, PRST standardization, PRKM k-std, PRPC pca, PRLP projection.
std::vector<char> serialize_model(const TransformModel& model);
TransformModel deserialize_model(std::vector<char> bytes);
void save_model(const TransformModel& model, const std::filesystem::path& path);
TransformModel load_model(const std::filesystem::path& path);

}  // namespace condinv
