#pragma once

#include "condinv/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace condinv {

enum class DescriptorFormat { prdm, csv };
enum class PrdmDtype : std::uint8_t { f32 = 0, f64 = 1 };

DescriptorFormat format_from_path(const std::filesystem::path& path);

/// Loads descriptors; reads the "<path>.labels.csv" sidecar when present.
DescriptorSet load_descriptors(const std::filesystem::path& path, DescriptorFormat format);
DescriptorSet load_descriptors(const std::filesystem::path& path);

/// Writes descriptors. A sidecar is written when the set has segments or non-default ids.
void save_descriptors(const DescriptorSet& set, const std::filesystem::path& path,
                      DescriptorFormat format, PrdmDtype dtype = PrdmDtype::f64);
void save_descriptors(const DescriptorSet& set, const std::filesystem::path& path);

/// Raw PRDM matrix access without the DescriptorSet invariants. Used for
/// similarity matrices, which may carry NaN for undefined entries.
DescriptorMatrix read_prdm_matrix(const std::filesystem::path& path);
void write_prdm_matrix(const DescriptorMatrix& m, const std::filesystem::path& path,
                       PrdmDtype dtype = PrdmDtype::f64);

/// "query,reference,label" with label 1 (positive) or -1 (masked).
void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& path);
/// Shape is taken from the arguments since unlisted pairs are negatives.
GroundTruth load_ground_truth(const std::filesystem::path& path, std::uint32_t num_queries,
                              std::uint32_t num_references);

std::filesystem::path labels_sidecar(const std::filesystem::path& path);

/// Shortest decimal text for a double that round-trips at 17 significant digits.
std::string format_double(double value);

// Little-endian binary helpers shared by the model containers.
class BinaryWriter {
 public:
  void bytes(std::string_view s);
  void u8(std::uint8_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void f32(float v);
  void f64s(const VectorXd& values);
  /// Row-major element order.
  void f64s_rowmajor(const Eigen::Ref<const Eigen::MatrixXd>& m);
  /// Column-major element order.
  void f64s_colmajor(const Eigen::Ref<const Eigen::MatrixXd>& m);

  const std::vector<char>& buffer() const { return buffer_; }
  void write_to(const std::filesystem::path& path) const;

 private:
  std::vector<char> buffer_;
};

class BinaryReader {
 public:
  explicit BinaryReader(std::vector<char> buffer) : buffer_(std::move(buffer)) {}
  static BinaryReader from_file(const std::filesystem::path& path);

  std::string bytes(std::size_t n);
  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  float f32();
  VectorXd f64s(std::size_t n);

  std::size_t remaining() const { return buffer_.size() - pos_; }

 private:
  const char* take(std::size_t n);

  std::vector<char> buffer_;
  std::size_t pos_ = 0;
};

}  // namespace condinv
