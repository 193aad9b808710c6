#include "condinv/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace condinv {
namespace {

static_assert(std::endian::native == std::endian::little, "little-endian host assumed");

constexpr std::string_view kPrdmMagic = "PRDM";
constexpr std::uint32_t kPrdmVersion = 1;

std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::ofstream open_for_write(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> lines_of(const std::vector<char>& bytes) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : bytes) {
    if (c == '\n') {
      lines.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(std::move(current));
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

double parse_double(std::string_view text, std::size_t row, std::size_t col) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw FormatError("cannot parse '" + std::string(text) + "' at row " + std::to_string(row) +
                      ", col " + std::to_string(col));
  }
  return value;
}

DescriptorMatrix parse_csv_matrix(const std::vector<char>& bytes) {
  const auto lines = lines_of(bytes);
  if (lines.empty()) throw FormatError("empty CSV descriptor file");
  std::vector<double> values;
  std::size_t cols = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (i == 0) cols = fields.size();
    if (fields.size() != cols)
      throw FormatError("row " + std::to_string(i) + " has " + std::to_string(fields.size()) +
                        " columns, expected " + std::to_string(cols));
    for (std::size_t j = 0; j < fields.size(); ++j) values.push_back(parse_double(fields[j], i, j));
  }
  return Eigen::Map<DescriptorMatrix>(values.data(), static_cast<Eigen::Index>(lines.size()),
                                      static_cast<Eigen::Index>(cols));
}

struct Labels {
  std::vector<std::string> ids;
  std::optional<std::vector<std::string>> segments;
};

Labels read_labels(const std::filesystem::path& path, std::size_t rows) {
  const auto lines = lines_of(read_file(path));
  if (lines.empty() || trim(lines.front()) != "id,segment")
    throw FormatError("labels sidecar '" + path.string() + "' must start with header 'id,segment'");
  if (lines.size() - 1 != rows)
    throw DataError("labels sidecar has " + std::to_string(lines.size() - 1) + " rows, expected " +
                    std::to_string(rows));
  Labels labels;
  std::vector<std::string> segments;
  bool any_segment = false;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != 2) throw FormatError("labels sidecar row " + std::to_string(i - 1) + " malformed");
    labels.ids.emplace_back(trim(fields[0]));
    segments.emplace_back(trim(fields[1]));
    any_segment = any_segment || !segments.back().empty();
  }
  if (any_segment) labels.segments = std::move(segments);
  return labels;
}

void write_labels(const DescriptorSet& set, const std::filesystem::path& path) {
  std::string text = "id,segment\n";
  for (Eigen::Index i = 0; i < set.rows(); ++i) {
    const auto& id = set.ids()[static_cast<std::size_t>(i)];
    const std::string segment = set.segments() ? (*set.segments())[static_cast<std::size_t>(i)] : "";
    if (id.find(',') != std::string::npos || segment.find(',') != std::string::npos)
      throw DataError("ids and segments must not contain commas");
    text += id + "," + segment + "\n";
  }
  auto out = open_for_write(path, false);
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

bool has_default_ids(const DescriptorSet& set) {
  for (std::size_t i = 0; i < set.ids().size(); ++i) {
    if (set.ids()[i] != default_id(i)) return false;
  }
  return true;
}

}  // namespace

DescriptorFormat format_from_path(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".csv" || ext == ".txt") return DescriptorFormat::csv;
  return DescriptorFormat::prdm;
}

std::filesystem::path labels_sidecar(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".labels.csv");
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

// ---------------------------------------------------------------------------
// Binary helpers

void BinaryWriter::bytes(std::string_view s) { buffer_.insert(buffer_.end(), s.begin(), s.end()); }

void BinaryWriter::u8(std::uint8_t v) { buffer_.push_back(static_cast<char>(v)); }

void BinaryWriter::u32(std::uint32_t v) {
  char raw[4];
  std::memcpy(raw, &v, 4);
  buffer_.insert(buffer_.end(), raw, raw + 4);
}

void BinaryWriter::u64(std::uint64_t v) {
  char raw[8];
  std::memcpy(raw, &v, 8);
  buffer_.insert(buffer_.end(), raw, raw + 8);
}

void BinaryWriter::f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

void BinaryWriter::f64s(const VectorXd& values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) f64(values(i));
}

void BinaryWriter::f64s_rowmajor(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) f64(m(i, j));
}

void BinaryWriter::f64s_colmajor(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) f64(m(i, j));
}

void BinaryWriter::write_to(const std::filesystem::path& path) const {
  auto out = open_for_write(path, true);
  out.write(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

BinaryReader BinaryReader::from_file(const std::filesystem::path& path) {
  return BinaryReader(read_file(path));
}

const char* BinaryReader::take(std::size_t n) {
  if (remaining() < n) throw FormatError("unexpected end of binary data");
  const char* p = buffer_.data() + pos_;
  pos_ += n;
  return p;
}

std::string BinaryReader::bytes(std::size_t n) { return std::string(take(n), n); }

std::uint8_t BinaryReader::u8() { return static_cast<std::uint8_t>(*take(1)); }

std::uint32_t BinaryReader::u32() {
  std::uint32_t v;
  std::memcpy(&v, take(4), 4);
  return v;
}

std::uint64_t BinaryReader::u64() {
  std::uint64_t v;
  std::memcpy(&v, take(8), 8);
  return v;
}

double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

float BinaryReader::f32() { return std::bit_cast<float>(u32()); }

VectorXd BinaryReader::f64s(std::size_t n) {
  VectorXd v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = f64();
  return v;
}

// ---------------------------------------------------------------------------
// PRDM

DescriptorMatrix read_prdm_matrix(const std::filesystem::path& path) {
  auto reader = BinaryReader::from_file(path);
  if (reader.remaining() < 17 || reader.bytes(4) != kPrdmMagic)
    throw FormatError("'" + path.string() + "' is not a PRDM file (bad magic)");
  const auto version = reader.u32();
  if (version != kPrdmVersion) throw FormatError("unsupported PRDM version " + std::to_string(version));
  const auto rows = reader.u32();
  const auto cols = reader.u32();
  const auto dtype = reader.u8();
  if (dtype > 1) throw FormatError("unknown PRDM dtype " + std::to_string(dtype));
  const std::size_t width = dtype == 0 ? 4 : 8;
  const std::size_t count = static_cast<std::size_t>(rows) * cols;
  if (reader.remaining() != count * width)
    throw FormatError("PRDM payload size does not match header " + std::to_string(rows) + "x" +
                      std::to_string(cols));
  DescriptorMatrix m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j)
      m(i, j) = dtype == 0 ? static_cast<double>(reader.f32()) : reader.f64();
  return m;
}

void write_prdm_matrix(const DescriptorMatrix& m, const std::filesystem::path& path, PrdmDtype dtype) {
  BinaryWriter w;
  w.bytes(kPrdmMagic);
  w.u32(kPrdmVersion);
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  w.u8(static_cast<std::uint8_t>(dtype));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (dtype == PrdmDtype::f32)
        w.f32(static_cast<float>(m(i, j)));
      else
        w.f64(m(i, j));
    }
  w.write_to(path);
}

DescriptorSet load_descriptors(const std::filesystem::path& path, DescriptorFormat format) {
  DescriptorMatrix data =
      format == DescriptorFormat::prdm ? read_prdm_matrix(path) : parse_csv_matrix(read_file(path));
  if (data.rows() < 1 || data.cols() < 1) throw FormatError("'" + path.string() + "' holds no descriptors");
  check_finite(data);
  const auto sidecar = labels_sidecar(path);
  if (std::filesystem::exists(sidecar)) {
    auto labels = read_labels(sidecar, static_cast<std::size_t>(data.rows()));
    return DescriptorSet(std::move(data), std::move(labels.ids), std::move(labels.segments));
  }
  return DescriptorSet(std::move(data));
}

DescriptorSet load_descriptors(const std::filesystem::path& path) {
  return load_descriptors(path, format_from_path(path));
}

void save_descriptors(const DescriptorSet& set, const std::filesystem::path& path,
                      DescriptorFormat format, PrdmDtype dtype) {
  if (format == DescriptorFormat::prdm) {
    write_prdm_matrix(set.data(), path, dtype);
  } else {
    std::string text;
    for (Eigen::Index i = 0; i < set.rows(); ++i) {
      for (Eigen::Index j = 0; j < set.dim(); ++j) {
        if (j) text += ',';
        text += format_double(set.data()(i, j));
      }
      text += '\n';
    }
    auto out = open_for_write(path, false);
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
  }
  const auto sidecar = labels_sidecar(path);
  if (set.segments() || !has_default_ids(set)) {
    write_labels(set, sidecar);
  } else if (std::filesystem::exists(sidecar)) {
    std::filesystem::remove(sidecar);
  }
}

void save_descriptors(const DescriptorSet& set, const std::filesystem::path& path) {
  save_descriptors(set, path, format_from_path(path));
}

// ---------------------------------------------------------------------------
// Ground truth

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& path) {
  std::vector<std::pair<IndexPair, int>> rows;
  rows.reserve(gt.positives.size() + gt.mask.size());
  for (const auto& p : gt.positives) rows.emplace_back(p, 1);
  for (const auto& p : gt.mask) rows.emplace_back(p, -1);
  std::sort(rows.begin(), rows.end());
  std::string text = "query,reference,label\n";
  for (const auto& [pair, label] : rows)
    text += std::to_string(pair.first) + "," + std::to_string(pair.second) + "," +
            std::to_string(label) + "\n";
  auto out = open_for_write(path, false);
  out << text;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

GroundTruth load_ground_truth(const std::filesystem::path& path, std::uint32_t num_queries,
                              std::uint32_t num_references) {
  const auto lines = lines_of(read_file(path));
  if (lines.empty() || trim(lines.front()) != "query,reference,label")
    throw FormatError("ground-truth file must start with header 'query,reference,label'");
  GroundTruth gt;
  gt.num_queries = num_queries;
  gt.num_references = num_references;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto fields = split(lines[i], ',');
    if (fields.size() != 3) throw FormatError("ground-truth row " + std::to_string(i) + " malformed");
    long long v[3];
    for (int f = 0; f < 3; ++f) {
      const auto t = trim(fields[static_cast<std::size_t>(f)]);
      const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v[f]);
      if (ec != std::errc() || ptr != t.data() + t.size())
        throw FormatError("ground-truth row " + std::to_string(i) + " malformed");
    }
    if (v[0] < 0 || v[1] < 0) throw FormatError("negative index in ground-truth row " + std::to_string(i));
    const IndexPair pair{static_cast<std::uint32_t>(v[0]), static_cast<std::uint32_t>(v[1])};
    if (v[2] == 1)
      gt.positives.push_back(pair);
    else if (v[2] == -1)
      gt.mask.push_back(pair);
    else
      throw FormatError("ground-truth label must be 1 or -1 (row " + std::to_string(i) + ")");
  }
  gt.normalize();
  return gt;
}

}  // namespace condinv
