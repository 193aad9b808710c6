#include "condinv/transform.hpp"

#include "condinv/io.hpp"

#include <string>

namespace condinv {
namespace {

constexpr std::uint32_t kModelVersion = 1;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void write_stats(BinaryWriter& w, const StandardizationStats& stats) {
  w.f64s(stats.mean);
  w.f64s(stats.std);
}

StandardizationStats read_stats(BinaryReader& r, std::size_t d) {
  StandardizationStats stats;
  stats.mean = r.f64s(d);
  stats.std = r.f64s(d);
  if ((stats.std.array() < 0.0).any()) throw FormatError("negative standard deviation in model");
  return stats;
}

}  // namespace

TransformKind TransformModel::kind() const {
  return std::visit(Overloaded{
                        [](const IdentityModel&) { return TransformKind::identity; },
                        [](const StandardizationStats&) { return TransformKind::std; },
                        [](const ClusterModel&) { return TransformKind::kstd; },
                        [](const PcaModel&) { return TransformKind::pca; },
                        [](const ProjectionMatrix&) { return TransformKind::lsh; },
                    },
                    payload_);
}

std::optional<Eigen::Index> TransformModel::fitted_dim() const {
  return std::visit(Overloaded{
                        [](const IdentityModel&) -> std::optional<Eigen::Index> { return std::nullopt; },
                        [](const StandardizationStats& s) -> std::optional<Eigen::Index> { return s.dim(); },
                        [](const ClusterModel& m) -> std::optional<Eigen::Index> { return m.dim(); },
                        [](const PcaModel& m) -> std::optional<Eigen::Index> { return m.dim(); },
                        [](const ProjectionMatrix& p) -> std::optional<Eigen::Index> { return p.input_dim(); },
                    },
                    payload_);
}

DescriptorSet apply_transform(const TransformModel& model, const DescriptorSet& set) {
  if (const auto d = model.fitted_dim(); d && *d != set.dim())
    throw ModelError("model fitted on d=" + std::to_string(*d) + ", descriptors have d=" +
                     std::to_string(set.dim()));
  return std::visit(Overloaded{
                        [&](const IdentityModel&) { return set; },
                        [&](const StandardizationStats& s) { return apply_std(s, set); },
                        [&](const ClusterModel& m) { return apply_kstd(m, set); },
                        [&](const PcaModel& m) { return apply_window(m, set); },
                        [&](const ProjectionMatrix& p) { return apply_projection(p, set); },
                    },
                    model.payload());
}

Method parse_method(std::string_view name) {
  if (name == "identity" || name == "raw") return Method::identity;
  if (name == "std") return Method::std;
  if (name == "kstd") return Method::kstd;
  if (name == "dr") return Method::dr;
  if (name == "cr") return Method::cr;
  if (name == "drcr") return Method::drcr;
  if (name == "lsh") return Method::lsh;
  throw ArgumentError("unknown method '" + std::string(name) + "'");
}

std::string_view method_name(Method method) {
  switch (method) {
    case Method::identity: return "identity";
    case Method::std: return "std";
    case Method::kstd: return "kstd";
    case Method::dr: return "dr";
    case Method::cr: return "cr";
    case Method::drcr: return "drcr";
    case Method::lsh: return "lsh";
  }
  return "?";
}

void TransformSpec::validate() const {
  switch (method) {
    case Method::kstd:
      if (k < 1) throw ArgumentError("kstd needs k >= 1");
      if (max_iters < 1) throw ArgumentError("max_iters must be at least 1");
      break;
    case Method::dr:
      if (!q) throw ArgumentError("dr needs q");
      if (p != 0) throw ArgumentError("dr keeps the leading q components; use drcr to also set p");
      break;
    case Method::cr:
      if (q) throw ArgumentError("cr keeps every trailing component; use drcr to also set q");
      if (p < 0) throw ArgumentError("p must be non-negative");
      break;
    case Method::drcr:
      if (!q) throw ArgumentError("drcr needs q");
      if (p < 0 || p >= *q) throw ArgumentError("drcr needs 0 <= p < q");
      break;
    case Method::lsh:
      if (lsh_dim < 1) throw ArgumentError("lsh needs an output dimension >= 1");
      break;
    case Method::identity:
    case Method::std:
      break;
  }
}

TransformModel fit_transform(const TransformSpec& spec, const DescriptorSet& set) {
  spec.validate();
  switch (spec.method) {
    case Method::identity: return IdentityModel{};
    case Method::std: return fit_std(set);
    case Method::kstd: return fit_kstd(set, spec.k, spec.seed, spec.max_iters);
    case Method::dr:
    case Method::cr:
    case Method::drcr: return fit_pca(set, PcaOptions{spec.p, spec.q, spec.whiten});
    case Method::lsh: return make_projection(set.dim(), spec.lsh_dim, spec.seed);
  }
  throw ArgumentError("unhandled method");
}

TransformedPair fit_apply_pair(const TransformSpec& spec, const DescriptorSet& query,
                               const DescriptorSet& reference) {
  if (query.dim() != reference.dim())
    throw ArgumentError("query d=" + std::to_string(query.dim()) + " and reference d=" +
                        std::to_string(reference.dim()) + " differ");
  spec.validate();
  const bool identical = same_contents(query, reference);

  TransformModel query_model;
  TransformModel reference_model;
  switch (spec.method) {
    case Method::identity:
    case Method::lsh:
      query_model = reference_model = fit_transform(spec, query);
      break;
    case Method::std:
      query_model = fit_transform(spec, query);
      reference_model = identical ? query_model : fit_transform(spec, reference);
      break;
    case Method::kstd:
    case Method::dr:
    case Method::cr:
    case Method::drcr:
      query_model = reference_model =
          fit_transform(spec, identical ? query : union_of(query, reference));
      break;
  }
  DescriptorSet q_out = apply_transform(query_model, query);
  DescriptorSet r_out = identical ? q_out : apply_transform(reference_model, reference);
  return TransformedPair{q_out.with_role(Role::query), r_out.with_role(Role::reference),
                         std::move(query_model), std::move(reference_model)};
}

// ---------------------------------------------------------------------------
// Model containers

std::vector<char> serialize_model(const TransformModel& model) {
  BinaryWriter w;
  std::visit(Overloaded{
                 [&](const IdentityModel&) {
                   w.bytes("PRID");
                   w.u32(kModelVersion);
                 },
                 [&](const StandardizationStats& s) {
                   w.bytes("PRST");
                   w.u32(kModelVersion);
                   w.u32(static_cast<std::uint32_t>(s.dim()));
                   write_stats(w, s);
                 },
                 [&](const ClusterModel& m) {
                   w.bytes("PRKM");
                   w.u32(kModelVersion);
                   w.u32(static_cast<std::uint32_t>(m.k()));
                   w.u32(static_cast<std::uint32_t>(m.dim()));
                   w.u64(m.rng_seed);
                   w.f64s_rowmajor(m.centroids);
                   for (const auto& s : m.stats) write_stats(w, s);
                 },
                 [&](const PcaModel& m) {
                   w.bytes("PRPC");
                   w.u32(kModelVersion);
                   w.u32(static_cast<std::uint32_t>(m.dim()));
                   w.u32(static_cast<std::uint32_t>(m.rank()));
                   w.u32(static_cast<std::uint32_t>(m.p));
                   w.u32(static_cast<std::uint32_t>(m.q));
                   w.u8(m.whiten ? 1 : 0);
                   write_stats(w, m.pre_stats);
                   w.f64s_colmajor(m.components);
                   w.f64s(m.singular_values);
                   w.f64s(m.coeff_std);
                 },
                 [&](const ProjectionMatrix& p) {
                   w.bytes("PRLP");
                   w.u32(kModelVersion);
                   w.u32(static_cast<std::uint32_t>(p.input_dim()));
                   w.u32(static_cast<std::uint32_t>(p.output_dim()));
                   w.u64(p.seed);
                 },
             },
             model.payload());
  return w.buffer();
}

TransformModel deserialize_model(std::vector<char> bytes) {
  BinaryReader r(std::move(bytes));
  if (r.remaining() < 8) throw FormatError("model file too short");
  const std::string magic = r.bytes(4);
  const auto version = r.u32();
  if (version != kModelVersion) throw FormatError("unsupported model version " + std::to_string(version));

  TransformModel model;
  if (magic == "PRID") {
    model = IdentityModel{};
  } else if (magic == "PRST") {
    const auto d = r.u32();
    model = read_stats(r, d);
  } else if (magic == "PRKM") {
    ClusterModel m;
    const auto k = r.u32();
    const auto d = r.u32();
    if (k < 1 || d < 1) throw FormatError("PRKM with empty shape");
    m.rng_seed = r.u64();
    m.centroids.resize(k, d);
    for (std::uint32_t i = 0; i < k; ++i)
      for (std::uint32_t j = 0; j < d; ++j) m.centroids(i, j) = r.f64();
    for (std::uint32_t i = 0; i < k; ++i) m.stats.push_back(read_stats(r, d));
    model = std::move(m);
  } else if (magic == "PRPC") {
    PcaModel m;
    const auto d = r.u32();
    const auto rank = r.u32();
    m.p = static_cast<int>(r.u32());
    m.q = static_cast<int>(r.u32());
    m.whiten = r.u8() != 0;
    if (d < 1 || rank < 1 || rank > d || m.p >= m.q || m.q > static_cast<int>(rank))
      throw FormatError("PRPC header violates 0 <= p < q <= r <= d");
    m.pre_stats = read_stats(r, d);
    m.components.resize(d, rank);
    for (std::uint32_t j = 0; j < rank; ++j)
      for (std::uint32_t i = 0; i < d; ++i) m.components(i, j) = r.f64();
    m.singular_values = r.f64s(rank);
    m.coeff_std = r.f64s(rank);
    model = std::move(m);
  } else if (magic == "PRLP") {
    const auto d = r.u32();
    const auto m = r.u32();
    const auto seed = r.u64();
    ProjectionMatrix proj = make_projection(d, m, seed);
    if (r.remaining() == static_cast<std::size_t>(d) * m * 8) {
      for (std::uint32_t i = 0; i < m; ++i)
        for (std::uint32_t j = 0; j < d; ++j) proj.rows(i, j) = r.f64();
    }
    model = std::move(proj);
  } else {
    throw FormatError("unknown model magic '" + magic + "'");
  }
  if (r.remaining() != 0) throw FormatError("trailing bytes in model file");
  return model;
}

void save_model(const TransformModel& model, const std::filesystem::path& path) {
  BinaryWriter w;
  const auto bytes = serialize_model(model);
  w.bytes(std::string_view(bytes.data(), bytes.size()));
  w.write_to(path);
}

TransformModel load_model(const std::filesystem::path& path) {
  auto reader = BinaryReader::from_file(path);
  const std::string raw = reader.bytes(reader.remaining());
  return deserialize_model(std::vector<char>(raw.begin(), raw.end()));
}

}  // namespace condinv
