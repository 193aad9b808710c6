#include "condinv/cli.hpp"

#include "condinv/ground_truth.hpp"
#include "condinv/io.hpp"
#include "condinv/matcheval.hpp"
#include "condinv/render.hpp"
#include "condinv/synthgen.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

namespace condinv::cli {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

/// Splices "key=value" lines from --config right after the subcommand so later flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ArgumentError("--config needs a path");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return rest;

  std::ifstream in(config_path);
  if (!in) throw ArgumentError("cannot read config file '" + config_path + "'");
  std::vector<std::string> from_file;
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ArgumentError("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value == "true") {
      from_file.push_back("--" + key);
    } else if (value != "false") {
      from_file.push_back("--" + key);
      from_file.push_back(value);
    }
  }
  std::vector<std::string> out;
  if (!rest.empty()) out.push_back(rest.front());
  out.insert(out.end(), from_file.begin(), from_file.end());
  if (rest.size() > 1) out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return buf;
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

bool is_pca(Method m) { return m == Method::dr || m == Method::cr || m == Method::drcr; }

// Options shared by transform, eval and bench.
struct MethodFlags {
  std::string method = "identity";
  int k = 1;
  int p = 0;
  int q = 0;
  bool whiten = false;
  std::uint64_t seed = 0;
  int max_iters = 100;
  long lsh_dim = 0;

  CLI::Option* method_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* p_opt = nullptr;
  CLI::Option* q_opt = nullptr;
  CLI::Option* whiten_opt = nullptr;
  CLI::Option* lsh_opt = nullptr;
  CLI::Option* iters_opt = nullptr;

  void attach(CLI::App* app) {
    method_opt = app->add_option("--method", method, "identity|std|kstd|dr|cr|drcr|lsh");
    k_opt = app->add_option("--k", k, "cluster count (kstd)");
    p_opt = app->add_option("--p", p, "leading components removed (cr, drcr)");
    q_opt = app->add_option("--q", q, "upper bound of the kept window (dr, drcr)");
    whiten_opt = app->add_flag("--whiten", whiten, "whiten kept coefficients (dr, cr, drcr)");
    app->add_option("--seed", seed, "seed for kstd initialization and lsh");
    iters_opt = app->add_option("--max-iters", max_iters, "k-means iteration cap");
    lsh_opt = app->add_option("--lsh-dim", lsh_dim, "projection output dimension (lsh)");
  }

  bool any_fit_parameter() const {
    return k_opt->count() || p_opt->count() || q_opt->count() || whiten_opt->count() ||
           lsh_opt->count() || iters_opt->count();
  }

  /// Rejects flags that do not belong to the chosen method.
  TransformSpec spec() const {
    TransformSpec s;
    s.method = parse_method(method);
    const auto reject = [&](CLI::Option* opt, bool allowed) {
      if (opt->count() && !allowed)
        throw ArgumentError(opt->get_name() + " does not apply to method " + method);
    };
    reject(k_opt, s.method == Method::kstd);
    reject(iters_opt, s.method == Method::kstd);
    reject(p_opt, s.method == Method::cr || s.method == Method::drcr);
    reject(q_opt, s.method == Method::dr || s.method == Method::drcr);
    reject(whiten_opt, is_pca(s.method));
    reject(lsh_opt, s.method == Method::lsh);
    s.k = k;
    s.p = p;
    if (q_opt->count()) s.q = q;
    s.whiten = whiten;
    s.seed = seed;
    s.max_iters = max_iters;
    s.lsh_dim = lsh_dim;
    s.validate();
    return s;
  }
};

GroundTruth load_gt_for(const std::string& path, const DescriptorSet& query, const DescriptorSet& ref) {
  return load_ground_truth(path, static_cast<std::uint32_t>(query.rows()),
                           static_cast<std::uint32_t>(ref.rows()));
}

// ---------------------------------------------------------------------------

struct TransformArgs {
  MethodFlags flags;
  std::string in, ref, out, ref_out, model_out, model_in;
};

int cmd_transform(const TransformArgs& a, std::ostream& out) {
  // Flags are validated before any file is read so usage errors win.
  std::optional<TransformSpec> spec;
  if (!a.model_in.empty()) {
    if (a.flags.any_fit_parameter() || a.flags.method_opt->count())
      throw ArgumentError("method flags cannot be combined with --model-in");
  } else {
    if (!a.flags.method_opt->count()) throw ArgumentError("--method or --model-in is required");
    spec = a.flags.spec();
  }
  if (!a.ref_out.empty() && a.ref.empty()) throw ArgumentError("--ref-out needs --ref");

  std::optional<DescriptorSet> ref;
  const auto query = load_descriptors(a.in);
  if (!a.ref.empty()) ref = load_descriptors(a.ref);

  TransformModel model;
  DescriptorSet q_out;
  std::optional<DescriptorSet> r_out;
  if (!spec) {
    model = load_model(a.model_in);
    q_out = apply_transform(model, query);
    if (ref) r_out = apply_transform(model, *ref);
  } else if (ref) {
    auto pair = fit_apply_pair(*spec, query, *ref);
    model = std::move(pair.query_model);
    q_out = std::move(pair.query);
    r_out = std::move(pair.reference);
  } else {
    model = fit_transform(*spec, query);
    q_out = apply_transform(model, query);
  }
  save_descriptors(q_out, a.out);
  if (r_out && !a.ref_out.empty()) save_descriptors(*r_out, a.ref_out);
  if (!a.model_out.empty()) save_model(model, a.model_out);
  out << "wrote " << a.out << " (N=" << q_out.rows() << ", d=" << q_out.dim() << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  MethodFlags flags;
  std::string query, ref, gt, sim_out, pr_out, metrics_out, model_in, ap_mode = "pooled";
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  if (a.ap_mode != "pooled" && a.ap_mode != "per-query")
    throw ArgumentError("--ap-mode must be pooled or per-query");
  const ApMode mode = a.ap_mode == "pooled" ? ApMode::pooled : ApMode::per_query;
  std::optional<TransformSpec> spec;
  if (!a.model_in.empty()) {
    if (a.flags.any_fit_parameter() || a.flags.method_opt->count())
      throw ArgumentError("--model-in cannot be combined with method flags");
  } else {
    spec = a.flags.spec();
  }

  const auto query = load_descriptors(a.query);
  const auto ref = load_descriptors(a.ref);
  const auto gt = load_gt_for(a.gt, query, ref);

  DescriptorSet q_out;
  DescriptorSet r_out;
  if (!spec) {
    const auto model = load_model(a.model_in);
    q_out = apply_transform(model, query);
    r_out = same_contents(query, ref) ? q_out : apply_transform(model, ref);
  } else {
    auto pair = fit_apply_pair(*spec, query, ref);
    q_out = std::move(pair.query);
    r_out = std::move(pair.reference);
  }
  const auto sim = similarity_matrix(q_out, r_out, &gt);
  if (!a.sim_out.empty()) write_prdm_matrix(sim.scores, a.sim_out);
  const auto result = average_precision(sim, gt, mode);
  if (result.num_undefined)
    err << "warning: " << result.num_undefined << " undefined similarities treated as masked\n";
  if (!a.pr_out.empty()) save_pr_curve(result, a.pr_out);
  if (!a.metrics_out.empty()) save_eval_result(result, a.metrics_out);
  out << "avgP=" << fixed(result.avg_precision, 4) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string param, values, q_values, p_values, query, ref, gt, out;
  int k = 1;
  int p = 0;
  int q = 0;
  bool whiten = false;
  std::uint64_t seed = 0;
  CLI::Option* q_opt = nullptr;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  SweepSpec spec;
  if (a.param == "k")
    spec.parameter = SweepParameter::k;
  else if (a.param == "q")
    spec.parameter = SweepParameter::q;
  else if (a.param == "p")
    spec.parameter = SweepParameter::p;
  else if (a.param == "q_and_p")
    spec.parameter = SweepParameter::q_and_p;
  else
    throw ArgumentError("--param must be k, q, p or q_and_p");

  if (spec.parameter == SweepParameter::q_and_p) {
    if (a.q_values.empty() || a.p_values.empty())
      throw ArgumentError("q_and_p sweeps need --q-values and --p-values");
    spec.values = parse_values(a.q_values);
    spec.p_values = parse_values(a.p_values);
  } else {
    if (a.values.empty()) throw ArgumentError("--values is required");
    spec.values = parse_values(a.values);
  }
  spec.fixed_k = a.k;
  spec.fixed_p = a.p;
  if (a.q_opt->count()) spec.fixed_q = a.q;
  spec.whiten = a.whiten;
  spec.seed = a.seed;

  const auto query = load_descriptors(a.query);
  const auto ref = a.ref.empty() ? query : load_descriptors(a.ref);
  const auto gt = load_gt_for(a.gt, query, ref);

  const auto rows = run_sweep(spec, query, ref, gt);
  for (const auto& row : rows)
    if (row.degenerate)
      err << "warning: degenerate point (q=" << row.q << ", p=" << row.p << ", k=" << row.k
          << "): no defined positive pairs, avgp recorded as 0\n";
  const std::string csv = sweep_csv(spec, rows);
  write_text(a.out, csv);

  const auto best = std::max_element(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
    return x.avgp < y.avgp;
  });
  SweepSpec single = spec;
  const std::string best_csv = sweep_csv(single, {*best});
  out << "best: " << best_csv.substr(best_csv.find('\n') + 1);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  SynthConfig config;
  std::string drift = "discrete";
  std::string out;
  std::string format = "prdm";
};

int cmd_synth(SynthArgs a, std::ostream& out) {
  if (a.drift == "none")
    a.config.drift = Drift::none;
  else if (a.drift == "discrete")
    a.config.drift = Drift::discrete;
  else if (a.drift == "continuous")
    a.config.drift = Drift::continuous;
  else
    throw ArgumentError("--drift must be none, discrete or continuous");
  if (a.format != "prdm" && a.format != "csv") throw ArgumentError("--format must be prdm or csv");

  const auto data = generate(a.config);
  const std::string descriptors = a.out + (a.format == "prdm" ? ".prdm" : ".csv");
  save_descriptors(data.descriptors, descriptors,
                   a.format == "prdm" ? DescriptorFormat::prdm : DescriptorFormat::csv);
  save_ground_truth(data.ground_truth, a.out + ".gt.csv");
  save_conditions(data.conditions, a.out + ".conditions.csv");
  out << "N=" << data.descriptors.rows() << " d=" << data.descriptors.dim()
      << " segments=" << data.num_traversals << " positives=" << data.ground_truth.positives.size()
      << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct RenderArgs {
  std::string sim, out, format, gt;
};

int cmd_render(const RenderArgs& a, std::ostream& out, std::ostream& err) {
  std::string format = a.format;
  if (format.empty()) format = std::filesystem::path(a.out).extension() == ".ppm" ? "ppm" : "pgm";
  if (format != "pgm" && format != "ppm") throw ArgumentError("--format must be pgm or ppm");
  auto scores = read_prdm_matrix(a.sim);
  std::optional<GroundTruth> gt;
  if (!a.gt.empty())
    gt = load_ground_truth(a.gt, static_cast<std::uint32_t>(scores.rows()),
                           static_cast<std::uint32_t>(scores.cols()));
  const auto sim = similarity_from_scores(std::move(scores), gt ? &*gt : nullptr);
  const auto image = render_similarity(sim, format == "pgm" ? ImageFormat::pgm : ImageFormat::ppm);
  if (image.constant) err << "warning: constant similarity matrix rendered as mid-gray\n";
  std::ofstream file(a.out, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + a.out + "' for writing");
  file.write(reinterpret_cast<const char*>(image.bytes.data()),
             static_cast<std::streamsize>(image.bytes.size()));
  if (!file) throw IoError("write failed for '" + a.out + "'");
  out << "wrote " << a.out << " (" << sim.num_references() << "x" << sim.num_queries() << ")\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct BenchArgs {
  MethodFlags flags;
  std::string in, out;
  int repeat = 3;
};

std::string param_label(const TransformSpec& spec) {
  switch (spec.method) {
    case Method::kstd: return "k=" + std::to_string(spec.k);
    case Method::dr: return "q=" + std::to_string(*spec.q);
    case Method::cr: return "p=" + std::to_string(spec.p);
    case Method::drcr: return "p=" + std::to_string(spec.p) + ":q=" + std::to_string(*spec.q);
    case Method::lsh: return "m=" + std::to_string(spec.lsh_dim);
    default: return "-";
  }
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  if (a.repeat < 1) throw ArgumentError("--repeat must be at least 1");
  if (!a.flags.method_opt->count()) throw ArgumentError("--method is required");
  const auto spec = a.flags.spec();
  const auto set = load_descriptors(a.in);

  using Clock = std::chrono::steady_clock;
  std::vector<double> learn;
  std::vector<double> infer;
  TransformModel model;
  for (int r = 0; r < a.repeat; ++r) {
    const auto t0 = Clock::now();
    model = fit_transform(spec, set);
    const auto t1 = Clock::now();
    const auto transformed = apply_transform(model, set);
    const auto t2 = Clock::now();
    learn.push_back(std::chrono::duration<double>(t1 - t0).count());
    infer.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count() /
                    static_cast<double>(set.rows()));
  }
  const double learn_s = a.repeat == 1 ? learn.front() : median(learn);
  const double infer_ms = a.repeat == 1 ? infer.front() : median(infer);
  const double model_mb = static_cast<double>(model_footprint_bytes(model)) / (1024.0 * 1024.0);

  const std::string csv = "method,param,learn_s,infer_ms,model_mb\n" +
                          std::string(method_name(spec.method)) + "," + param_label(spec) + "," +
                          fixed(learn_s, 4) + "," + fixed(infer_ms, 6) + "," + fixed(model_mb, 4) + "\n";
  if (!a.out.empty()) write_text(a.out, csv);
  out << csv;
  return kExitOk;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<int> parse_values(const std::string& text) {
  std::vector<int> values;
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(trim(s), &used);
      if (used != trim(s).size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ArgumentError("cannot parse sweep value '" + s + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw ArgumentError("range must be start:stop:step");
    const int start = to_int(parts[0]);
    const int stop = to_int(parts[1]);
    const int step = to_int(parts[2]);
    if (step <= 0 || stop < start) throw ArgumentError("range needs step > 0 and stop >= start");
    for (int v = start; v <= stop; v += step) values.push_back(v);
  } else {
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) values.push_back(to_int(part));
  }
  if (values.empty()) throw ArgumentError("sweep needs at least one value");
  return values;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const DescriptorSet& query,
                                const DescriptorSet& reference, const GroundTruth& gt) {
  if (spec.values.empty()) throw ArgumentError("sweep needs at least one value");
  const bool identical = same_contents(query, reference);
  const Eigen::Index fit_rows = identical ? query.rows() : query.rows() + reference.rows();
  const int rank = static_cast<int>(std::min(fit_rows, query.dim()));

  auto evaluate = [&](SweepRow row, auto&& run) {
    try {
      row.avgp = run().avg_precision;
    } catch (const EvaluationError&) {
      row.avgp = 0.0;
      row.degenerate = true;
    }
    return row;
  };

  std::vector<SweepRow> rows;
  if (spec.parameter == SweepParameter::k) {
    for (int k : spec.values)
      if (k < 1 || k > fit_rows)
        throw ArgumentError("k=" + std::to_string(k) + " outside [1, " + std::to_string(fit_rows) + "]");
    for (int k : spec.values) {
      TransformSpec t;
      t.method = Method::kstd;
      t.k = k;
      t.seed = spec.seed;
      SweepRow row;
      row.k = k;
      rows.push_back(evaluate(row, [&] { return evaluate_pipeline(query, reference, t, gt); }));
    }
    return rows;
  }

  std::vector<std::pair<int, int>> points;  // (q, p)
  switch (spec.parameter) {
    case SweepParameter::q:
      for (int q : spec.values) points.emplace_back(q, spec.fixed_p);
      break;
    case SweepParameter::p:
      for (int p : spec.values) points.emplace_back(spec.fixed_q.value_or(rank), p);
      break;
    case SweepParameter::q_and_p:
      for (int q : spec.values)
        for (int p : spec.p_values)
          if (p < q) points.emplace_back(q, p);
      if (points.empty()) throw ArgumentError("q_and_p grid has no point with p < q");
      break;
    case SweepParameter::k:
      break;
  }
  for (const auto& [q, p] : points) {
    if (q > rank)
      throw ArgumentError("q=" + std::to_string(q) + " exceeds min(N, d)=" + std::to_string(rank));
    if (p < 0 || p >= q)
      throw ArgumentError("sweep point q=" + std::to_string(q) + ", p=" + std::to_string(p) +
                          " needs 0 <= p < q");
  }

  const DescriptorSet fit_set = identical ? query : union_of(query, reference);
  const PcaModel base = fit_pca(fit_set, PcaOptions{0, std::nullopt, false});
  for (const auto& [q, p] : points) {
    const TransformModel model = with_window(base, p, q, spec.whiten);
    SweepRow row;
    row.q = q;
    row.p = p;
    row.whiten = spec.whiten;
    rows.push_back(evaluate(row, [&] { return evaluate_pipeline(query, reference, model, gt); }));
  }
  return rows;
}

std::string sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  std::string csv = spec.parameter == SweepParameter::k ? "k,avgp\n" : "q,p,whiten,avgp\n";
  for (const auto& row : rows) {
    if (spec.parameter == SweepParameter::k)
      csv += std::to_string(row.k) + "," + format_double(row.avgp) + "\n";
    else
      csv += std::to_string(row.q) + "," + std::to_string(row.p) + "," + (row.whiten ? "1" : "0") +
             "," + format_double(row.avgp) + "\n";
  }
  return csv;
}

std::size_t model_footprint_bytes(const TransformModel& model) {
  if (const auto* pca = std::get_if<PcaModel>(&model.payload())) {
    const auto d = static_cast<std::size_t>(pca->dim());
    const bool keeps_tail = pca->q == pca->rank();
    const auto stored = static_cast<std::size_t>(keeps_tail ? pca->p : pca->q);
    // header, pre_stats, components, singular values and coefficient scales
    return 29 + 2 * d * 8 + stored * d * 8 + 2 * stored * 8;
  }
  return serialize_model(model).size();
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Condition-invariant descriptor transforms and place-recognition evaluation"};
  app.name("condinv");
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1, 1);

  TransformArgs targs;
  auto* transform = app.add_subcommand("transform", "fit and apply a transform");
  targs.flags.attach(transform);
  transform->add_option("--in", targs.in, "input descriptors")->required();
  transform->add_option("--ref", targs.ref, "reference descriptors (joint fit policy)");
  transform->add_option("--out", targs.out, "output descriptors")->required();
  transform->add_option("--ref-out", targs.ref_out, "output for transformed reference");
  transform->add_option("--model-out", targs.model_out, "write fitted model");
  transform->add_option("--model-in", targs.model_in, "apply a saved model instead of fitting");

  EvalArgs eargs;
  auto* eval = app.add_subcommand("eval", "evaluate average precision");
  eargs.flags.attach(eval);
  eval->add_option("--query", eargs.query)->required();
  eval->add_option("--ref", eargs.ref)->required();
  eval->add_option("--gt", eargs.gt, "ground-truth CSV")->required();
  eval->add_option("--sim-out", eargs.sim_out, "write similarity matrix (PRDM)");
  eval->add_option("--pr-out", eargs.pr_out, "write precision-recall CSV");
  eval->add_option("--metrics-out", eargs.metrics_out, "write metric,value CSV");
  eval->add_option("--model-in", eargs.model_in, "apply a saved model to both sets");
  eval->add_option("--ap-mode", eargs.ap_mode, "pooled|per-query");

  SweepArgs sargs;
  auto* sweep = app.add_subcommand("sweep", "sweep K, q or p");
  sweep->add_option("--param", sargs.param, "k|q|p|q_and_p")->required();
  sweep->add_option("--values", sargs.values, "list a,b,c or range start:stop:step");
  sweep->add_option("--q-values", sargs.q_values, "q list/range for q_and_p");
  sweep->add_option("--p-values", sargs.p_values, "p list/range for q_and_p");
  sweep->add_option("--query", sargs.query)->required();
  sweep->add_option("--ref", sargs.ref, "defaults to --query");
  sweep->add_option("--gt", sargs.gt)->required();
  sweep->add_option("--out", sargs.out, "CSV output")->required();
  sweep->add_option("--k", sargs.k);
  sweep->add_option("--p", sargs.p, "fixed p for q sweeps");
  sargs.q_opt = sweep->add_option("--q", sargs.q, "fixed q for p sweeps (default: full rank)");
  sweep->add_flag("--whiten", sargs.whiten);
  sweep->add_option("--seed", sargs.seed);

  SynthArgs yargs;
  auto* synth = app.add_subcommand("synth", "generate synthetic descriptors");
  synth->add_option("--places", yargs.config.num_places);
  synth->add_option("--dim", yargs.config.dim);
  synth->add_option("--conditions", yargs.config.num_conditions);
  synth->add_option("--drift", yargs.drift, "none|discrete|continuous");
  synth->add_option("--rho", yargs.config.rho, "offset magnitude per sqrt(dim)");
  synth->add_option("--noise", yargs.config.noise_sigma);
  synth->add_option("--steps", yargs.config.steps_per_transition, "sub-steps per transition (continuous)");
  synth->add_option("--anchor-rank", yargs.config.anchor_rank, "confine anchors to a subspace");
  synth->add_option("--seed", yargs.config.seed);
  synth->add_option("--format", yargs.format, "prdm|csv");
  synth->add_option("--out", yargs.out, "output prefix")->required();

  RenderArgs rargs;
  auto* render = app.add_subcommand("render", "render a similarity matrix as PGM/PPM");
  render->add_option("--sim", rargs.sim, "similarity PRDM")->required();
  render->add_option("--out", rargs.out, "image path")->required();
  render->add_option("--format", rargs.format, "pgm|ppm");
  render->add_option("--gt", rargs.gt, "ground truth whose masked pairs are blanked");

  BenchArgs bargs;
  auto* bench = app.add_subcommand("bench", "time learning and inference");
  bargs.flags.attach(bench);
  bench->add_option("--in", bargs.in)->required();
  bench->add_option("--repeat", bargs.repeat);
  bench->add_option("--out", bargs.out, "CSV output");

  try {
    std::vector<std::string> args = expand_config(raw_args);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (transform->parsed()) return cmd_transform(targs, out);
    if (eval->parsed()) return cmd_eval(eargs, out, err);
    if (sweep->parsed()) return cmd_sweep(sargs, out, err);
    if (synth->parsed()) return cmd_synth(yargs, out);
    if (render->parsed()) return cmd_render(rargs, out, err);
    if (bench->parsed()) return cmd_bench(bargs, out);
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  return kExitUsage;
}

}  // namespace condinv::cli
