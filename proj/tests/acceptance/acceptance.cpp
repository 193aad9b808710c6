// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Every tolerance and configuration is pinned here.

#include "condinv/cli.hpp"
#include "condinv/ground_truth.hpp"
#include "condinv/io.hpp"
#include "condinv/lsh.hpp"
#include "condinv/matcheval.hpp"
#include "condinv/pca.hpp"
#include "condinv/standardize.hpp"
#include "condinv/synthgen.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>

using namespace condinv;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

double avgp(const SynthDataset& data, const TransformSpec& spec) {
  const auto& d = data.descriptors;
  return evaluate_pipeline(d, d, spec, data.ground_truth).avg_precision;
}

TransformSpec method(Method m, int k = 1) {
  TransformSpec s;
  s.method = m;
  s.k = k;
  s.seed = 1;
  return s;
}

// 1. Standardization: zero mean, unit std, degenerate columns exactly zero.
Outcome std_contract() {
  constexpr double kTol = 1e-9;
  constexpr double kBudget = 10.0;
  const auto start = Clock::now();
  std::mt19937_64 gen(101);
  std::uniform_int_distribution<int> rows(2, 200);
  std::uniform_int_distribution<int> cols(2, 512);
  double worst = 0.0;
  bool degenerate_ok = true;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rows(gen);
    const int d = cols(gen);
    DescriptorMatrix m = oracle::random_matrix(gen, n, d, std::pow(10.0, trial % 7 - 3));
    m.array() += 0.37 * trial;
    std::vector<bool> constant(static_cast<std::size_t>(d), false);
    for (int j = trial % 5; j < d; j += 17) {
      m.col(j).setConstant(0.1 * (j + 1));
      constant[static_cast<std::size_t>(j)] = true;
    }
    const DescriptorSet set(m);
    const auto out = apply_std(fit_std(set), set).data();
    for (Eigen::Index j = 0; j < d; ++j) {
      if (constant[static_cast<std::size_t>(j)]) {
        degenerate_ok &= (out.col(j).array() == 0.0).all();
        continue;
      }
      worst = std::max(worst, std::abs(oracle::column_mean(out, j)));
      worst = std::max(worst, std::abs(oracle::column_population_std(out, j) - 1.0));
    }
  }
  const double elapsed = seconds_since(start);
  return {worst <= kTol && degenerate_ok && elapsed < kBudget,
          fmt("max deviation %.2e (tol %.0e), degenerate columns zero: %s, %.2f s (< %.0f s)", worst, kTol,
              degenerate_ok ? "yes" : "no", elapsed, kBudget)};
}

// 2. K-STD: K=1 equals STD, objective non-increasing, seeded runs bitwise equal.
Outcome kstd_reductions() {
  constexpr double kTol = 1e-12;
  constexpr double kSlackPerRow = 1e-12;
  std::mt19937_64 gen(202);
  std::uniform_int_distribution<int> rows(10, 300);
  std::uniform_int_distribution<int> cols(2, 128);
  double worst = 0.0;
  int increases = 0;
  int mismatches = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = rows(gen);
    DescriptorMatrix m = oracle::random_matrix(gen, n, cols(gen));
    m.array() += 0.5;
    const DescriptorSet set(m);
    const auto one = apply_kstd(fit_kstd(set, 1, trial), set).data();
    worst = std::max(worst, (one - apply_std(fit_std(set), set).data()).cwiseAbs().maxCoeff());

    const int k = 2 + trial % 9;
    const auto a = fit_kstd(set, k, 1000 + trial);
    const auto b = fit_kstd(set, k, 1000 + trial);
    for (std::size_t i = 1; i < a.objective_history.size(); ++i)
      if (a.objective_history[i] > a.objective_history[i - 1] + kSlackPerRow * n) ++increases;
    if (serialize_model(a) != serialize_model(b) || a.assignments != b.assignments ||
        a.objective_history != b.objective_history)
      ++mismatches;
  }
  return {worst <= kTol && increases == 0 && mismatches == 0,
          fmt("K=1 vs STD max diff %.2e (tol %.0e), objective increases %d, non-identical reruns %d", worst, kTol,
              increases, mismatches)};
}

// 3. Full-window PCA keeps the cosine structure of the standardized input.
Outcome pca_rotation() {
  constexpr double kSimTol = 1e-6;
  constexpr double kOrthoTol = 1e-9;
  std::mt19937_64 gen(303);
  std::uniform_int_distribution<int> size(2, 300);
  double worst_sim = 0.0;
  double worst_ortho = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const DescriptorSet set(oracle::random_matrix(gen, size(gen), size(gen)));
    const auto model = fit_pca(set, PcaOptions{0, std::nullopt, false});
    worst_ortho = std::max(worst_ortho, oracle::gram_identity_error(model.components));
    const auto out = apply_window(model, set);
    const auto standardized = apply_std(model.pre_stats, set.data());
    const auto a = similarity_matrix(out, out).scores;
    const auto b = similarity_matrix(standardized, standardized).scores;
    // Rows whose standardized form is zero are undefined on both sides.
    for (Eigen::Index i = 0; i < a.rows(); ++i)
      for (Eigen::Index j = 0; j < a.cols(); ++j) {
        if (std::isnan(a(i, j)) != std::isnan(b(i, j))) worst_sim = 1.0;
        if (!std::isnan(a(i, j))) worst_sim = std::max(worst_sim, std::abs(a(i, j) - b(i, j)));
      }
  }
  return {worst_sim <= kSimTol && worst_ortho <= kOrthoTol,
          fmt("max similarity diff %.2e (tol %.0e), max |V^T V - I| %.2e (tol %.0e)", worst_sim, kSimTol, worst_ortho,
              kOrthoTol)};
}

// 4. Whitened coefficients have unit population std over the fit set.
Outcome whitening() {
  constexpr double kTol = 1e-6;
  constexpr double kDegenerate = 1e-12;
  std::mt19937_64 gen(404);
  std::uniform_int_distribution<int> size(3, 200);
  double worst = 0.0;
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    DescriptorMatrix m = oracle::random_matrix(gen, size(gen), size(gen));
    m.col(0) *= 50.0;
    const DescriptorSet set(m);
    const auto base = fit_pca(set, PcaOptions{0, std::nullopt, false});
    const int p = trial % 3;
    const int q = std::max(p + 1, base.rank() - trial % 4);
    const auto model = with_window(base, p, q, true);
    const auto out = apply_window(model, set).data();
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
      if (model.coeff_std(p + j) < kDegenerate) continue;
      worst = std::max(worst, std::abs(oracle::column_population_std(out, j) - 1.0));
      ++checked;
    }
  }
  return {worst <= kTol && checked > 0,
          fmt("max |std - 1| %.2e over %d coefficients (tol %.0e)", worst, checked, kTol)};
}

// 5. Average precision equals an exhaustive-ranking oracle.
Outcome ap_oracle() {
  constexpr double kTol = 1e-12;
  std::mt19937_64 gen(505);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> level(0, 9);
  double worst = 0.0;
  int evaluated = 0;
  for (int trial = 0; trial < 100; ++trial) {
    DescriptorMatrix s(20, 20);
    for (Eigen::Index i = 0; i < 20; ++i)
      for (Eigen::Index j = 0; j < 20; ++j) s(i, j) = trial % 2 ? level(gen) / 9.0 : u(gen);
    GroundTruth gt;
    gt.num_queries = gt.num_references = 20;
    std::vector<std::vector<int>> labels(20, std::vector<int>(20, 0));
    for (std::uint32_t i = 0; i < 20; ++i)
      for (std::uint32_t j = 0; j < 20; ++j) {
        const double x = u(gen);
        if (x < 0.1) {
          gt.positives.emplace_back(i, j);
          labels[i][j] = 1;
        } else if (x < 0.25) {
          gt.mask.emplace_back(i, j);
          labels[i][j] = -1;
        }
      }
    if (gt.positives.empty()) {
      gt.positives.emplace_back(0, 1);
      labels[0][1] = 1;
      std::erase(gt.mask, IndexPair{0, 1});
    }
    const double expected = oracle::exhaustive_ap(s, labels);
    const double got = average_precision(similarity_from_scores(s, &gt), gt).avg_precision;
    worst = std::max(worst, std::abs(got - expected));
    ++evaluated;
  }
  return {worst <= kTol, fmt("%d instances, max |AP - oracle| %.2e (tol %.0e)", evaluated, worst, kTol)};
}

SynthConfig base_config() {
  SynthConfig c;
  c.num_places = 200;
  c.dim = 128;
  c.num_conditions = 4;
  c.drift = Drift::discrete;
  c.rho = 3.0;
  c.noise_sigma = 0.1;
  c.seed = 1;
  return c;
}

// 6. Discrete conditions: K-STD clearly beats STD, STD no worse than raw.
Outcome discrete_conditions() {
  constexpr double kGain = 0.2;
  constexpr double kSlack = 0.02;
  constexpr double kOffsetRatio = 2.0;
  constexpr double kBudget = 60.0;
  const auto start = Clock::now();
  const auto data = generate(base_config());

  // Offset separation vs place spread, measured on the generated data.
  const auto& m = data.descriptors.data();
  double place = 0.0;
  int place_pairs = 0;
  for (int i = 0; i < 200; ++i)
    for (int j = i + 1; j < 200; ++j, ++place_pairs) place += (m.row(i) - m.row(j)).norm();
  double offset = 0.0;
  int offset_pairs = 0;
  for (std::size_t a = 0; a < data.anchors.size(); ++a)
    for (std::size_t b = a + 1; b < data.anchors.size(); ++b, ++offset_pairs)
      offset += (data.anchors[a] - data.anchors[b]).norm();
  const double ratio = (offset / offset_pairs) / (place / place_pairs);

  const double raw = avgp(data, method(Method::identity));
  const double std_ap = avgp(data, method(Method::std));
  const double kstd = avgp(data, method(Method::kstd, 4));
  const double elapsed = seconds_since(start);
  return {kstd >= std_ap + kGain && std_ap >= raw - kSlack && ratio >= kOffsetRatio && elapsed < kBudget,
          fmt("raw %.4f, STD %.4f, K-STD(4) %.4f (need K-STD >= STD + %.2f, STD >= raw - %.2f), "
              "offset/place spread %.2f (>= %.1f), %.1f s",
              raw, std_ap, kstd, kGain, kSlack, ratio, kOffsetRatio, elapsed)};
}

// 7. Rank-3 condition subspace: removing 3 leading components recovers places.
Outcome change_removal() {
  constexpr double kCrFloor = 0.9;
  constexpr double kRawCeiling = 0.6;
  constexpr double kJump = 0.3;
  auto config = base_config();
  config.anchor_rank = 3;
  const auto data = generate(config);
  const auto& d = data.descriptors;

  cli::SweepSpec spec;
  spec.parameter = cli::SweepParameter::p;
  spec.values = {0, 1, 2, 3, 4, 5, 6};
  const auto rows = cli::run_sweep(spec, d, d, data.ground_truth);
  const auto dir = fs::temp_directory_path() / "condinv_acceptance";
  fs::create_directories(dir);
  const std::string csv = cli::sweep_csv(spec, rows);
  std::ofstream(dir / "p_sweep.csv") << csv;

  const double raw = avgp(data, method(Method::identity));
  double below = 0.0;
  for (int p = 0; p < 3; ++p) below = std::max(below, rows[static_cast<std::size_t>(p)].avgp);
  const double at3 = rows[3].avgp;
  std::string curve;
  for (const auto& r : rows) curve += fmt("%s%d:%.3f", curve.empty() ? "" : " ", r.p, r.avgp);
  return {at3 >= kCrFloor && raw <= kRawCeiling && below <= at3 - kJump,
          fmt("raw %.4f (<= %.1f), CR p=3 %.4f (>= %.1f), best p<3 %.4f (<= p3 - %.1f); p-sweep [%s]", raw,
              kRawCeiling, at3, kCrFloor, below, kJump, curve.c_str())};
}

// 8. Continuous drift: global STD gains little, K-STD with many clusters recovers.
Outcome continuous_drift() {
  constexpr double kStdGainCeiling = 0.1;
  constexpr double kKstdGain = 0.15;
  auto config = base_config();
  config.num_places = 20;
  config.drift = Drift::continuous;
  config.steps_per_transition = 50;
  const auto data = generate(config);
  const double raw = avgp(data, method(Method::identity));
  const double std_ap = avgp(data, method(Method::std));
  const double kstd = avgp(data, method(Method::kstd, 20));
  return {std_ap - raw <= kStdGainCeiling && kstd >= std_ap + kKstdGain,
          fmt("%lld descriptors: raw %.4f, STD %.4f (STD - raw <= %.2f), K-STD(20) %.4f (>= STD + %.2f)",
              static_cast<long long>(data.descriptors.rows()), raw, std_ap, kStdGainCeiling, kstd, kKstdGain)};
}

// 9. Random projection preserves angles on average.
Outcome lsh_angles() {
  constexpr double kTol = 0.08;
  const auto proj = make_projection(1024, 256, 42);
  std::mt19937_64 gen(909);
  double total = 0.0;
  for (int k = 0; k < 100; ++k) {
    DescriptorMatrix pair = oracle::random_matrix(gen, 2, 1024);
    const double t = static_cast<double>(k) / 100.0;
    pair.row(1) = t * pair.row(0) + (1.0 - t) * pair.row(1);
    pair.row(0).normalize();
    pair.row(1).normalize();
    const auto out = apply_projection(proj, pair);
    total += std::abs(oracle::cosine(pair, 0, pair, 1) - oracle::cosine(out, 0, out, 1));
  }
  const double mean = total / 100.0;
  return {mean <= kTol, fmt("mean |dcos| %.4f over 100 pairs (<= %.2f)", mean, kTol)};
}

// 10. Every command is byte-reproducible; PRDM round trips losslessly.
Outcome determinism() {
  const auto root = fs::temp_directory_path() / "condinv_acceptance_det";
  fs::remove_all(root);
  std::vector<std::string> compared;
  std::string failures;

  auto run_all = [&](const fs::path& dir) {
    fs::create_directories(dir);
    const auto s = (dir / "s").string();
    auto call = [&](std::vector<std::string> args) {
      std::ostringstream out;
      std::ostringstream err;
      const int code = cli::run(args, out, err);
      if (code != 0) failures += " [" + args[0] + " exit " + std::to_string(code) + ": " + err.str() + "]";
      return out.str();
    };
    std::string stdout_text;
    stdout_text += call({"synth", "--places", "50", "--dim", "32", "--conditions", "3", "--seed", "5", "--out", s});
    stdout_text += call({"synth", "--places", "6", "--dim", "5", "--conditions", "2", "--drift", "continuous",
                         "--steps", "3", "--format", "csv", "--out", (dir / "c").string()});
    const std::vector<std::vector<std::string>> methods{
        {"--method", "identity"},       {"--method", "std"},
        {"--method", "kstd", "--k", "5", "--seed", "3"}, {"--method", "dr", "--q", "10"},
        {"--method", "cr", "--p", "2", "--whiten"},      {"--method", "drcr", "--p", "2", "--q", "12"},
        {"--method", "lsh", "--lsh-dim", "16", "--seed", "9"}};
    for (std::size_t i = 0; i < methods.size(); ++i) {
      const auto tag = std::to_string(i);
      std::vector<std::string> t{"transform", "--in", s + ".prdm", "--out", (dir / ("t" + tag + ".prdm")).string(),
                                 "--model-out", (dir / ("m" + tag + ".bin")).string()};
      t.insert(t.end(), methods[i].begin(), methods[i].end());
      stdout_text += call(t);
      std::vector<std::string> e{"eval",      "--query", s + ".prdm", "--ref", s + ".prdm", "--gt", s + ".gt.csv",
                                 "--sim-out", (dir / ("sim" + tag + ".prdm")).string(),
                                 "--pr-out",  (dir / ("pr" + tag + ".csv")).string(),
                                 "--metrics-out", (dir / ("metrics" + tag + ".csv")).string()};
      e.insert(e.end(), methods[i].begin(), methods[i].end());
      stdout_text += call(e);
    }
    stdout_text += call({"transform", "--model-in", (dir / "m2.bin").string(), "--in", s + ".prdm", "--out",
                         (dir / "reapplied.prdm").string()});
    stdout_text += call({"sweep", "--param", "k", "--values", "1,2,3", "--query", s + ".prdm", "--gt", s + ".gt.csv",
                         "--out", (dir / "k.csv").string(), "--seed", "2"});
    stdout_text += call({"sweep", "--param", "q_and_p", "--q-values", "8,16", "--p-values", "0,1,2", "--query",
                         s + ".prdm", "--gt", s + ".gt.csv", "--out", (dir / "qp.csv").string(), "--whiten"});
    stdout_text += call({"render", "--sim", (dir / "sim2.prdm").string(), "--out", (dir / "r.pgm").string()});
    stdout_text += call({"render", "--sim", (dir / "sim2.prdm").string(), "--gt", s + ".gt.csv", "--format", "ppm",
                         "--out", (dir / "r.ppm").string()});
    std::ofstream(dir / "stdout.txt") << stdout_text;
  };
  run_all(root / "a");
  run_all(root / "b");

  int differing = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    const auto name = entry.path().filename();
    const auto a = oracle::file_bytes(entry.path());
    if (name == "stdout.txt") {
      // Paths differ between the two runs; compare after removing them.
      auto strip = [&](const fs::path& p, const fs::path& dir) {
        const auto bytes = oracle::file_bytes(p);
        std::string t(bytes.begin(), bytes.end());
        const std::string d = dir.string();
        for (auto pos = t.find(d); pos != std::string::npos; pos = t.find(d)) t.erase(pos, d.size());
        return t;
      };
      if (strip(entry.path(), root / "a") != strip(root / "b" / name, root / "b")) ++differing;
      compared.push_back(name.string());
      continue;
    }
    if (a != oracle::file_bytes(root / "b" / name)) {
      ++differing;
      failures += " differs:" + name.string();
    }
    compared.push_back(name.string());
  }

  // PRDM round trip on random sets, both dtypes.
  std::mt19937_64 gen(1010);
  int lossy = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const DescriptorMatrix m = oracle::random_matrix(gen, 1 + trial, 1 + 3 * trial, std::pow(10.0, trial - 10));
    save_descriptors(DescriptorSet(m), root / "rt.prdm");
    const auto back = load_descriptors(root / "rt.prdm").data();
    if (std::memcmp(back.data(), m.data(), sizeof(double) * static_cast<std::size_t>(m.size())) != 0) ++lossy;
    const DescriptorMatrix f = m.cast<float>().cast<double>();
    save_descriptors(DescriptorSet(f), root / "rt32.prdm", DescriptorFormat::prdm, PrdmDtype::f32);
    if (load_descriptors(root / "rt32.prdm").data() != f) ++lossy;
  }
  return {differing == 0 && lossy == 0 && failures.empty() && compared.size() > 40,
          fmt("%zu output files compared, %d differing, %d lossy PRDM round trips%s", compared.size(), differing,
              lossy, failures.c_str())};
}

// 11. K-STD learning time at full descriptor scale.
Outcome bench_sanity() {
  constexpr double kBudget = 60.0;
  auto config = base_config();
  config.num_places = 3338;  // 4 x 3338 = 13352 descriptors
  config.dim = 4096;
  const auto data = generate(config);
  const auto start = Clock::now();
  const auto model = fit_kstd(data.descriptors, 20, 1);
  const double elapsed = seconds_since(start);
  return {elapsed < kBudget && model.k() == 20,
          fmt("%lldx%lld, K=20: %.2f s over %d iterations (< %.0f s)",
              static_cast<long long>(data.descriptors.rows()), static_cast<long long>(data.descriptors.dim()), elapsed,
              model.iterations_run, kBudget)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 standardization contract", std_contract},
      {"2 k-std reductions and determinism", kstd_reductions},
      {"3 pca rotation invariance", pca_rotation},
      {"4 whitening contract", whitening},
      {"5 average precision oracle", ap_oracle},
      {"6 discrete conditions ordering", discrete_conditions},
      {"7 change removal on rank-3 offsets", change_removal},
      {"8 continuous drift", continuous_drift},
      {"9 projection angle preservation", lsh_angles},
      {"10 determinism and formats", determinism},
      {"11 k-std learning time", bench_sanity},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(), outcome.detail.c_str());
    std::fflush(stdout);
    failed += outcome.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
