#pragma once

#include "condinv/transform.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace condinv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Runs one subcommand. `args` excludes the program name.
/// Exit codes: 0 success, 1 data/model error, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

enum class SweepParameter { k, q, p, q_and_p };

struct SweepSpec {
  SweepParameter parameter = SweepParameter::k;
  std::vector<int> values;    // k, q or p values
  std::vector<int> p_values;  // q_and_p only; `values` then holds q
  int fixed_k = 1;
  int fixed_p = 0;
  std::optional<int> fixed_q;
  bool whiten = false;
  std::uint64_t seed = 0;
};

struct SweepRow {
  int k = 0;
  int q = 0;
  int p = 0;
  bool whiten = false;
  double avgp = 0.0;
  bool degenerate = false;
};

/// Parses "1,2,4" or "start:stop:step" (stop inclusive).
std::vector<int> parse_values(const std::string& text);

/// Evaluates every point; degenerate points record avgp 0 and are flagged.
/// Throws ArgumentError when a point violates its transform's bounds.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const DescriptorSet& query,
                                const DescriptorSet& reference, const GroundTruth& gt);

std::string sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows);

/// Bytes needed to store what inference uses. PCA windows that keep every
/// trailing component only need the p removed ones (residual form).
std::size_t model_footprint_bytes(const TransformModel& model);

}  // namespace condinv::cli
