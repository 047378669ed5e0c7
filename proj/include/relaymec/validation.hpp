#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "relaymec/scenario.hpp"

namespace relaymec {

/// Axis of a brute-force scan. steps == 1 pins the axis at lo.
struct GridRange {
  double lo = 0.0;
  double hi = 0.0;
  int steps = 1;
  bool log_scale = false;

  double at(int i) const;
};

/// Brute-force search space with an evaluation budget guard.
struct GridSpec {
  std::vector<GridRange> dims;
  std::int64_t budget = 10'000'000;

  std::int64_t total_points() const;
};

struct OracleResult {
  bool found = false;
  double energy = 0.0;
  double d = 0.0;
  std::vector<double> allocation;  // mode-specific point, documented per oracle
  std::int64_t evaluations = 0;
  std::string diagnostic;
};

/// Exhaustive DF scan (N <= 2) over (d, slot fraction, rate split). For each
/// feasible combination the per-relay energies follow by inverting the rate
/// formula, so only scenario-level math is involved. allocation = per-relay
/// energies at the best point. The parallel scan must match the serial one
/// exactly (ties break to the lowest linear index).
OracleResult brute_force_tdma(const TaskSpec& task,
                              const ChannelRealization& channels,
                              const SystemParams& params, const GridSpec& grid,
                              bool parallel = true);

/// Exhaustive AF scan (N == 1) over (d, P, beta); feasibility is the raw rate
/// test t W ln(1 + SNR) >= d. allocation = {P, beta} at the best point.
OracleResult brute_force_af(const TaskSpec& task,
                            const ChannelRealization& channels,
                            const SystemParams& params, const GridSpec& grid,
                            bool parallel = true);

/// Default scan spaces: linear in d, logarithmic in powers/energies.
GridSpec default_tdma_grid(const TaskSpec& task, const SystemParams& params,
                           int d_steps = 300, int slot_steps = 150,
                           int split_steps = 150);
GridSpec default_af_grid(const TaskSpec& task, const ChannelRealization& channels,
                         const SystemParams& params, int d_steps = 60,
                         int power_steps = 300, int beta_steps = 300);
/// Same AF space but with d pinned to a single value.
GridSpec af_grid_at_d(double d, const TaskSpec& task,
                      const ChannelRealization& channels,
                      const SystemParams& params, int power_steps = 400,
                      int beta_steps = 400);

struct ProbeReport {
  bool passed = true;
  double worst_violation = 0.0;  // relative, scale-free
  double worst_x = 0.0;
  std::string detail;
};

/// Flags any adjacent decrease beyond 1e-10 relative on a uniform sample.
ProbeReport probe_monotone(const std::function<double(double)>& f, double lo,
                           double hi, int points);

/// Midpoint convexity on seeded random pairs, slack 1e-12 relative.
ProbeReport probe_midpoint_convex(const std::function<double(double)>& f,
                                  double lo, double hi, int pairs,
                                  std::uint64_t seed = 99);

/// Named probe suites behind the `validate` command. A case failure flips
/// `passed`; `detail_json` carries the per-case report.
struct SuiteReport {
  std::string name;
  bool passed = false;
  int cases = 0;
  int failures = 0;
  std::string detail_json;
};
SuiteReport run_suite(const std::string& name, const Scenario& base);
std::vector<std::string> suite_names();

}  // namespace relaymec
