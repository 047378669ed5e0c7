#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "relaymec/scenario.hpp"

namespace relaymec {

/// Required receive SNR to carry d nats through the AF window:
///   psi(d) = exp(2d / (W (T - Ld/fB))) - 1
double psi(double d, const TaskSpec& task, const SystemParams& params);

/// ln psi(d), computed without forming the exponential.
double log_psi(double d, const TaskSpec& task, const SystemParams& params);

/// One iterate of the inner approximation loop, in log coordinates:
/// q = ln P, s = ln delta (SNR slack), alpha_n = ln beta_n.
struct ScaState {
  double q = 0.0;
  double s = 0.0;
  std::vector<double> alpha;
  int iter = 0;
  double Ybar = 0.0;  // current log-domain objective value
};

/// Strictly feasible launch point: beta_n = 1, transmit power sized so the
/// SNR constraint holds with a small interior margin on both slack splits.
ScaState feasible_start(double d, const ChannelRealization& channels,
                        const TaskSpec& task, const SystemParams& params);

/// One inner-approximation step: linearize the concave-side constraint at
/// the current point, solve the resulting convex program, keep whichever of
/// (new point, old point) has the lower true objective.
ScaState sca_step(const ScaState& state, double d,
                  const ChannelRealization& channels, const TaskSpec& task,
                  const SystemParams& params);

struct ScaResult {
  double Ybar;
  ScaState state;
  std::vector<double> trace;  // Ybar per iteration, nonincreasing
};

/// Iterate sca_step until |Ybar_i - Ybar_{i-1}| < tol_sca (cap 500).
/// `start` overrides the default launch point (used for warm starts).
ScaResult sca_solve(double d, const ChannelRealization& channels,
                    const TaskSpec& task, const SystemParams& params,
                    std::optional<ScaState> start = std::nullopt,
                    int iteration_cap = 500);

/// Memoized evaluation of Xbar(d) = exp(Ybar(d)), the converged inner
/// objective. Evaluations warm-start from a fixed ladder of anchor states so
/// the value is a pure function of d: concurrent callers and any evaluation
/// order produce identical results. Thread-safe.
class XbarEvaluator {
 public:
  XbarEvaluator(const TaskSpec& task, const ChannelRealization& channels,
                const SystemParams& params);

  double value(double d) const;        // Xbar(d); Xbar(0) = 0
  ScaResult result(double d) const;    // converged state and trace at d
  double d_max() const { return d_max_; }

 private:
  struct Entry {
    double xbar;
    ScaResult res;
  };
  const Entry& lookup(double d) const;
  ScaState anchor_state(double d) const;

  TaskSpec task_;
  ChannelRealization channels_;
  SystemParams params_;
  double d_max_;
  static constexpr int kAnchors = 16;

  mutable std::mutex mu_;
  mutable std::map<std::int64_t, Entry> cache_;
  mutable std::map<int, ScaState> anchors_;
};

/// Full AF allocation for one fading block.
struct AfSolution {
  double d = 0.0;                 // offloaded data [nats]
  double t = 0.0;                 // phase duration [s]
  double P = 0.0;                 // mobile transmit power [W]
  std::vector<double> beta;       // relay amplifying coefficients
  double total_energy = 0.0;      // [J]
  std::vector<double> sca_trace;  // inner objective trace at the chosen d
  double poly_gap = 0.0;          // achieved outer optimality gap
  int poly_iterations = 0;
  bool used_grid_fallback = false;
};

/// Problem objective at a given d: t(d) * Xbar(d) + local CPU energy.
double af_upper_objective(double d, const XbarEvaluator& xbar,
                          const TaskSpec& task, const SystemParams& params);

/// Outer search over d via monotonic (polyblock) optimization of the
/// difference-of-increasing decomposition, with the eps_poly gap guarantee.
/// Falls back to grid search (and flags it) if Xbar fails its runtime
/// monotonicity probe.
AfSolution solve_af_polyblock(const TaskSpec& task,
                              const ChannelRealization& channels,
                              const SystemParams& params);

/// Uniform d grid evaluation of the outer objective; validation oracle and
/// fallback. Grid points are independent and evaluated in parallel unless
/// `parallel` is false; both orders give identical results.
AfSolution solve_af_grid(const TaskSpec& task, const ChannelRealization& channels,
                         const SystemParams& params, int steps,
                         bool parallel = true);

}  // namespace relaymec
