#include "relaymec/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "relaymec/errors.hpp"
#include "relaymec/kernel.hpp"

namespace relaymec {

EqualAllocLower equal_alloc_lower(double d, const ChannelRealization& channels,
                                  const TaskSpec& task, const SystemParams& params) {
  const int N = channels.relay_count();
  EqualAllocLower out{0.0, std::vector<double>(N, 0.0), 0.0};
  if (d <= 0.0) return out;

  const double window = offload_time_budget(task, params, d);
  if (!(window > 0.0))
    throw NumericError("equal_alloc_lower: empty offload window");
  const double slot = 0.5 * window / N;
  const double noise = params.sigma2 * params.W;

  // lambda thresholds: relay n carries data only once
  // lambda > sigma2 (1 + h_n/g_n) / h_n.
  std::vector<double> threshold(N);
  std::vector<double> cost(N);
  for (int n = 0; n < N; ++n) {
    cost[n] = 1.0 + channels.h[n] / channels.g[n];
    threshold[n] = params.sigma2 * cost[n] / channels.h[n];
  }

  auto rate_at = [&](double lambda) {
    double rate = 0.0;
    for (int n = 0; n < N; ++n)
      if (lambda > threshold[n])
        rate += slot * params.W * std::log(lambda / threshold[n]);
    return rate;
  };

  double lo = *std::min_element(threshold.begin(), threshold.end());
  double hi = 2.0 * lo;
  int doublings = 0;
  while (rate_at(hi) < d) {
    hi *= 2.0;
    if (++doublings > 400)
      throw NumericError("equal_alloc_lower: failed to bracket the multiplier");
  }
  for (int it = 0; it < 200 && (hi - lo) > 1.0e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (rate_at(mid) < d)
      lo = mid;
    else
      hi = mid;
  }
  const double lambda = hi;  // feasible side of the bracket

  out.lambda = lambda;
  for (int n = 0; n < N; ++n) {
    if (lambda > threshold[n]) {
      const double snr = lambda / threshold[n] - 1.0;
      out.E[n] = slot * noise * snr / channels.h[n];
      out.energy += out.E[n] * cost[n];
    }
  }
  return out;
}

namespace {
// Once the sampled objective has turned upward it must not come back down;
// anything else sends the outer search to a plain grid scan.
bool looks_unimodal(const std::vector<double>& v) {
  bool rising = false;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double tol = 1.0e-12 * (1.0 + std::abs(v[i - 1]));
    if (v[i] > v[i - 1] + tol) rising = true;
    else if (rising && v[i] < v[i - 1] - tol) return false;
  }
  return true;
}
}  // namespace

EqualAllocSolution solve_equal_alloc(const TaskSpec& task,
                                     const ChannelRealization& channels,
                                     const SystemParams& params) {
  task.check();
  params.check();
  channels.check();
  const DRange dr = d_domain(task, params);
  const int N = channels.relay_count();

  EqualAllocSolution sol;
  sol.E.assign(N, 0.0);
  if (!(dr.hi > 0.0)) {
    sol.total_energy = local_energy(task, params, 0.0);
    return sol;
  }

  auto objective = [&](double d) {
    return equal_alloc_lower(d, channels, task, params).energy +
           local_energy(task, params, d);
  };

  constexpr int kProbePoints = 33;
  std::vector<double> samples(kProbePoints);
  for (int i = 0; i < kProbePoints; ++i)
    samples[i] = objective(dr.hi * i / (kProbePoints - 1));

  double best_d;
  int evals = kProbePoints;
  if (looks_unimodal(samples)) {
    const ScalarMinimum m =
        golden_search({objective, dr.lo, dr.hi, params.tol_golden});
    best_d = m.x;
    evals += m.evaluations;
    double best_val = m.value;
    for (double cand : {dr.lo, dr.hi}) {
      const double v = objective(cand);
      ++evals;
      if (v < best_val) {
        best_val = v;
        best_d = cand;
      }
    }
  } else {
    constexpr int kGridSteps = 512;
    best_d = 0.0;
    double best_val = std::numeric_limits<double>::infinity();
    for (int i = 0; i < kGridSteps; ++i) {
      const double d = dr.hi * i / (kGridSteps - 1);
      const double v = objective(d);
      if (v < best_val) {
        best_val = v;
        best_d = d;
      }
    }
    evals += kGridSteps;
    sol.used_grid_fallback = true;
  }

  const EqualAllocLower lower = equal_alloc_lower(best_d, channels, task, params);
  sol.d = best_d;
  sol.E = lower.E;
  sol.lambda = lower.lambda;
  sol.slot = best_d > 0.0
                 ? 0.5 * offload_time_budget(task, params, best_d) / N
                 : 0.0;
  sol.total_energy = lower.energy + local_energy(task, params, best_d);
  sol.evaluations = evals;
  return sol;
}

}  // namespace relaymec
