#include "relaymec/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <omp.h>

#include "json.hpp"
#include "relaymec/af.hpp"
#include "relaymec/errors.hpp"
#include "relaymec/fdma.hpp"
#include "relaymec/tdma.hpp"

namespace relaymec {

double GridRange::at(int i) const {
  if (steps <= 1) return lo;
  if (log_scale) {
    if (!(lo > 0.0) || !(hi > 0.0))
      throw DomainError("GridRange: log axes need positive bounds");
    return lo * std::pow(hi / lo, static_cast<double>(i) / (steps - 1));
  }
  return lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
}

std::int64_t GridSpec::total_points() const {
  std::int64_t total = 1;
  for (const auto& r : dims) total *= std::max(1, r.steps);
  return total;
}

namespace {

void check_budget(const GridSpec& grid) {
  if (grid.total_points() > grid.budget) {
    std::ostringstream msg;
    msg << "grid of " << grid.total_points() << " points exceeds budget "
        << grid.budget;
    throw DomainError(msg.str());
  }
}

// Energy needed for one relay to push `rate` nats in time `slot`, inverted
// from rate = slot W ln(1 + E h / (slot sigma2 W)). Exponent clamped; the
// clamp region carries absurd energies that never win the scan.
double energy_for_rate(double rate, double slot, double h,
                       const SystemParams& params) {
  if (rate <= 0.0) return 0.0;
  if (slot <= 0.0) return std::numeric_limits<double>::infinity();
  const double z = std::min(rate / (slot * params.W), 700.0);
  return slot * params.sigma2 * params.W * std::expm1(z) / h;
}

struct ScanBest {
  double value = std::numeric_limits<double>::infinity();
  std::int64_t index = -1;
};

// Exhaustive scan with a deterministic reduction: the winner is the lowest
// value, ties broken by lowest linear index, so parallel == serial.
template <typename Eval>
ScanBest scan(std::int64_t total, bool parallel, Eval&& eval) {
  ScanBest best;
  if (parallel) {
#pragma omp parallel
    {
      ScanBest local;
#pragma omp for nowait schedule(static)
      for (std::int64_t i = 0; i < total; ++i) {
        const double v = eval(i);
        if (v < local.value || (v == local.value && i < local.index)) {
          local.value = v;
          local.index = i;
        }
      }
#pragma omp critical
      {
        if (local.value < best.value ||
            (local.value == best.value && local.index != -1 &&
             (best.index == -1 || local.index < best.index)))
          best = local;
      }
    }
  } else {
    for (std::int64_t i = 0; i < total; ++i) {
      const double v = eval(i);
      if (v < best.value) {
        best.value = v;
        best.index = i;
      }
    }
  }
  return best;
}

}  // namespace

OracleResult brute_force_tdma(const TaskSpec& task,
                              const ChannelRealization& channels,
                              const SystemParams& params, const GridSpec& grid,
                              bool parallel) {
  if (channels.relay_count() > 2)
    throw DomainError("brute_force_tdma: only N <= 2 is supported");
  if (grid.dims.size() != 3)
    throw DomainError("brute_force_tdma: expects (d, slot fraction, rate split) axes");
  check_budget(grid);
  task.check();
  params.check();
  channels.check();

  const int n_relays = channels.relay_count();
  const GridRange& dr = grid.dims[0];
  const GridRange& fr = grid.dims[1];
  const GridRange& sr = grid.dims[2];
  const std::int64_t total = grid.total_points();

  auto objective = [&](std::int64_t idx) {
    const int is = static_cast<int>(idx % std::max(1, sr.steps));
    const int ifr = static_cast<int>((idx / std::max(1, sr.steps)) % std::max(1, fr.steps));
    const int id = static_cast<int>(idx / (std::max(1, sr.steps) *
                                           static_cast<std::int64_t>(std::max(1, fr.steps))));
    const double d = dr.at(id);
    if (d == 0.0) return local_energy(task, params, 0.0);

    const double window = task.T - task.L * d / params.fB;
    if (!(window > 0.0)) return std::numeric_limits<double>::infinity();
    const double half = 0.5 * window;

    const double frac = fr.at(ifr);
    const double split = n_relays == 1 ? 1.0 : sr.at(is);
    const double t1 = half * (n_relays == 1 ? 1.0 : frac);
    const double t2 = half - t1;
    const double rate1 = d * split;
    const double rate2 = d - rate1;
    if ((rate1 > 0.0 && t1 <= 0.0) || (rate2 > 0.0 && t2 <= 0.0))
      return std::numeric_limits<double>::infinity();

    double cost = local_energy(task, params, d);
    cost += energy_for_rate(rate1, t1, channels.h[0], params) *
            (1.0 + channels.h[0] / channels.g[0]);
    if (n_relays == 2)
      cost += energy_for_rate(rate2, t2, channels.h[1], params) *
              (1.0 + channels.h[1] / channels.g[1]);
    else if (rate2 > 0.0)
      return std::numeric_limits<double>::infinity();
    return cost;
  };

  const ScanBest best = scan(total, parallel, objective);
  OracleResult out;
  out.evaluations = total;
  if (best.index < 0 || !std::isfinite(best.value)) {
    out.diagnostic = "no feasible grid point";
    return out;
  }
  out.found = true;
  out.energy = best.value;

  const int is = static_cast<int>(best.index % std::max(1, sr.steps));
  const int ifr = static_cast<int>((best.index / std::max(1, sr.steps)) % std::max(1, fr.steps));
  const int id = static_cast<int>(best.index / (std::max(1, sr.steps) *
                                                static_cast<std::int64_t>(std::max(1, fr.steps))));
  out.d = dr.at(id);
  const double window = task.T - task.L * out.d / params.fB;
  const double half = 0.5 * std::max(window, 0.0);
  const double frac = fr.at(ifr);
  const double split = n_relays == 1 ? 1.0 : sr.at(is);
  const double t1 = half * (n_relays == 1 ? 1.0 : frac);
  out.allocation.assign(n_relays, 0.0);
  if (out.d > 0.0) {
    out.allocation[0] = energy_for_rate(out.d * split, t1, channels.h[0], params);
    if (n_relays == 2)
      out.allocation[1] =
          energy_for_rate(out.d - out.d * split, half - t1, channels.h[1], params);
  }
  return out;
}

OracleResult brute_force_af(const TaskSpec& task,
                            const ChannelRealization& channels,
                            const SystemParams& params, const GridSpec& grid,
                            bool parallel) {
  if (channels.relay_count() != 1)
    throw DomainError("brute_force_af: only N == 1 is supported");
  if (grid.dims.size() != 3)
    throw DomainError("brute_force_af: expects (d, P, beta) axes");
  check_budget(grid);
  task.check();
  params.check();
  channels.check();

  const GridRange& dr = grid.dims[0];
  const GridRange& pr = grid.dims[1];
  const GridRange& br = grid.dims[2];
  const std::int64_t total = grid.total_points();
  const double h = channels.h[0];
  const double g = channels.g[0];
  const double noise = params.sigma2 * params.W;

  auto objective = [&](std::int64_t idx) {
    const int ib = static_cast<int>(idx % std::max(1, br.steps));
    const int ip = static_cast<int>((idx / std::max(1, br.steps)) % std::max(1, pr.steps));
    const int id = static_cast<int>(idx / (std::max(1, br.steps) *
                                           static_cast<std::int64_t>(std::max(1, pr.steps))));
    const double d = dr.at(id);
    if (d == 0.0) return local_energy(task, params, 0.0);

    const double window = task.T - task.L * d / params.fB;
    if (!(window > 0.0)) return std::numeric_limits<double>::infinity();
    const double t = 0.5 * window;

    const double P = pr.at(ip);
    const double beta = br.at(ib);
    const double snr = P * h * g * beta * beta / (noise * (1.0 + g * beta * beta));
    if (t * params.W * std::log1p(snr) < d)
      return std::numeric_limits<double>::infinity();
    return t * (P + beta * beta * (P * h + noise)) + local_energy(task, params, d);
  };

  const ScanBest best = scan(total, parallel, objective);
  OracleResult out;
  out.evaluations = total;
  if (best.index < 0 || !std::isfinite(best.value)) {
    std::ostringstream msg;
    msg << "no feasible grid point (every SNR below the rate requirement) in "
        << total << " evaluations";
    out.diagnostic = msg.str();
    return out;
  }
  out.found = true;
  out.energy = best.value;
  const int ib = static_cast<int>(best.index % std::max(1, br.steps));
  const int ip = static_cast<int>((best.index / std::max(1, br.steps)) % std::max(1, pr.steps));
  const int id = static_cast<int>(best.index / (std::max(1, br.steps) *
                                                static_cast<std::int64_t>(std::max(1, pr.steps))));
  out.d = dr.at(id);
  out.allocation = {out.d > 0.0 ? pr.at(ip) : 0.0, out.d > 0.0 ? br.at(ib) : 0.0};
  return out;
}

GridSpec default_tdma_grid(const TaskSpec& task, const SystemParams& params,
                           int d_steps, int slot_steps, int split_steps) {
  const DRange dd = d_domain(task, params);
  GridSpec grid;
  grid.dims = {
      {0.0, dd.hi, d_steps, false},
      {0.0, 1.0, slot_steps, false},
      {0.0, 1.0, split_steps, false},
  };
  return grid;
}

GridSpec default_af_grid(const TaskSpec& task, const ChannelRealization& channels,
                         const SystemParams& params, int d_steps,
                         int power_steps, int beta_steps) {
  const DRange dd = d_domain(task, params);
  // Power pivot: the transmit level that meets the SNR requirement at
  // d_max with beta = 1; the optimum sits well within two decades of it.
  const double h = channels.h[0];
  const double g = channels.g[0];
  const double pivot = params.sigma2 * params.W * (1.0 + g) *
                       psi(dd.hi, task, params) / (h * g);
  GridSpec grid;
  grid.dims = {
      {0.0, dd.hi, d_steps, false},
      {pivot * 1.0e-4, pivot * 1.0e2, power_steps, true},
      {1.0e-2, 1.0e2, beta_steps, true},
  };
  return grid;
}

GridSpec af_grid_at_d(double d, const TaskSpec& task,
                      const ChannelRealization& channels,
                      const SystemParams& params, int power_steps,
                      int beta_steps) {
  const double h = channels.h[0];
  const double g = channels.g[0];
  const double pivot =
      params.sigma2 * params.W * (1.0 + g) * psi(d, task, params) / (h * g);
  GridSpec grid;
  grid.dims = {
      {d, d, 1, false},
      {pivot * 1.0e-4, pivot * 1.0e2, power_steps, true},
      {1.0e-2, 1.0e2, beta_steps, true},
  };
  return grid;
}

ProbeReport probe_monotone(const std::function<double(double)>& f, double lo,
                           double hi, int points) {
  if (points < 2) throw DomainError("probe_monotone: need >= 2 points");
  ProbeReport rep;
  double prev = f(lo);
  for (int i = 1; i < points; ++i) {
    const double x = lo + (hi - lo) * i / (points - 1);
    const double v = f(x);
    const double drop = (prev - v) / (1.0 + std::abs(prev));
    if (drop > rep.worst_violation) {
      rep.worst_violation = drop;
      rep.worst_x = x;
    }
    prev = v;
  }
  rep.passed = rep.worst_violation <= 1.0e-10;
  if (!rep.passed) {
    std::ostringstream msg;
    msg << "decrease of " << rep.worst_violation << " at x = " << rep.worst_x;
    rep.detail = msg.str();
  }
  return rep;
}

ProbeReport probe_midpoint_convex(const std::function<double(double)>& f,
                                  double lo, double hi, int pairs,
                                  std::uint64_t seed) {
  if (pairs < 1) throw DomainError("probe_midpoint_convex: need >= 1 pair");
  ProbeReport rep;
  SplitMix64 rng(seed);
  for (int i = 0; i < pairs; ++i) {
    const double a = rng.next_uniform(lo, hi);
    const double b = rng.next_uniform(lo, hi);
    const double mid = 0.5 * (a + b);
    const double bound = 0.5 * (f(a) + f(b));
    const double excess = (f(mid) - bound) / (1.0 + std::abs(bound));
    if (excess > rep.worst_violation) {
      rep.worst_violation = excess;
      rep.worst_x = mid;
    }
  }
  rep.passed = rep.worst_violation <= 1.0e-12;
  if (!rep.passed) {
    std::ostringstream msg;
    msg << "midpoint excess of " << rep.worst_violation << " at x = " << rep.worst_x;
    rep.detail = msg.str();
  }
  return rep;
}

namespace {
using nlohmann::json;

Scenario scenario_for(const Scenario& base, std::uint64_t seed, int n_relays) {
  Scenario sc = base;
  sc.seed = seed;
  sc.n_relays = n_relays;
  sc.explicit_channels = false;
  sc.channels = sample_channels(seed, n_relays, sc.dist_min_km, sc.dist_max_km,
                                sc.params);
  return sc;
}

SuiteReport finish(const std::string& name, int cases, int failures, json detail) {
  SuiteReport rep;
  rep.name = name;
  rep.cases = cases;
  rep.failures = failures;
  rep.passed = failures == 0;
  detail["suite"] = name;
  detail["cases"] = cases;
  detail["failures"] = failures;
  detail["passed"] = rep.passed;
  rep.detail_json = detail.dump();
  return rep;
}

SuiteReport suite_kkt(const Scenario& base) {
  json cases = json::array();
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Scenario sc = scenario_for(base, seed, 1 + static_cast<int>((seed - 1) % 8));
    const TdmaSolution sol = solve_tdma(sc.task, sc.channels, sc.params);
    const KktResidualsTdma kkt =
        kkt_residuals_tdma(sol, sc.task, sc.params, sc.channels);
    const double res = kkt.max_residual();
    const bool ok = res <= 1.0e-6;
    if (!ok) ++failures;
    cases.push_back({{"seed", seed}, {"max_residual", res}, {"ok", ok}});
  }
  return finish("kkt", 100, failures, {{"cases", cases}});
}

SuiteReport suite_sca_descent(const Scenario& base) {
  json cases = json::array();
  int failures = 0;
  SplitMix64 rng(2024);
  for (int i = 0; i < 20; ++i) {
    const std::uint64_t seed = 1 + i;
    const Scenario sc = scenario_for(base, seed, 1 + i % 4);
    const DRange dd = d_domain(sc.task, sc.params);
    const double d = dd.hi * rng.next_uniform(0.05, 0.95);
    bool ok = true;
    std::string why;
    try {
      const ScaResult res = sca_solve(d, sc.channels, sc.task, sc.params,
                                      std::nullopt, 200);
      for (std::size_t k = 1; k < res.trace.size(); ++k) {
        if (res.trace[k] > res.trace[k - 1] + 1.0e-12) {
          ok = false;
          why = "trace increased";
          break;
        }
      }
      const std::size_t m = res.trace.size();
      if (ok && m >= 2 &&
          std::abs(res.trace[m - 1] - res.trace[m - 2]) >= sc.params.tol_sca) {
        ok = false;
        why = "did not converge";
      }
    } catch (const std::exception& e) {
      ok = false;
      why = e.what();
    }
    if (!ok) ++failures;
    cases.push_back({{"seed", seed}, {"d", d}, {"ok", ok}, {"why", why}});
  }
  return finish("sca-descent", 20, failures, {{"cases", cases}});
}

SuiteReport suite_monotone_xbar(const Scenario& base) {
  json cases = json::array();
  int failures = 0;
  const double Ts[] = {0.008, 0.01, 0.012};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    for (double T : Ts) {
      Scenario sc = scenario_for(base, seed, 1 + static_cast<int>((seed - 1) % 3));
      sc.task.T = T;
      const XbarEvaluator xbar(sc.task, sc.channels, sc.params);
      const DRange dd = d_domain(sc.task, sc.params);
      const ProbeReport rep = probe_monotone(
          [&](double d) { return xbar.value(d); }, 0.0, dd.hi, 25);
      if (!rep.passed) ++failures;
      cases.push_back({{"seed", seed},
                       {"T", T},
                       {"ok", rep.passed},
                       {"worst_violation", rep.worst_violation}});
    }
  }
  return finish("monotone-xbar", 30, failures, {{"cases", cases}});
}

SuiteReport suite_oracle_n1(const Scenario& base) {
  json cases = json::array();
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const Scenario sc = scenario_for(base, seed, 1);
    const AfSolution sol = solve_af_polyblock(sc.task, sc.channels, sc.params);
    const OracleResult oracle = brute_force_af(
        sc.task, sc.channels, sc.params,
        default_af_grid(sc.task, sc.channels, sc.params));
    const double rel = oracle.found
                           ? std::abs(sol.total_energy - oracle.energy) /
                                 std::max(oracle.energy, 1.0e-300)
                           : 1.0;
    const bool ok = oracle.found && rel <= 1.0e-2;
    if (!ok) ++failures;
    cases.push_back({{"seed", seed},
                     {"solver_energy", sol.total_energy},
                     {"oracle_energy", oracle.energy},
                     {"relative_gap", rel},
                     {"ok", ok}});
  }
  return finish("oracle-n1", 3, failures, {{"cases", cases}});
}

SuiteReport suite_oracle_n2(const Scenario& base) {
  json cases = json::array();
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Scenario sc = scenario_for(base, seed, 2);
    const TdmaSolution sol = solve_tdma(sc.task, sc.channels, sc.params);
    const OracleResult oracle = brute_force_tdma(
        sc.task, sc.channels, sc.params, default_tdma_grid(sc.task, sc.params));
    const double rel = oracle.found
                           ? std::abs(sol.total_energy - oracle.energy) /
                                 std::max(oracle.energy, 1.0e-300)
                           : 1.0;
    const bool ok = oracle.found && rel <= 1.0e-3;
    if (!ok) ++failures;
    cases.push_back({{"seed", seed},
                     {"solver_energy", sol.total_energy},
                     {"oracle_energy", oracle.energy},
                     {"relative_gap", rel},
                     {"ok", ok}});
  }
  return finish("oracle-n2", 10, failures, {{"cases", cases}});
}

SuiteReport suite_equivalence(const Scenario& base) {
  json cases = json::array();
  int failures = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Scenario sc = scenario_for(base, seed, 1 + static_cast<int>((seed - 1) % 8));
    const TdmaSolution tdma = solve_tdma(sc.task, sc.channels, sc.params);
    const FdmaSolution fdma = map_tdma_to_fdma(tdma, sc.task, sc.params);
    const double denom = std::max(tdma.total_energy, 1.0e-300);
    const double rel = std::abs(tdma.total_energy - fdma.total_energy) / denom;
    const bool ok = rel <= 1.0e-9;
    if (!ok) ++failures;
    cases.push_back({{"seed", seed}, {"relative_gap", rel}, {"ok", ok}});
  }
  return finish("equivalence", 100, failures, {{"cases", cases}});
}
}  // namespace

std::vector<std::string> suite_names() {
  return {"kkt", "sca-descent", "monotone-xbar", "oracle-n1", "oracle-n2",
          "equivalence"};
}

SuiteReport run_suite(const std::string& name, const Scenario& base) {
  if (name == "kkt") return suite_kkt(base);
  if (name == "sca-descent") return suite_sca_descent(base);
  if (name == "monotone-xbar") return suite_monotone_xbar(base);
  if (name == "oracle-n1") return suite_oracle_n1(base);
  if (name == "oracle-n2") return suite_oracle_n2(base);
  if (name == "equivalence") return suite_equivalence(base);
  throw DomainError("run_suite: unknown suite '" + name + "'");
}

}  // namespace relaymec
