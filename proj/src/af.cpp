#include "relaymec/af.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <omp.h>

#include "relaymec/errors.hpp"
#include "relaymec/kernel.hpp"

namespace relaymec {

namespace {
// Rate exponent 2d / (W (T - Ld/fB)), clamped so downstream exponentials
// stay representable; the clamp only engages at energies far beyond any
// optimum.
double rate_exponent(double d, const TaskSpec& task, const SystemParams& params) {
  if (d < 0.0) throw DomainError("psi: d must be >= 0");
  const double budget = task.T - task.L * d / params.fB;
  if (!(budget > 0.0)) {
    std::ostringstream msg;
    msg << "psi: d = " << d << " is at or beyond the fB*T/L singularity";
    throw NumericError(msg.str());
  }
  return std::min(2.0 * d / (params.W * budget), 700.0);
}
}  // namespace

double psi(double d, const TaskSpec& task, const SystemParams& params) {
  if (d == 0.0) return 0.0;
  return std::expm1(rate_exponent(d, task, params));
}

double log_psi(double d, const TaskSpec& task, const SystemParams& params) {
  const double z = rate_exponent(d, task, params);
  if (!(z > 0.0)) throw DomainError("log_psi: needs d > 0");
  // ln(e^z - 1) = z + ln(1 - e^-z)
  return z + std::log1p(-std::exp(-z));
}

namespace {

// Variable layout of the log-domain program: x = (q, s, alpha_1..alpha_N).
constexpr int kQ = 0;
constexpr int kS = 1;
constexpr double kLogFloor = -60.0;
constexpr double kStartMargin = 1.0e-3;

Eigen::VectorXd pack(const ScaState& st) {
  Eigen::VectorXd x(2 + st.alpha.size());
  x(kQ) = st.q;
  x(kS) = st.s;
  for (std::size_t n = 0; n < st.alpha.size(); ++n) x(2 + n) = st.alpha[n];
  return x;
}

ScaState unpack(const Eigen::VectorXd& x, int iter, double ybar) {
  ScaState st;
  st.q = x(kQ);
  st.s = x(kS);
  st.alpha.assign(x.size() - 2, 0.0);
  for (int n = 0; n < x.size() - 2; ++n) st.alpha[n] = x(2 + n);
  st.iter = iter;
  st.Ybar = ybar;
  return st;
}

// Objective ln(e^q + sum h_n e^(q + 2 alpha_n) + sigma2 W sum e^(2 alpha_n)),
// the log of the transmit-plus-relay power.
std::vector<LseTerm> objective_terms(const ChannelRealization& ch,
                                     const SystemParams& params) {
  const int N = ch.relay_count();
  const int dim = N + 2;
  std::vector<LseTerm> terms;
  terms.reserve(2 * N + 1);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(dim);
  e(kQ) = 1.0;
  terms.push_back({1.0, e});
  for (int n = 0; n < N; ++n) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(dim);
    u(kQ) = 1.0;
    u(2 + n) = 2.0;
    terms.push_back({ch.h[n], u});
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(2 + n) = 2.0;
    terms.push_back({params.sigma2 * params.W, v});
  }
  return terms;
}

// Slack-side constraint ln(sum g_n e^(2 alpha_n - s) + e^(-s)) <= bound,
// i.e. sigma2 W psi(d) (1 + sum g_n beta_n^2) <= delta.
LseProgram::Constraint slack_constraint(double d, const ChannelRealization& ch,
                                        const TaskSpec& task,
                                        const SystemParams& params) {
  const int N = ch.relay_count();
  const int dim = N + 2;
  LseProgram::Constraint c;
  c.bound = -log_psi(d, task, params) - std::log(params.sigma2 * params.W);
  Eigen::VectorXd noise = Eigen::VectorXd::Zero(dim);
  noise(kS) = -1.0;
  c.terms.push_back({1.0, noise});
  for (int n = 0; n < N; ++n) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(kS) = -1.0;
    v(2 + n) = 2.0;
    c.terms.push_back({ch.g[n], v});
  }
  return c;
}

// Received-power side, linearized at alpha^i:
//   sum c_n (alpha_n - alpha_n^i) + (q - q^i) - (s - s^i)
//     + 2 ln(sum sqrt(h_n g_n) e^(alpha_n^i)) + q^i - s^i >= 0
LseProgram::Affine linearized_power_constraint(const ScaState& at,
                                               const ChannelRealization& ch) {
  const int N = ch.relay_count();
  const int dim = N + 2;
  double sum = 0.0;
  std::vector<double> weights(N);
  for (int n = 0; n < N; ++n) {
    weights[n] = std::sqrt(ch.h[n] * ch.g[n]) * std::exp(at.alpha[n]);
    sum += weights[n];
  }
  LseProgram::Affine aff;
  aff.w = Eigen::VectorXd::Zero(dim);
  aff.w(kQ) = 1.0;
  aff.w(kS) = -1.0;
  aff.offset = 2.0 * std::log(sum);
  for (int n = 0; n < N; ++n) {
    const double cn = 2.0 * weights[n] / sum;
    aff.w(2 + n) = cn;
    aff.offset -= cn * at.alpha[n];
  }
  return aff;
}

double true_power_constraint(const Eigen::VectorXd& x,
                             const ChannelRealization& ch) {
  double sum = 0.0;
  for (int n = 0; n < ch.relay_count(); ++n)
    sum += std::sqrt(ch.h[n] * ch.g[n]) * std::exp(x(2 + n));
  return 2.0 * std::log(sum) + x(kQ) - x(kS);
}

}  // namespace

ScaState feasible_start(double d, const ChannelRealization& channels,
                        const TaskSpec& task, const SystemParams& params) {
  if (!(d > 0.0)) throw DomainError("feasible_start: needs d > 0");
  channels.check();
  double g_sum = 0.0;
  double amp_sum = 0.0;
  for (int n = 0; n < channels.relay_count(); ++n) {
    g_sum += channels.g[n];
    amp_sum += std::sqrt(channels.h[n] * channels.g[n]);
  }
  const double log_base = std::log(params.sigma2 * params.W) +
                          log_psi(d, task, params) + std::log1p(g_sum);
  ScaState st;
  st.alpha.assign(channels.relay_count(), 0.0);
  st.s = log_base + std::log1p(kStartMargin);
  st.q = st.s + std::log1p(kStartMargin) - 2.0 * std::log(amp_sum);
  st.iter = 0;
  LseFunction obj(objective_terms(channels, params));
  st.Ybar = obj.value(pack(st));
  return st;
}

ScaState sca_step(const ScaState& state, double d,
                  const ChannelRealization& channels, const TaskSpec& task,
                  const SystemParams& params) {
  const int N = channels.relay_count();
  LseProgram prog;
  prog.objective = objective_terms(channels, params);
  prog.lse_constraint = slack_constraint(d, channels, task, params);
  prog.affine_constraint = linearized_power_constraint(state, channels);
  prog.lower_bounds = Eigen::VectorXd::Constant(N + 2, kLogFloor);

  // The current point sits on the linearized boundary by construction; give
  // the barrier a strictly interior launch point without leaving the true
  // feasible set.
  constexpr double kInteriorEps = 1.0e-8;
  Eigen::VectorXd x0 = pack(state);
  LseFunction f1(prog.lse_constraint->terms);
  const double slack_b = prog.lse_constraint->bound - f1.value(x0);
  if (slack_b <= kInteriorEps) x0(kS) += 2.0 * kInteriorEps - slack_b;
  const double aff0 =
      prog.affine_constraint->w.dot(x0) + prog.affine_constraint->offset;
  if (aff0 <= kInteriorEps) x0(kQ) += 2.0 * kInteriorEps - aff0;

  const LseSolution sol = solve_lse_program(prog, x0, params.tol_newton);

  // Keep the incumbent when the subproblem cannot improve on it; the trace
  // stays nonincreasing and the loop reads the tie as convergence.
  if (sol.value <= state.Ybar)
    return unpack(sol.x, state.iter + 1, sol.value);
  ScaState keep = state;
  keep.iter = state.iter + 1;
  return keep;
}

ScaResult sca_solve(double d, const ChannelRealization& channels,
                    const TaskSpec& task, const SystemParams& params,
                    std::optional<ScaState> start, int iteration_cap) {
  if (!(d > 0.0)) throw DomainError("sca_solve: needs d > 0");
  ScaState state = start ? *start : feasible_start(d, channels, task, params);
  state.iter = 0;

  std::vector<double> trace{state.Ybar};
  for (int i = 0; i < iteration_cap; ++i) {
    ScaState next = sca_step(state, d, channels, task, params);
    trace.push_back(next.Ybar);
    const double delta = std::abs(next.Ybar - state.Ybar);
    state = std::move(next);
    if (delta < params.tol_sca) return {state.Ybar, state, trace};
  }
  std::ostringstream msg;
  msg << "sca_solve: no convergence within " << iteration_cap
      << " iterations at d = " << d;
  throw ScaCapError(msg.str(), trace);
}

XbarEvaluator::XbarEvaluator(const TaskSpec& task,
                             const ChannelRealization& channels,
                             const SystemParams& params)
    : task_(task), channels_(channels), params_(params) {
  d_max_ = d_domain(task, params).hi;
}

ScaState XbarEvaluator::anchor_state(double d) const {
  // Anchors are cold-started at fixed grid points; warm starts shift an
  // anchor's (q, s) by the log-SNR offset, which preserves every constraint
  // slack exactly. Keyed by index so the map is order-independent.
  int idx = static_cast<int>(std::lround(static_cast<double>(kAnchors) * d / d_max_));
  idx = std::clamp(idx, 1, kAnchors);
  const double d_anchor = d_max_ * idx / kAnchors;
  {
    std::scoped_lock lock(mu_);
    auto it = anchors_.find(idx);
    if (it != anchors_.end()) {
      ScaState st = it->second;
      const double shift = log_psi(d, task_, params_) -
                           log_psi(d_anchor, task_, params_);
      st.q += shift;
      st.s += shift;
      return st;
    }
  }
  const ScaResult cold = sca_solve(d_anchor, channels_, task_, params_);
  {
    std::scoped_lock lock(mu_);
    anchors_.emplace(idx, cold.state);
  }
  return anchor_state(d);
}

const XbarEvaluator::Entry& XbarEvaluator::lookup(double d) const {
  if (!(d >= 0.0) || d > d_max_ * (1.0 + 1.0e-12))
    throw DomainError("XbarEvaluator: d outside its domain");
  const std::int64_t key =
      static_cast<std::int64_t>(std::llround(d / d_max_ * 1.0e9));
  {
    std::scoped_lock lock(mu_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  ScaState warm = anchor_state(d);
  LseFunction obj(objective_terms(channels_, params_));
  warm.Ybar = obj.value(pack(warm));
  ScaResult res = sca_solve(d, channels_, task_, params_, warm);
  Entry entry{std::exp(res.Ybar), std::move(res)};
  std::scoped_lock lock(mu_);
  return cache_.emplace(key, std::move(entry)).first->second;
}

double XbarEvaluator::value(double d) const {
  if (d == 0.0) return 0.0;
  return lookup(d).xbar;
}

ScaResult XbarEvaluator::result(double d) const { return lookup(d).res; }

double af_upper_objective(double d, const XbarEvaluator& xbar,
                          const TaskSpec& task, const SystemParams& params) {
  const double t = 0.5 * offload_time_budget(task, params, d);
  return t * xbar.value(d) + local_energy(task, params, d);
}

namespace {

AfSolution zero_af_solution(const TaskSpec& task, const SystemParams& params,
                            int n_relays) {
  AfSolution sol;
  sol.t = 0.5 * task.T;
  sol.beta.assign(n_relays, 0.0);
  sol.total_energy = local_energy(task, params, 0.0);
  return sol;
}

AfSolution recover_af(double d, const XbarEvaluator& xbar, const TaskSpec& task,
                      const ChannelRealization& channels,
                      const SystemParams& params) {
  if (d == 0.0) return zero_af_solution(task, params, channels.relay_count());
  AfSolution sol;
  const ScaResult res = xbar.result(d);
  sol.d = d;
  sol.t = 0.5 * offload_time_budget(task, params, d);
  sol.P = std::exp(res.state.q);
  sol.beta.resize(channels.relay_count());
  double relay_energy = 0.0;
  for (int n = 0; n < channels.relay_count(); ++n) {
    sol.beta[n] = std::exp(res.state.alpha[n]);
    relay_energy += sol.beta[n] * sol.beta[n] *
                    (sol.P * channels.h[n] + params.sigma2 * params.W) * sol.t;
  }
  sol.total_energy =
      relay_energy + sol.P * sol.t + local_energy(task, params, d);
  sol.sca_trace = res.trace;
  return sol;
}

bool xbar_monotone_on_grid(const XbarEvaluator& xbar, double d_max, int points) {
  double prev = 0.0;
  for (int i = 1; i <= points; ++i) {
    const double v = xbar.value(d_max * i / points);
    if (v < prev - 1.0e-10 * (1.0 + std::abs(prev))) return false;
    prev = v;
  }
  return true;
}

}  // namespace

AfSolution solve_af_polyblock(const TaskSpec& task,
                              const ChannelRealization& channels,
                              const SystemParams& params) {
  task.check();
  params.check();
  channels.check();
  const DRange dr = d_domain(task, params);
  if (!(dr.hi > 0.0))
    return zero_af_solution(task, params, channels.relay_count());

  XbarEvaluator xbar(task, channels, params);

  // The outer decomposition leans on Xbar increasing with d; that is an
  // empirical property here, so it is probed before trusting polyblock.
  if (!xbar_monotone_on_grid(xbar, dr.hi, 24)) {
    AfSolution sol = solve_af_grid(task, channels, params, 512);
    sol.used_grid_fallback = true;
    return sol;
  }

  const double half_T = 0.5 * task.T;
  const double budget = half_T * xbar.value(dr.hi);

  MonotoneProblem mp;
  mp.objective = [&](const Eigen::VectorXd& x) {
    const double d = x(0);
    return task.L * d / (2.0 * params.fB) * xbar.value(d) -
           local_energy(task, params, d) + x(1);
  };
  mp.constraint = [&](const Eigen::VectorXd& x) {
    return x(1) + half_T * xbar.value(x(0));
  };
  mp.limit = budget;
  mp.box = Eigen::Vector2d(dr.hi, budget);
  mp.gap = params.eps_poly;
  mp.bisect_tol = params.tol_bisect;
  probe_monotone_inputs(mp);

  const PolyblockResult poly = polyblock_maximize(mp);

  // Candidate offloads: the polyblock point, both endpoints, and a local
  // golden polish around the polyblock point (the outer gap guarantee is on
  // the objective, not on d itself).
  auto objective_at = [&](double d) {
    return af_upper_objective(d, xbar, task, params);
  };
  double best_d = poly.x(0);
  double best_val = objective_at(best_d);
  auto consider = [&](double d) {
    const double v = objective_at(d);
    if (v < best_val) {
      best_val = v;
      best_d = d;
    }
  };
  consider(0.0);
  consider(dr.hi);
  const double window = 0.02 * dr.hi;
  const double plo = std::max(0.0, poly.x(0) - window);
  const double phi = std::min(dr.hi, poly.x(0) + window);
  if (phi > plo) {
    const ScalarMinimum polish =
        golden_search({objective_at, plo, phi, params.tol_golden});
    consider(polish.x);
  }

  AfSolution sol = recover_af(best_d, xbar, task, channels, params);
  sol.poly_gap = poly.bound - poly.value;
  sol.poly_iterations = poly.iterations;
  return sol;
}

AfSolution solve_af_grid(const TaskSpec& task, const ChannelRealization& channels,
                         const SystemParams& params, int steps, bool parallel) {
  task.check();
  params.check();
  channels.check();
  if (steps < 2) throw DomainError("solve_af_grid: steps must be >= 2");
  const DRange dr = d_domain(task, params);
  if (!(dr.hi > 0.0))
    return zero_af_solution(task, params, channels.relay_count());

  XbarEvaluator xbar(task, channels, params);
  std::vector<double> values(steps);
  const auto eval_point = [&](int i) {
    const double d = dr.hi * i / (steps - 1);
    values[i] = af_upper_objective(d, xbar, task, params);
  };

  if (parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < steps; ++i) eval_point(i);
  } else {
    for (int i = 0; i < steps; ++i) eval_point(i);
  }

  // Deterministic argmin regardless of evaluation order: lowest index wins.
  int best = 0;
  for (int i = 1; i < steps; ++i)
    if (values[i] < values[best]) best = i;

  AfSolution sol =
      recover_af(dr.hi * best / (steps - 1), xbar, task, channels, params);
  sol.poly_gap = 0.0;
  return sol;
}

}  // namespace relaymec
