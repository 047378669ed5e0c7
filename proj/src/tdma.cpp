#include "relaymec/tdma.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "relaymec/errors.hpp"
#include "relaymec/kernel.hpp"

namespace relaymec {

namespace {
// theta(x) = ln(1+x) - x/(1+x); strictly increasing for x > 0, so a common
// slot multiplier forces a common SNR across active relays.
double theta(double snr) { return std::log1p(snr) - snr / (1.0 + snr); }

double cheapest_ratio(const ChannelRealization& ch, int* index) {
  int best = 0;
  double best_ratio = (1.0 + ch.h[0] / ch.g[0]) / ch.h[0];
  for (int n = 1; n < ch.relay_count(); ++n) {
    const double r = (1.0 + ch.h[n] / ch.g[n]) / ch.h[n];
    if (r < best_ratio) {
      best_ratio = r;
      best = n;
    }
  }
  if (index) *index = best;
  return best_ratio;
}
}  // namespace

double sigma_threshold(double d, const TaskSpec& task, const SystemParams& params) {
  if (d < 0.0) throw DomainError("sigma_threshold: d must be >= 0");
  if (d == 0.0) return 0.0;
  const double budget = task.T - task.L * d / params.fB;
  if (!(budget > 0.0)) {
    std::ostringstream msg;
    msg << "sigma_threshold: d = " << d << " is at or beyond the fB*T/L singularity";
    throw NumericError(msg.str());
  }
  return 0.5 * params.sigma2 * params.W * budget *
         std::expm1(2.0 * d / (params.W * budget));
}

LowerLpResult lower_lp(double d, const ChannelRealization& channels,
                       const TaskSpec& task, const SystemParams& params) {
  channels.check();
  LowerLpResult out;
  out.E.assign(channels.relay_count(), 0.0);
  if (d == 0.0) {
    out.U = 0.0;
    out.active_relay = -1;
    return out;
  }
  int best = 0;
  const double ratio = cheapest_ratio(channels, &best);
  const double sigma = sigma_threshold(d, task, params);
  out.E[best] = sigma / channels.h[best];
  out.U = sigma * ratio;
  out.active_relay = best;
  return out;
}

std::vector<double> recover_slots(const std::vector<double>& E, double d,
                                  const ChannelRealization& channels,
                                  const TaskSpec& task,
                                  const SystemParams& params) {
  if (E.size() != static_cast<std::size_t>(channels.relay_count()))
    throw DomainError("recover_slots: E has wrong length");
  double received = 0.0;
  for (int n = 0; n < channels.relay_count(); ++n) received += E[n] * channels.h[n];
  std::vector<double> t(E.size(), 0.0);
  if (received <= 0.0) {
    if (d > 0.0)
      throw InconsistencyError("recover_slots: zero energy cannot carry d > 0");
    return t;
  }
  const double budget = offload_time_budget(task, params, d);
  for (int n = 0; n < channels.relay_count(); ++n)
    t[n] = E[n] * channels.h[n] * budget / (2.0 * received);
  return t;
}

PowerPair recover_powers(const std::vector<double>& E,
                         const std::vector<double>& t,
                         const ChannelRealization& channels) {
  if (E.size() != t.size() ||
      E.size() != static_cast<std::size_t>(channels.relay_count()))
    throw DomainError("recover_powers: mismatched lengths");
  PowerPair out;
  out.P.assign(E.size(), 0.0);
  out.Q.assign(E.size(), 0.0);
  for (std::size_t n = 0; n < E.size(); ++n) {
    if (E[n] > 0.0 && t[n] > 0.0) {
      out.P[n] = E[n] / t[n];
      out.Q[n] = out.P[n] * channels.h[n] / channels.g[n];
    } else if (E[n] > 0.0 || t[n] > 0.0) {
      std::ostringstream msg;
      msg << "recover_powers: relay " << n << " has E = " << E[n]
          << " but t = " << t[n];
      throw InconsistencyError(msg.str());
    }
  }
  return out;
}

TdmaSolution solve_tdma(const TaskSpec& task, const ChannelRealization& channels,
                        const SystemParams& params) {
  task.check();
  params.check();
  channels.check();

  const DRange dr = d_domain(task, params);
  auto objective = [&](double d) {
    return lower_lp(d, channels, task, params).U + local_energy(task, params, d);
  };

  double d_star = 0.0;
  int evals = 1;
  if (dr.hi > 0.0) {
    ScalarProblem sp{objective, dr.lo, dr.hi, params.tol_golden};
    const ScalarMinimum interior = golden_search(sp);
    evals = interior.evaluations + 2;
    d_star = interior.x;
    double best = interior.value;
    // Endpoints checked explicitly; golden search only brackets them.
    for (double cand : {dr.lo, dr.hi}) {
      const double v = objective(cand);
      if (v < best) {
        best = v;
        d_star = cand;
      }
    }
  }

  TdmaSolution sol;
  sol.d = d_star;
  sol.golden_evaluations = evals;
  const LowerLpResult lower = lower_lp(d_star, channels, task, params);
  sol.E = lower.E;
  sol.U = lower.U;
  sol.active_relay = lower.active_relay;
  sol.t = recover_slots(lower.E, d_star, channels, task, params);
  PowerPair pw = recover_powers(sol.E, sol.t, channels);
  sol.P = std::move(pw.P);
  sol.Q = std::move(pw.Q);
  sol.total_energy = lower.U + local_energy(task, params, d_star);
  if (lower.active_relay >= 0) {
    const int n = lower.active_relay;
    sol.snr_common =
        sol.E[n] * channels.h[n] / (sol.t[n] * params.sigma2 * params.W);
  }
  return sol;
}

double KktResidualsTdma::max_residual() const {
  double m = std::max({comp_rate, comp_time, primal_rate, primal_time, primal_nonneg});
  for (double v : stationarity_energy) m = std::max(m, v);
  for (double v : stationarity_slot) m = std::max(m, v);
  for (double v : comp_energy_bound) m = std::max(m, v);
  for (double v : comp_slot_bound) m = std::max(m, v);
  return m;
}

KktResidualsTdma kkt_residuals_tdma(const TdmaSolution& sol,
                                    const TaskSpec& task,
                                    const SystemParams& params,
                                    const ChannelRealization& channels) {
  const int n_relays = channels.relay_count();
  const double s2 = params.sigma2;
  const double W = params.W;

  int cheapest = 0;
  const double ratio_star = cheapest_ratio(channels, &cheapest);

  // Common SNR reconstructed from the allocation itself; with no active
  // relay (d = 0) the multiplier sits at its boundary value sigma2*ratio.
  double snr = 0.0;
  for (int n = 0; n < n_relays; ++n) {
    if (sol.E[n] > 0.0 && sol.t[n] > 0.0) {
      snr = sol.E[n] * channels.h[n] / (sol.t[n] * s2 * W);
      break;
    }
  }

  KktResidualsTdma r;
  r.mu = s2 * ratio_star * (1.0 + snr);
  r.lambda = 0.5 * r.mu * W * theta(snr);
  r.zeta.assign(n_relays, 0.0);
  r.eta.assign(n_relays, 0.0);
  r.stationarity_energy.assign(n_relays, 0.0);
  r.stationarity_slot.assign(n_relays, 0.0);
  r.comp_energy_bound.assign(n_relays, 0.0);
  r.comp_slot_bound.assign(n_relays, 0.0);

  const double energy_scale = 1.0 + std::abs(sol.U);
  double rate_sum = 0.0;
  double slot_sum = 0.0;

  for (int n = 0; n < n_relays; ++n) {
    const double h = channels.h[n];
    const double g = channels.g[n];
    const double cost = 1.0 + h / g;
    const bool active = sol.E[n] > 0.0 && sol.t[n] > 0.0;

    double snr_n = snr;
    double denom_term;  // d(rate_n)/dE_n scaled: t h W / (t sigma2 W + E h)
    if (active) {
      snr_n = sol.E[n] * h / (sol.t[n] * s2 * W);
      denom_term = sol.t[n] * h * W / (sol.t[n] * s2 * W + sol.E[n] * h);
      rate_sum += sol.t[n] * W * std::log1p(snr_n);
      slot_sum += sol.t[n];
    } else {
      // Inactive relays: limit of the derivative along the common-SNR ray.
      denom_term = h / (s2 * (1.0 + snr));
      r.zeta[n] = std::max(0.0, cost - r.mu * denom_term);
      slot_sum += sol.t[n];
    }

    r.stationarity_energy[n] =
        std::abs(cost - r.mu * denom_term - r.zeta[n]) / (1.0 + cost);
    const double slot_grad = 2.0 * r.lambda - r.mu * W * theta(snr_n);
    if (!active) r.eta[n] = std::max(0.0, slot_grad);
    r.stationarity_slot[n] =
        std::abs(slot_grad - r.eta[n]) / (1.0 + 2.0 * r.lambda);

    r.comp_energy_bound[n] = r.zeta[n] * sol.E[n] / energy_scale;
    r.comp_slot_bound[n] = r.eta[n] * sol.t[n] / energy_scale;
  }

  const double time_line = 2.0 * slot_sum + task.L * sol.d / params.fB - task.T;
  r.comp_rate = r.mu * std::abs(sol.d - rate_sum) /
                (1.0 + r.mu * std::max(sol.d, rate_sum));
  r.comp_time = r.lambda * std::abs(time_line) / (1.0 + r.lambda * task.T);
  r.primal_rate = std::max(0.0, sol.d - rate_sum) / (1.0 + sol.d);
  r.primal_time = std::max(0.0, time_line) / (1.0 + task.T);
  double worst_sign = 0.0;
  for (int n = 0; n < n_relays; ++n) {
    worst_sign = std::max(worst_sign, -sol.E[n]);
    worst_sign = std::max(worst_sign, -sol.t[n]);
  }
  r.primal_nonneg = worst_sign / (1.0 + worst_sign);
  return r;
}

}  // namespace relaymec
