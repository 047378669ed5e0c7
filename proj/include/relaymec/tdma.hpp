#pragma once

#include <vector>

#include "relaymec/scenario.hpp"

namespace relaymec {

/// Full DF-TDMA allocation for one fading block.
struct TdmaSolution {
  double d = 0.0;                  // offloaded data [nats]
  std::vector<double> E;           // mobile transmit energy per relay [J]
  std::vector<double> t;           // slot duration per relay [s]
  std::vector<double> P;           // mobile transmit power per relay [W]
  std::vector<double> Q;           // relay transmit power per relay [W]
  double U = 0.0;                  // optimal communication energy U(d) [J]
  double total_energy = 0.0;       // U(d) + local CPU energy [J]
  double snr_common = 0.0;         // shared receive SNR on active relays
  int active_relay = -1;           // -1 when d = 0
  int golden_evaluations = 0;
};

/// Minimum aggregate received energy sum_n E_n h_n needed to push d nats
/// through the half-duplex window:
///   sigma(d) = 1/2 sigma2 W (T - Ld/fB) (exp(2d / (W (T - Ld/fB))) - 1)
/// Zero at d = 0, strictly increasing and convex up to the capacity bound.
double sigma_threshold(double d, const TaskSpec& task, const SystemParams& params);

/// Communication-energy floor for fixed d. One linear constraint plus
/// nonnegativity puts the optimum on a single relay: the one minimizing
/// (1 + h_n/g_n)/h_n (ties to the lowest index). Returns U(d) and the
/// per-relay energies.
struct LowerLpResult {
  double U;
  std::vector<double> E;
  int active_relay;  // -1 when d = 0
};
LowerLpResult lower_lp(double d, const ChannelRealization& channels,
                       const TaskSpec& task, const SystemParams& params);

/// Slot recovery t_n = E_n h_n (T - Ld/fB) / (2 sum_m E_m h_m); slots use the
/// whole half-duplex window (2 sum t_n = T - Ld/fB).
std::vector<double> recover_slots(const std::vector<double>& E, double d,
                                  const ChannelRealization& channels,
                                  const TaskSpec& task,
                                  const SystemParams& params);

/// P_n = E_n / t_n and Q_n = P_n h_n / g_n on active relays, zero elsewhere.
struct PowerPair {
  std::vector<double> P;
  std::vector<double> Q;
};
PowerPair recover_powers(const std::vector<double>& E,
                         const std::vector<double>& t,
                         const ChannelRealization& channels);

/// Optimal DF-TDMA allocation: golden search of U(d) + E_c(d) over the valid
/// offload range, then slot and power recovery.
TdmaSolution solve_tdma(const TaskSpec& task, const ChannelRealization& channels,
                        const SystemParams& params);

/// Stationarity / complementary-slackness / primal residuals of the
/// lower-level optimality system, with multipliers reconstructed from the
/// active-relay structure. All entries are scale-normalized.
struct KktResidualsTdma {
  double mu = 0.0;
  double lambda = 0.0;
  std::vector<double> zeta;
  std::vector<double> eta;

  std::vector<double> stationarity_energy;  // d/dE_n of the Lagrangian
  std::vector<double> stationarity_slot;    // d/dt_n of the Lagrangian
  double comp_rate = 0.0;                   // mu * (rate slack)
  double comp_time = 0.0;                   // lambda * (time slack)
  std::vector<double> comp_energy_bound;    // zeta_n * E_n
  std::vector<double> comp_slot_bound;      // eta_n * t_n
  double primal_rate = 0.0;                 // rate-constraint violation
  double primal_time = 0.0;                 // time-constraint violation
  double primal_nonneg = 0.0;               // worst sign violation

  double max_residual() const;
};
KktResidualsTdma kkt_residuals_tdma(const TdmaSolution& sol,
                                    const TaskSpec& task,
                                    const SystemParams& params,
                                    const ChannelRealization& channels);

}  // namespace relaymec
