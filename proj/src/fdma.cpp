#include "relaymec/fdma.hpp"

#include <cmath>

#include "relaymec/errors.hpp"

namespace relaymec {

FdmaSolution map_tdma_to_fdma(const TdmaSolution& tdma, const TaskSpec& task,
                              const SystemParams& params) {
  FdmaSolution out;
  out.d = tdma.d;
  out.active_relay = tdma.active_relay;
  out.t = (task.T * params.fB - task.L * tdma.d) / (2.0 * params.fB);
  const std::size_t n = tdma.E.size();
  out.w.assign(n, 0.0);
  out.P.assign(n, 0.0);
  out.Q.assign(n, 0.0);
  out.total_energy = tdma.total_energy;

  if (tdma.d > 0.0 && !(out.t > 0.0))
    throw InconsistencyError("map_tdma_to_fdma: zero phase duration with d > 0");

  for (std::size_t i = 0; i < n; ++i) {
    if (tdma.t[i] <= 0.0) continue;  // idle relays keep w = P = 0
    out.w[i] = tdma.t[i] * params.W / out.t;
    out.P[i] = tdma.E[i] / out.t;
    // Q_n/P_n = h_n/g_n carries over from the TDMA powers.
    if (tdma.P[i] > 0.0) out.Q[i] = out.P[i] * (tdma.Q[i] / tdma.P[i]);
  }
  return out;
}

FdmaSolution solve_fdma(const TaskSpec& task, const ChannelRealization& channels,
                        const SystemParams& params) {
  return map_tdma_to_fdma(solve_tdma(task, channels, params), task, params);
}

TdmaAllocation invert_fdma_map(const FdmaSolution& fdma, const SystemParams& params) {
  TdmaAllocation out;
  out.E.assign(fdma.w.size(), 0.0);
  out.t.assign(fdma.w.size(), 0.0);
  for (std::size_t i = 0; i < fdma.w.size(); ++i) {
    out.t[i] = fdma.w[i] * fdma.t / params.W;
    out.E[i] = fdma.P[i] * fdma.t;
  }
  return out;
}

}  // namespace relaymec
