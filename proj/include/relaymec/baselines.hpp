#pragma once

#include <vector>

#include "relaymec/scenario.hpp"

namespace relaymec {

/// Equal-slot (TDMA) / equal-bandwidth (FDMA) comparison policy with
/// optimized powers and offload amount. Both variants consume the same
/// energy, so one solution serves both.
struct EqualAllocSolution {
  double d = 0.0;
  std::vector<double> E;      // mobile transmit energy per relay [J]
  double slot = 0.0;          // common slot t/N (or bandwidth share W/N scaled)
  double total_energy = 0.0;  // [J]
  double lambda = 0.0;        // waterfilling multiplier
  int evaluations = 0;        // outer-search objective evaluations
  bool used_grid_fallback = false;
};

/// Communication energy with every relay pinned to the slot t/N,
/// t = (T - Ld/fB)/2. Waterfilling over relays:
///   E_n(lambda) = max(0, (t/N)(lambda W h_n / (1 + h_n/g_n) - sigma2 W)/h_n)
/// with lambda bisected until the aggregate rate meets d.
struct EqualAllocLower {
  double energy;
  std::vector<double> E;
  double lambda;
};
EqualAllocLower equal_alloc_lower(double d, const ChannelRealization& channels,
                                  const TaskSpec& task, const SystemParams& params);

/// Golden search over d of equal_alloc_lower + local energy. Unimodality is
/// probed on a coarse grid first; a 512-point grid scan takes over when the
/// probe fails.
EqualAllocSolution solve_equal_alloc(const TaskSpec& task,
                                     const ChannelRealization& channels,
                                     const SystemParams& params);

}  // namespace relaymec
