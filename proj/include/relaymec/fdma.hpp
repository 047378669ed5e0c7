#pragma once

#include <vector>

#include "relaymec/scenario.hpp"
#include "relaymec/tdma.hpp"

namespace relaymec {

/// Full DF-FDMA allocation: a common phase duration t and per-relay
/// bandwidth slices instead of time slots.
struct FdmaSolution {
  double d = 0.0;             // offloaded data [nats]
  double t = 0.0;             // common phase duration [s]
  std::vector<double> w;      // bandwidth per relay [Hz]
  std::vector<double> P;      // mobile transmit power per relay [W]
  std::vector<double> Q;      // relay transmit power per relay [W]
  double total_energy = 0.0;  // [J]
  int active_relay = -1;
};

/// The FDMA problem is the TDMA problem in disguise: with t pinned to half
/// the offload window, w_n = t_n W / t and P_n = E_n / t carry the same data
/// at the same energy. Inactive relays map to w_n = 0.
FdmaSolution map_tdma_to_fdma(const TdmaSolution& tdma, const TaskSpec& task,
                              const SystemParams& params);

/// Optimal DF-FDMA allocation: solve the TDMA problem, then map.
FdmaSolution solve_fdma(const TaskSpec& task, const ChannelRealization& channels,
                        const SystemParams& params);

/// Inverse of map_tdma_to_fdma on the allocation fields (t_n = w_n t / W,
/// E_n = P_n t). Used to check the mapping is a bijection.
struct TdmaAllocation {
  std::vector<double> E;
  std::vector<double> t;
};
TdmaAllocation invert_fdma_map(const FdmaSolution& fdma, const SystemParams& params);

}  // namespace relaymec
