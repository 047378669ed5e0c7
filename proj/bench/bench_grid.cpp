// Timing comparison between the serial reference scans and their OpenMP
// counterparts, plus the closed-form TDMA solve at growing relay counts.

#include <chrono>
#include <cstdio>

#include <omp.h>

#include "relaymec/af.hpp"
#include "relaymec/scenario.hpp"
#include "relaymec/tdma.hpp"
#include "relaymec/validation.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename F>
double time_s(F&& fn) {
  const auto start = Clock::now();
  fn();
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

int main() {
  using namespace relaymec;
  TaskSpec task;
  SystemParams params;

  std::printf("threads: %d\n\n", omp_get_max_threads());
  std::printf("%-34s %10s %10s %8s\n", "kernel", "serial[s]", "openmp[s]", "speedup");

  {
    const ChannelRealization ch = sample_channels(7, 2, 0.1, 0.5, params);
    const GridSpec grid = default_tdma_grid(task, params);
    OracleResult serial, parallel;
    const double ts = time_s([&] {
      serial = brute_force_tdma(task, ch, params, grid, false);
    });
    const double tp = time_s([&] {
      parallel = brute_force_tdma(task, ch, params, grid, true);
    });
    std::printf("%-34s %10.3f %10.3f %7.2fx%s\n", "brute_force_tdma (6.8M pts)",
                ts, tp, ts / tp,
                serial.energy == parallel.energy ? "" : "  MISMATCH");
  }

  {
    const ChannelRealization ch = sample_channels(3, 1, 0.1, 0.5, params);
    const GridSpec grid = default_af_grid(task, ch, params);
    OracleResult serial, parallel;
    const double ts = time_s([&] {
      serial = brute_force_af(task, ch, params, grid, false);
    });
    const double tp = time_s([&] {
      parallel = brute_force_af(task, ch, params, grid, true);
    });
    std::printf("%-34s %10.3f %10.3f %7.2fx%s\n", "brute_force_af (5.4M pts)",
                ts, tp, ts / tp,
                serial.energy == parallel.energy ? "" : "  MISMATCH");
  }

  {
    const ChannelRealization ch = sample_channels(11, 2, 0.1, 0.5, params);
    AfSolution serial, parallel;
    const double ts = time_s([&] {
      serial = solve_af_grid(task, ch, params, 64, false);
    });
    const double tp = time_s([&] {
      parallel = solve_af_grid(task, ch, params, 64, true);
    });
    std::printf("%-34s %10.3f %10.3f %7.2fx%s\n", "solve_af_grid (64 pts)", ts,
                tp, ts / tp,
                serial.total_energy == parallel.total_energy ? "" : "  MISMATCH");
  }

  std::printf("\n%-14s %12s\n", "solve_tdma N", "time[s]");
  for (int n : {5, 10, 25, 50, 100}) {
    const ChannelRealization ch = sample_channels(42, n, 0.1, 0.5, params);
    TdmaSolution sol;
    const double t = time_s([&] { sol = solve_tdma(task, ch, params); });
    std::printf("%-14d %12.6f   (energy %.6g J)\n", n, t, sol.total_energy);
  }
  return 0;
}
