#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace relaymec {

/// A computation task: finish D nats of input within T seconds, at L CPU
/// cycles per nat. L*D is the total cycle count.
struct TaskSpec {
  double T = 0.01;    // max tolerable delay [s]
  double D = 8.0e4;   // total input data [nats]
  double L = 50.0;    // CPU cycles per nat

  void check() const;
};

/// Physical constants and solver tolerances shared by every mode.
struct SystemParams {
  double W = 1.0e6;        // system bandwidth [Hz]
  double sigma2 = 1.0e-14; // noise PSD [W/Hz] (-140 dBW/Hz)
  double kappa = 1.0e-25;  // local CPU energy coefficient [J s^2 / cycle^3]
  double fB = 5.0e9;       // edge capacity granted to the device [cycles/s]

  double eps_poly = 1.0e-5;    // polyblock optimality gap
  double tol_golden = 1.0e-8;  // golden search, relative to interval width
  double tol_sca = 1.0e-8;     // SCA stop on |Ybar_i - Ybar_{i-1}|
  double tol_newton = 1.0e-9;  // barrier duality-gap target
  double tol_bisect = 1.0e-10; // ray bisection, relative to box diagonal

  // Keeps d strictly below fB*T/L where the rate exponentials blow up.
  double mu_margin = 1.0e-9;

  void check() const;
};

/// One fading block: linear power gains mobile->relay (h) and relay->BS (g).
struct ChannelRealization {
  std::vector<double> h;
  std::vector<double> g;

  int relay_count() const { return static_cast<int>(h.size()); }
  void check() const;
};

/// Free-space path loss in dB. Distance in kilometers, bandwidth in MHz:
///   PL = 32.4 + 20 log10(distance) + 20 log10(bandwidth)
double path_loss_db(double distance_km, double bandwidth_mhz);

/// Draws one fading block. Each relay/hop pair gets its own SplitMix64
/// substream (index 2n for mobile->relay, 2n+1 for relay->BS), so a
/// realization is a pure function of (seed, N, bounds, params) and adding
/// relays does not disturb earlier ones. Per hop: distance ~ U(dist_min,
/// dist_max), gain = 10^(-PL/10) * X with X ~ Exp(mean 0.5).
ChannelRealization sample_channels(std::uint64_t seed, int n_relays,
                                   double dist_min_km, double dist_max_km,
                                   const SystemParams& params);

/// CPU energy for computing the (D - d) nats kept local:
///   E_c = kappa L^3 (D - d)^3 / T^2
double local_energy(const TaskSpec& task, const SystemParams& params, double d);

/// Time left for the two offloading phases after the BS computes L*d cycles:
/// T - L*d/fB. Throws if negative.
double offload_time_budget(const TaskSpec& task, const SystemParams& params,
                           double d);

/// Valid offload range [0, d_max], d_max = min(D, (1 - mu_margin) fB T / L).
struct DRange {
  double lo = 0.0;
  double hi = 0.0;
};
DRange d_domain(const TaskSpec& task, const SystemParams& params);

/// One scenario = task + params + channels, as loaded from a config file.
struct Scenario {
  TaskSpec task;
  SystemParams params;
  ChannelRealization channels;
  std::uint64_t seed = 1;
  int n_relays = 4;
  double dist_min_km = 0.1;
  double dist_max_km = 0.5;
  bool explicit_channels = false;
};

/// Parses the JSON scenario config. Unknown keys are rejected; missing keys
/// take the defaults above. Explicit "h"/"g" arrays override sampling.
Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& json_text);

/// Re-derives channels from (seed, N, distances) unless explicit ones were
/// given. Used by the CLI --seed override.
void resample_channels(Scenario& sc);

/// Effective config serialized back to JSON (echoed into output headers).
std::string scenario_to_json(const Scenario& sc);

// SplitMix64: the portable seeded generator behind sample_channels. Exposed
// for tests and for deterministic seed-derivation in the harness.
struct SplitMix64 {
  std::uint64_t state;
  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  double next_unit();                  // in [0, 1)
  double next_uniform(double lo, double hi);
  double next_exponential(double mean);
};

}  // namespace relaymec
