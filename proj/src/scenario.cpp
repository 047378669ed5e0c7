#include "relaymec/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "relaymec/errors.hpp"

namespace relaymec {

void TaskSpec::check() const {
  if (!(T > 0.0)) throw DomainError("TaskSpec: T must be > 0");
  if (!(D >= 0.0)) throw DomainError("TaskSpec: D must be >= 0");
  if (!(L > 0.0)) throw DomainError("TaskSpec: L must be > 0");
}

void SystemParams::check() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw DomainError(std::string("SystemParams: ") + name + " must be > 0");
  };
  positive(W, "W");
  positive(sigma2, "sigma2");
  positive(kappa, "kappa");
  positive(fB, "fB");
  positive(eps_poly, "eps_poly");
  positive(tol_golden, "tol_golden");
  positive(tol_sca, "tol_sca");
  positive(tol_newton, "tol_newton");
  positive(tol_bisect, "tol_bisect");
  positive(mu_margin, "mu_margin");
  if (eps_poly > 1.0e-3) throw DomainError("SystemParams: eps_poly must be <= 1e-3");
}

void ChannelRealization::check() const {
  if (h.empty() || h.size() != g.size())
    throw DomainError("ChannelRealization: need N >= 1 with matching h/g");
  for (double v : h)
    if (!(v > 0.0)) throw DomainError("ChannelRealization: h gains must be > 0");
  for (double v : g)
    if (!(v > 0.0)) throw DomainError("ChannelRealization: g gains must be > 0");
}

double path_loss_db(double distance_km, double bandwidth_mhz) {
  if (!(distance_km > 0.0)) throw DomainError("path_loss_db: distance must be > 0");
  if (!(bandwidth_mhz > 0.0)) throw DomainError("path_loss_db: bandwidth must be > 0");
  return 32.4 + 20.0 * std::log10(distance_km) + 20.0 * std::log10(bandwidth_mhz);
}

std::uint64_t SplitMix64::next() {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double SplitMix64::next_unit() {
  // 53 mantissa bits; in [0, 1).
  return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

double SplitMix64::next_exponential(double mean) {
  // Inverse CDF; 1 - u stays in (0, 1] so the log is finite.
  return -mean * std::log(1.0 - next_unit());
}

namespace {
// Disjoint substream per (relay, hop): decorrelates streams by running the
// seed through one mixing round keyed with the stream index.
SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 mixer(seed ^ (0xA0761D6478BD642FULL * (index + 1)));
  return SplitMix64(mixer.next());
}

double draw_gain(std::uint64_t seed, std::uint64_t index, double dist_min_km,
                 double dist_max_km, double bandwidth_mhz) {
  SplitMix64 rng = substream(seed, index);
  const double dist = rng.next_uniform(dist_min_km, dist_max_km);
  const double fading = rng.next_exponential(0.5);
  const double pl_db = path_loss_db(dist, bandwidth_mhz);
  return std::pow(10.0, -pl_db / 10.0) * fading;
}
}  // namespace

ChannelRealization sample_channels(std::uint64_t seed, int n_relays,
                                   double dist_min_km, double dist_max_km,
                                   const SystemParams& params) {
  if (n_relays < 1) throw DomainError("sample_channels: N must be >= 1");
  if (!(dist_min_km < dist_max_km))
    throw DomainError("sample_channels: dist_min_km must be < dist_max_km");
  if (!(dist_min_km > 0.0)) throw DomainError("sample_channels: distances must be > 0");

  const double bw_mhz = params.W / 1.0e6;
  ChannelRealization ch;
  ch.h.resize(n_relays);
  ch.g.resize(n_relays);
  for (int n = 0; n < n_relays; ++n) {
    ch.h[n] = draw_gain(seed, 2ULL * n, dist_min_km, dist_max_km, bw_mhz);
    ch.g[n] = draw_gain(seed, 2ULL * n + 1, dist_min_km, dist_max_km, bw_mhz);
  }
  return ch;
}

double local_energy(const TaskSpec& task, const SystemParams& params, double d) {
  if (d < 0.0 || d > task.D)
    throw DomainError("local_energy: d must lie in [0, D]");
  const double rem = task.D - d;
  const double l3 = task.L * task.L * task.L;
  return params.kappa * l3 * rem * rem * rem / (task.T * task.T);
}

double offload_time_budget(const TaskSpec& task, const SystemParams& params,
                           double d) {
  if (d < 0.0) throw DomainError("offload_time_budget: d must be >= 0");
  const double budget = task.T - task.L * d / params.fB;
  if (budget < 0.0)
    throw DomainError("offload_time_budget: d exceeds the edge-capacity bound");
  return budget;
}

DRange d_domain(const TaskSpec& task, const SystemParams& params) {
  const double cap = (1.0 - params.mu_margin) * params.fB * task.T / task.L;
  return {0.0, std::min(task.D, cap)};
}

namespace {
using nlohmann::json;

double require_positive(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(key, "must be a number");
  const double v = j[key].get<double>();
  if (!(v > 0.0)) throw ConfigError(key, "must be > 0");
  return v;
}

double require_nonnegative(const json& j, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError(key, "must be a number");
  const double v = j[key].get<double>();
  if (!(v >= 0.0)) throw ConfigError(key, "must be >= 0");
  return v;
}

std::vector<double> read_gain_array(const json& j, const std::string& key) {
  if (!j[key].is_array()) throw ConfigError(key, "must be an array of gains");
  std::vector<double> out;
  for (const auto& v : j[key]) {
    if (!v.is_number() || !(v.get<double>() > 0.0))
      throw ConfigError(key, "entries must be numbers > 0");
    out.push_back(v.get<double>());
  }
  return out;
}
}  // namespace

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");

  static const char* known[] = {
      "W_hz", "sigma2_w_per_hz", "kappa", "fB_hz", "L_cycles_per_nat",
      "D_nats", "T_s", "N", "dist_min_km", "dist_max_km", "seed", "h", "g",
      "eps_poly", "tol_golden", "tol_sca", "tol_newton", "tol_bisect",
      "mu_margin"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
          return it.key() == k;
        }) == std::end(known))
      throw ConfigError(it.key(), "unknown config key");
  }

  Scenario sc;
  sc.params.W = require_positive(j, "W_hz", sc.params.W);
  sc.params.sigma2 = require_positive(j, "sigma2_w_per_hz", sc.params.sigma2);
  sc.params.kappa = require_positive(j, "kappa", sc.params.kappa);
  sc.params.fB = require_positive(j, "fB_hz", sc.params.fB);
  sc.params.eps_poly = require_positive(j, "eps_poly", sc.params.eps_poly);
  sc.params.tol_golden = require_positive(j, "tol_golden", sc.params.tol_golden);
  sc.params.tol_sca = require_positive(j, "tol_sca", sc.params.tol_sca);
  sc.params.tol_newton = require_positive(j, "tol_newton", sc.params.tol_newton);
  sc.params.tol_bisect = require_positive(j, "tol_bisect", sc.params.tol_bisect);
  sc.params.mu_margin = require_positive(j, "mu_margin", sc.params.mu_margin);

  sc.task.L = require_positive(j, "L_cycles_per_nat", sc.task.L);
  sc.task.D = require_nonnegative(j, "D_nats", sc.task.D);
  sc.task.T = require_positive(j, "T_s", sc.task.T);

  if (j.contains("N")) {
    if (!j["N"].is_number_integer() || j["N"].get<int>() < 1)
      throw ConfigError("N", "must be an integer >= 1");
    sc.n_relays = j["N"].get<int>();
  }
  sc.dist_min_km = require_positive(j, "dist_min_km", sc.dist_min_km);
  sc.dist_max_km = require_positive(j, "dist_max_km", sc.dist_max_km);
  if (!(sc.dist_min_km < sc.dist_max_km))
    throw ConfigError("dist_min_km", "must be < dist_max_km");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer())
      throw ConfigError("seed", "must be a nonnegative integer");
    sc.seed = j["seed"].get<std::uint64_t>();
  }

  if (j.contains("h") != j.contains("g"))
    throw ConfigError("h", "explicit channels need both h and g");
  if (j.contains("h")) {
    sc.channels.h = read_gain_array(j, "h");
    sc.channels.g = read_gain_array(j, "g");
    if (sc.channels.h.size() != sc.channels.g.size())
      throw ConfigError("g", "must have the same length as h");
    sc.n_relays = sc.channels.relay_count();
    sc.explicit_channels = true;
  } else {
    sc.channels = sample_channels(sc.seed, sc.n_relays, sc.dist_min_km,
                                  sc.dist_max_km, sc.params);
  }

  try {
    sc.task.check();
    sc.params.check();
    sc.channels.check();
  } catch (const DomainError& e) {
    throw ConfigError("<validate>", e.what());
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

void resample_channels(Scenario& sc) {
  if (sc.explicit_channels) return;
  sc.channels = sample_channels(sc.seed, sc.n_relays, sc.dist_min_km,
                                sc.dist_max_km, sc.params);
}

std::string scenario_to_json(const Scenario& sc) {
  nlohmann::json j;
  j["W_hz"] = sc.params.W;
  j["sigma2_w_per_hz"] = sc.params.sigma2;
  j["kappa"] = sc.params.kappa;
  j["fB_hz"] = sc.params.fB;
  j["L_cycles_per_nat"] = sc.task.L;
  j["D_nats"] = sc.task.D;
  j["T_s"] = sc.task.T;
  j["N"] = sc.n_relays;
  j["dist_min_km"] = sc.dist_min_km;
  j["dist_max_km"] = sc.dist_max_km;
  j["seed"] = sc.seed;
  j["eps_poly"] = sc.params.eps_poly;
  if (sc.explicit_channels) {
    j["h"] = sc.channels.h;
    j["g"] = sc.channels.g;
  }
  return j.dump();
}

}  // namespace relaymec
