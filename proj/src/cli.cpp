#include "relaymec/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <omp.h>

#include "json.hpp"
#include "relaymec/af.hpp"
#include "relaymec/baselines.hpp"
#include "relaymec/errors.hpp"
#include "relaymec/fdma.hpp"
#include "relaymec/scenario.hpp"
#include "relaymec/tdma.hpp"
#include "relaymec/validation.hpp"

namespace relaymec::cli {

namespace {
using nlohmann::json;

const std::vector<std::string> kModeOrder = {"tdma", "fdma", "af", "equal"};

bool valid_mode(const std::string& m) {
  return std::find(kModeOrder.begin(), kModeOrder.end(), m) != kModeOrder.end();
}

void emit_error(std::ostream& err, const std::string& field,
                const std::string& message) {
  json e;
  e["error"] = {{"field", field}, {"message", message}};
  err << e.dump() << "\n";
}

Scenario load_with_seed(const std::string& path,
                        const std::optional<std::uint64_t>& seed) {
  Scenario sc = load_scenario(path);
  if (seed) {
    sc.seed = *seed;
    resample_channels(sc);
  }
  return sc;
}

void write_output(const std::string& path, std::ostream& fallback,
                  const std::string& text) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("--out", "cannot open " + path + " for writing");
  out << text;
}

struct ModeRun {
  double d = 0.0;
  double energy = 0.0;
  int iters = 0;
  double gap = 0.0;
  json solution;
};

ModeRun run_mode(const std::string& mode, const Scenario& sc) {
  ModeRun r;
  if (mode == "tdma" || mode == "fdma") {
    const TdmaSolution tdma = solve_tdma(sc.task, sc.channels, sc.params);
    if (mode == "tdma") {
      r.d = tdma.d;
      r.energy = tdma.total_energy;
      r.iters = tdma.golden_evaluations;
      r.solution = {{"d_nats", tdma.d},
                    {"total_energy_j", tdma.total_energy},
                    {"U_j", tdma.U},
                    {"snr_common", tdma.snr_common},
                    {"active_relay", tdma.active_relay},
                    {"E_j", tdma.E},
                    {"t_s", tdma.t},
                    {"P_w", tdma.P},
                    {"Q_w", tdma.Q}};
    } else {
      const FdmaSolution fdma = map_tdma_to_fdma(tdma, sc.task, sc.params);
      r.d = fdma.d;
      r.energy = fdma.total_energy;
      r.iters = tdma.golden_evaluations;
      r.solution = {{"d_nats", fdma.d},
                    {"total_energy_j", fdma.total_energy},
                    {"t_s", fdma.t},
                    {"active_relay", fdma.active_relay},
                    {"w_hz", fdma.w},
                    {"P_w", fdma.P},
                    {"Q_w", fdma.Q}};
    }
  } else if (mode == "af") {
    const AfSolution af = solve_af_polyblock(sc.task, sc.channels, sc.params);
    r.d = af.d;
    r.energy = af.total_energy;
    r.iters = af.poly_iterations;
    r.gap = af.poly_gap;
    r.solution = {{"d_nats", af.d},
                  {"total_energy_j", af.total_energy},
                  {"t_s", af.t},
                  {"P_w", af.P},
                  {"beta", af.beta},
                  {"poly_gap", af.poly_gap},
                  {"used_grid_fallback", af.used_grid_fallback},
                  {"sca_trace", af.sca_trace}};
  } else if (mode == "equal") {
    const EqualAllocSolution eq = solve_equal_alloc(sc.task, sc.channels, sc.params);
    r.d = eq.d;
    r.energy = eq.total_energy;
    r.iters = eq.evaluations;
    r.solution = {{"d_nats", eq.d},
                  {"total_energy_j", eq.total_energy},
                  {"slot_s", eq.slot},
                  {"lambda", eq.lambda},
                  {"E_j", eq.E},
                  {"used_grid_fallback", eq.used_grid_fallback}};
  } else {
    throw ConfigError("--mode", "unknown mode '" + mode + "'");
  }
  return r;
}

Scenario swept_scenario(const Scenario& base, const std::string& param, double v) {
  Scenario sc = base;
  if (param == "D")
    sc.task.D = v;
  else if (param == "T")
    sc.task.T = v;
  else if (param == "fB")
    sc.params.fB = v;
  else
    throw ConfigError("--param", "unknown sweep parameter '" + param + "'");
  sc.task.check();
  sc.params.check();
  return sc;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int run_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err) {
  Scenario sc;
  try {
    if (!valid_mode(opt.mode))
      throw ConfigError("--mode", "unknown mode '" + opt.mode + "'");
    sc = load_with_seed(opt.config_path, opt.seed);
  } catch (const ConfigError& e) {
    emit_error(err, e.field(), e.what());
    return kExitUsage;
  }
  try {
    const ModeRun r = run_mode(opt.mode, sc);
    json doc;
    doc["mode"] = opt.mode;
    doc["config"] = json::parse(scenario_to_json(sc));
    doc["total_energy_j"] = r.energy;
    doc["d_opt_nats"] = r.d;
    doc["solution"] = r.solution;
    write_output(opt.out, out, doc.dump(2) + "\n");
    return kExitOk;
  } catch (const ConfigError& e) {
    emit_error(err, e.field(), e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    emit_error(err, "<solver>", e.what());
    return kExitSolver;
  }
}

int run_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err) {
  Scenario base;
  std::vector<std::string> modes;
  try {
    if (!(opt.from < opt.to))
      throw ConfigError("--from", "sweep needs from < to");
    if (opt.steps < 2) throw ConfigError("--steps", "sweep needs steps >= 2");
    for (const auto& m : opt.modes) {
      if (!valid_mode(m)) throw ConfigError("--modes", "unknown mode '" + m + "'");
    }
    // Canonical mode order regardless of how the flag was spelled.
    for (const auto& m : kModeOrder)
      if (std::find(opt.modes.begin(), opt.modes.end(), m) != opt.modes.end())
        modes.push_back(m);
    base = load_with_seed(opt.config_path, opt.seed);
    swept_scenario(base, opt.param, opt.from);  // validates the parameter name
  } catch (const ConfigError& e) {
    emit_error(err, e.field(), e.what());
    return kExitUsage;
  }

  struct Row {
    std::string mode;
    double value;
    bool ok = false;
    ModeRun run;
    double runtime_s = 0.0;
    std::string error;
  };
  const int points = opt.steps;
  std::vector<Row> rows(modes.size() * points);
  for (std::size_t m = 0; m < modes.size(); ++m)
    for (int i = 0; i < points; ++i) {
      rows[m * points + i].mode = modes[m];
      rows[m * points + i].value =
          opt.from + (opt.to - opt.from) * i / (points - 1);
    }

  // Grid points are independent; rows are ordered afterwards, so the
  // schedule does not leak into the output.
  const auto total = static_cast<std::int64_t>(rows.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < total; ++k) {
    Row& row = rows[k];
    const auto start = std::chrono::steady_clock::now();
    try {
      const Scenario sc = swept_scenario(base, opt.param, row.value);
      row.run = run_mode(row.mode, sc);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    row.runtime_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  }

  std::ostringstream text;
  bool any_failed = false;
  if (opt.format == "json") {
    json arr = json::array();
    for (const Row& row : rows) {
      if (!row.ok) {
        any_failed = true;
        continue;
      }
      arr.push_back({{"mode", row.mode},
                     {"param", opt.param},
                     {"value", row.value},
                     {"d_opt_nats", row.run.d},
                     {"energy_j", row.run.energy},
                     {"iters", row.run.iters},
                     {"gap", row.run.gap},
                     {"runtime_s", row.runtime_s}});
    }
    json doc;
    doc["config"] = json::parse(scenario_to_json(base));
    doc["rows"] = arr;
    if (any_failed) {
      json failures = json::array();
      for (const Row& row : rows)
        if (!row.ok)
          failures.push_back(
              {{"mode", row.mode}, {"value", row.value}, {"error", row.error}});
      doc["failures"] = failures;
    }
    text << doc.dump(2) << "\n";
  } else if (opt.format == "csv") {
    text << "# relaymec sweep param=" << opt.param << "\n";
    text << "# config " << scenario_to_json(base) << "\n";
    text << "mode,param,value,d_opt_nats,energy_j,iters,gap,runtime_s\n";
    for (const Row& row : rows) {
      if (!row.ok) {
        any_failed = true;
        continue;
      }
      text << row.mode << ',' << opt.param << ',' << format_double(row.value)
           << ',' << format_double(row.run.d) << ','
           << format_double(row.run.energy) << ',' << row.run.iters << ','
           << format_double(row.run.gap) << ',' << format_double(row.runtime_s)
           << "\n";
    }
    for (const Row& row : rows)
      if (!row.ok)
        text << "# FAILED mode=" << row.mode
             << " value=" << format_double(row.value) << " error=" << row.error
             << "\n";
  } else {
    emit_error(err, "--format", "unknown format '" + opt.format + "'");
    return kExitUsage;
  }

  try {
    write_output(opt.out, out, text.str());
  } catch (const ConfigError& e) {
    emit_error(err, e.field(), e.what());
    return kExitUsage;
  }
  return any_failed ? kExitSolver : kExitOk;
}

int run_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err) {
  Scenario sc;
  try {
    sc = load_with_seed(opt.config_path, opt.seed);
  } catch (const ConfigError& e) {
    emit_error(err, e.field(), e.what());
    return kExitUsage;
  }

  struct Entry {
    std::string mode;
    bool ok = false;
    ModeRun run;
    std::string error;
  };
  std::vector<Entry> entries;
  for (const auto& mode : kModeOrder) {
    Entry e;
    e.mode = mode;
    try {
      e.run = run_mode(mode, sc);
      e.ok = true;
    } catch (const std::exception& ex) {
      e.error = ex.what();
    }
    entries.push_back(std::move(e));
  }

  std::vector<const Entry*> ranked;
  for (const Entry& e : entries)
    if (e.ok) ranked.push_back(&e);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Entry* a, const Entry* b) {
                     return a->run.energy < b->run.energy;
                   });

  out << "# config " << scenario_to_json(sc) << "\n";
  out << "rank,mode,energy_j,d_opt_nats\n";
  for (std::size_t i = 0; i < ranked.size(); ++i)
    out << (i + 1) << ',' << ranked[i]->mode << ','
        << format_double(ranked[i]->run.energy) << ','
        << format_double(ranked[i]->run.d) << "\n";

  auto find = [&](const std::string& m) -> const Entry* {
    for (const Entry& e : entries)
      if (e.mode == m && e.ok) return &e;
    return nullptr;
  };
  const Entry* tdma = find("tdma");
  const Entry* fdma = find("fdma");
  const Entry* af = find("af");
  const Entry* equal = find("equal");
  if (tdma && fdma) {
    const double rel = std::abs(tdma->run.energy - fdma->run.energy) /
                       std::max(tdma->run.energy, 1.0e-300);
    if (rel > 1.0e-9)
      out << "# note: tdma and fdma energies differ by " << format_double(rel)
          << " relative\n";
  }
  if (tdma && equal && equal->run.energy < tdma->run.energy)
    out << "# note: equal allocation beat optimized tdma (unexpected)\n";
  if (af && tdma && af->run.energy > tdma->run.energy)
    out << "# note: af above tdma on this realization\n";

  bool any_failed = false;
  for (const Entry& e : entries)
    if (!e.ok) {
      any_failed = true;
      out << "# FAILED mode=" << e.mode << " error=" << e.error << "\n";
    }
  return any_failed ? kExitSolver : kExitOk;
}

int run_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err) {
  Scenario sc;
  try {
    sc = load_with_seed(opt.config_path, opt.seed);
    const auto names = suite_names();
    if (std::find(names.begin(), names.end(), opt.suite) == names.end())
      throw ConfigError("--suite", "unknown suite '" + opt.suite + "'");
  } catch (const ConfigError& e) {
    emit_error(err, e.field(), e.what());
    return kExitUsage;
  }
  try {
    const SuiteReport rep = run_suite(opt.suite, sc);
    write_output(opt.out, out, rep.detail_json + "\n");
    return rep.passed ? kExitOk : kExitValidation;
  } catch (const std::exception& e) {
    emit_error(err, "<validate>", e.what());
    return kExitSolver;
  }
}

}  // namespace relaymec::cli
