#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace relaymec::cli {

// Exit codes shared by every command.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitValidation = 3;

struct SolveOptions {
  std::string config_path;
  std::string mode = "tdma";  // tdma | fdma | af | equal
  std::optional<std::uint64_t> seed;
  std::string out;  // empty -> stdout
};

struct SweepOptions {
  std::string config_path;
  std::string param;  // D | T | fB
  double from = 0.0;
  double to = 0.0;
  int steps = 2;
  std::vector<std::string> modes = {"tdma", "fdma", "af", "equal"};
  std::optional<std::uint64_t> seed;
  std::string out;            // empty -> stdout
  std::string format = "csv"; // csv | json
};

struct CompareOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
};

struct ValidateOptions {
  std::string config_path;
  std::string suite;
  std::optional<std::uint64_t> seed;
  std::string out;  // empty -> stdout
};

int run_solve(const SolveOptions& opt, std::ostream& out, std::ostream& err);
int run_sweep(const SweepOptions& opt, std::ostream& out, std::ostream& err);
int run_compare(const CompareOptions& opt, std::ostream& out, std::ostream& err);
int run_validate(const ValidateOptions& opt, std::ostream& out, std::ostream& err);

/// Shortest round-trip decimal via std::to_chars; keeps output byte-stable.
std::string format_double(double v);

}  // namespace relaymec::cli
