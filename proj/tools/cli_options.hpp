// SPDX-License-Identifier: Apache-2.0
//
// Command-line parsing for ldc_bench.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ldc_cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitCompareFail = 1,
  kExitConfig = 2,
  kExitRuntime = 3,
};

struct RunSpec {
  std::string domain = "lshape";
  double bx = 0.0;
  double by = 0.0;
  int coarse_n = 16;
  int levels = 3;
  std::string mode = "multilevel";
  std::optional<double> s;
  std::optional<double> gamma;
  std::optional<double> reference;
  std::int64_t dof_budget = 0;

  std::optional<int> table;
  std::vector<std::size_t> rows;  // 0-based; empty selects every row
  std::string fixtures;
  double tol = 5e-3;

  std::string out;
  std::string dump_mesh;   // prefix; writes PREFIX_coarse.txt and PREFIX_meso.txt
  std::string dump_nodal;

  // Which problem fields were given explicitly (flag or config file).
  bool has_domain = false;
  bool has_b = false;
  bool has_h = false;
  bool has_levels = false;
  bool has_mode = false;
};

struct ParseOutcome {
  std::optional<RunSpec> spec;  // empty when the program should exit
  int exit_code = kExitPass;
};

/// Parses "1/N" with N a positive integer.
std::optional<int> parse_fraction(const std::string& text);
/// Parses "X,Y".
std::optional<std::pair<double, double>> parse_vector(const std::string& text);

/// Usage and help go to `out`, diagnostics to `err`.
ParseOutcome parse_cli(int argc, const char* const* argv, std::ostream& out,
                       std::ostream& err);

}  // namespace ldc_cli
