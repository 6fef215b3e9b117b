// SPDX-License-Identifier: Apache-2.0

#include "cli_options.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

#include "CLI11.hpp"

namespace ldc_cli {

namespace {

const std::vector<std::string> kDomains{"lshape", "slit", "square"};
const std::vector<std::string> kModes{"two-grid", "three-level", "multilevel",
                                      "parallel", "symmetric"};

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size() || !std::isfinite(v)) return {};
  return v;
}

std::vector<std::size_t> parse_rows(const std::string& text) {
  std::vector<std::size_t> rows;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = std::min(text.find(',', start), text.size());
    const std::string_view item(text.data() + start, comma - start);
    int r = 0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), r);
    if (ec != std::errc{} || p != item.data() + item.size() || r < 1) {
      throw CLI::ValidationError("--rows", "expected 1-based row numbers like 1,2");
    }
    rows.push_back(static_cast<std::size_t>(r - 1));
    start = comma + 1;
  }
  return rows;
}

}  // namespace

std::optional<int> parse_fraction(const std::string& text) {
  if (text.size() < 3 || text.compare(0, 2, "1/") != 0) return {};
  int n = 0;
  const char* first = text.data() + 2;
  const char* last = text.data() + text.size();
  const auto [p, ec] = std::from_chars(first, last, n);
  if (ec != std::errc{} || p != last || n <= 0) return {};
  return n;
}

std::optional<std::pair<double, double>> parse_vector(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return {};
  const auto x = to_double(std::string_view(text).substr(0, comma));
  const auto y = to_double(std::string_view(text).substr(comma + 1));
  if (!x || !y) return {};
  return std::pair{*x, *y};
}

ParseOutcome parse_cli(int argc, const char* const* argv, std::ostream& out,
                       std::ostream& err) {
  CLI::App app{"Local defect-correction eigenvalue benchmarks", "ldc_bench"};
  app.set_config("--config", "", "Read options from a key = value file");
  app.get_config_ptr()->configurable(false);

  RunSpec spec;
  std::string b_text, h_text, rows_text;
  auto* domain = app.add_option("--domain", spec.domain, "Domain")
                     ->check(CLI::IsMember(kDomains));
  auto* b = app.add_option("--b", b_text, "Convection vector X,Y")->delimiter('\0');
  auto* h = app.add_option("--H", h_text, "Coarse mesh width as 1/N");
  auto* levels = app.add_option("--levels", spec.levels, "Number of local levels")
                     ->check(CLI::Range(0, 17));
  auto* mode = app.add_option("--mode", spec.mode, "Scheme variant")
                   ->check(CLI::IsMember(kModes));
  auto* table = app.add_option("--table", spec.table, "Reproduce a benchmark table")
                    ->check(CLI::Range(1, 8));
  app.add_option("--rows", rows_text, "Table rows to run, e.g. 1,2 (default all)")
      ->needs(table);
  app.add_option("--fixtures", spec.fixtures, "Directory holding tableK.txt");
  app.add_option("--tol", spec.tol, "Fixture tolerance")->check(CLI::PositiveNumber);
  app.add_option("--out", spec.out, "CSV output path");
  app.add_option("--s", spec.s, "Regularity exponent s")->check(CLI::Range(0.0, 1.0));
  app.add_option("--gamma", spec.gamma, "Rate exponent gamma")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--reference", spec.reference, "Reference eigenvalue for errors");
  app.add_option("--dof-budget", spec.dof_budget, "Abort plans above this many DOFs")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--dump-mesh", spec.dump_mesh, "Write PREFIX_coarse.txt and PREFIX_meso.txt");
  app.add_option("--dump-nodal", spec.dump_nodal, "Write x y u u_star per vertex");

  if (argc <= 1) {
    out << app.help();
    return {std::nullopt, kExitConfig};
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return {std::nullopt, kExitPass};
  } catch (const CLI::ParseError& e) {
    err << "ldc_bench: " << e.what() << '\n';
    return {std::nullopt, kExitConfig};
  }

  const auto config_error = [&](const std::string& msg) {
    err << "ldc_bench: " << msg << '\n';
    return ParseOutcome{std::nullopt, kExitConfig};
  };
  if (b->count() > 0) {
    const auto v = parse_vector(b_text);
    if (!v) return config_error("--b expects X,Y, got '" + b_text + "'");
    std::tie(spec.bx, spec.by) = *v;
  }
  if (h->count() > 0) {
    const auto n = parse_fraction(h_text);
    if (!n) return config_error("--H expects a fraction 1/N, got '" + h_text + "'");
    spec.coarse_n = *n;
  }
  if (!rows_text.empty()) {
    try {
      spec.rows = parse_rows(rows_text);
    } catch (const CLI::ValidationError& e) {
      return config_error(e.what());
    }
  }
  spec.has_domain = domain->count() > 0;
  spec.has_b = b->count() > 0;
  spec.has_h = h->count() > 0;
  spec.has_levels = levels->count() > 0;
  spec.has_mode = mode->count() > 0;
  if (spec.table && (spec.has_levels || spec.has_h)) {
    return config_error("--H and --levels come from the table; select rows with --rows");
  }
  return {spec, kExitPass};
}

}  // namespace ldc_cli
