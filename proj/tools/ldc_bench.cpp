// SPDX-License-Identifier: Apache-2.0
//
// ldc_bench: runs local defect-correction schemes and reproduces the
// benchmark tables.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "cli_options.hpp"
#include "ldc/ldc.h"

#ifndef LDC_FIXTURE_DIR
#define LDC_FIXTURE_DIR "fixtures"
#endif

namespace {

using namespace ldc_cli;

struct Failure {
  int code;
};

int exit_code_for(ldc_status st) {
  switch (st) {
    case LDC_ERR_CONFIG:
    case LDC_ERR_BUDGET:
    case LDC_ERR_INVALID_ARGUMENT:
    case LDC_ERR_COEFFICIENT:
    case LDC_ERR_IO:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

void check(ldc_status st, const char* context) {
  if (st == LDC_OK) return;
  std::cerr << "ldc_bench: " << context << ": " << ldc_status_string(st) << ": "
            << ldc_last_error() << '\n';
  throw Failure{exit_code_for(st)};
}

template <class T, void (*Destroy)(T*)>
struct Deleter {
  void operator()(T* p) const { Destroy(p); }
};
using Config = std::unique_ptr<ldc_config, Deleter<ldc_config, ldc_config_destroy>>;
using Result = std::unique_ptr<ldc_result, Deleter<ldc_result, ldc_result_destroy>>;
using Fixture = std::unique_ptr<ldc_fixture, Deleter<ldc_fixture, ldc_fixture_destroy>>;
using Table = std::unique_ptr<ldc_table, Deleter<ldc_table, ldc_table_destroy>>;
using Comparison =
    std::unique_ptr<ldc_comparison, Deleter<ldc_comparison, ldc_comparison_destroy>>;

[[noreturn]] void config_error(const std::string& msg) {
  std::cerr << "ldc_bench: " << msg << '\n';
  throw Failure{kExitConfig};
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string level_name(int level) {
  if (level < 0) return "H";
  if (level == 0) return "w";
  return "h" + std::to_string(level);
}

void print_run(const ldc_result* res, const std::string& title) {
  std::size_t n = 0;
  check(ldc_result_num_reports(res, &n), "reading reports");
  std::vector<ldc_level_report> reports(n);
  for (std::size_t i = 0; i < n; ++i) {
    check(ldc_result_report(res, i, &reports[i]), "reading reports");
  }

  std::printf("%s\n", title.c_str());
  std::printf("  %-5s %9s %9s %15s %12s %7s %9s\n", "level", "dof", "dof*", "lambda",
              "|err|", "order", "seconds");
  for (std::size_t i = 0; i < n; ++i) {
    const ldc_level_report& r = reports[i];
    char err[32] = "-";
    char order[32] = "-";
    if (!std::isnan(r.error)) std::snprintf(err, sizeof err, "%.3e", r.error);
    if (i >= 2) {
      // Reference-free order from three consecutive eigenvalues.
      const double d1 = reports[i - 2].lambda - reports[i - 1].lambda;
      const double d2 = reports[i - 1].lambda - r.lambda;
      if (d1 != 0.0 && d2 != 0.0 && d1 / d2 > 0.0) {
        std::snprintf(order, sizeof order, "%.2f", std::log2(d1 / d2));
      }
    }
    std::printf("  %-5s %9d %9d %15.9f %12s %7s %9.2f\n", level_name(r.level).c_str(),
                r.dof, r.dof_adjoint, r.lambda, err, order, r.seconds);
  }
  std::fflush(stdout);
}

Result run_config(const ldc_config* cfg, const std::string& title) {
  ldc_result* raw = nullptr;
  check(ldc_run(cfg, &raw), "run failed");
  Result res(raw);
  print_run(res.get(), title);
  return res;
}

void apply_overrides(ldc_config* cfg, const RunSpec& spec) {
  if (spec.s || spec.gamma) {
    // Unset values keep the domain defaults.
    const bool slit = spec.domain == "slit";
    const double def = slit ? 0.5 : 2.0 / 3.0;
    check(ldc_config_set_rates(cfg, spec.s.value_or(def), spec.gamma.value_or(def)),
          "rates");
  }
  if (spec.reference) check(ldc_config_set_reference(cfg, *spec.reference), "reference");
  check(ldc_config_set_dof_budget(cfg, spec.dof_budget), "budget");
}

void write_outputs(const RunSpec& spec, const ldc_table* table, const ldc_result* last) {
  if (!spec.out.empty()) check(ldc_table_write_csv(table, spec.out.c_str()), "writing CSV");
  if (!last) return;
  if (!spec.dump_mesh.empty()) {
    check(ldc_result_write_mesh(last, "coarse", (spec.dump_mesh + "_coarse.txt").c_str()),
          "writing mesh");
    check(ldc_result_write_mesh(last, "meso", (spec.dump_mesh + "_meso.txt").c_str()),
          "writing mesh");
  }
  if (!spec.dump_nodal.empty()) {
    check(ldc_result_write_nodal(last, spec.dump_nodal.c_str()), "writing nodal values");
  }
}

std::string fixture_dir(const RunSpec& spec) {
  if (!spec.fixtures.empty()) return spec.fixtures;
  if (const char* env = std::getenv("LDC_FIXTURES")) return env;
  return LDC_FIXTURE_DIR;
}

int run_table(RunSpec spec) {
  ldc_fixture* raw = nullptr;
  check(ldc_fixture_load(fixture_dir(spec).c_str(), *spec.table, &raw), "loading fixture");
  Fixture fx(raw);

  const char* domain = nullptr;
  double bx = 0.0, by = 0.0;
  check(ldc_fixture_problem(fx.get(), &domain, &bx, &by), "fixture");
  const std::string id = "table " + std::to_string(*spec.table);
  if (spec.has_domain && spec.domain != domain) {
    config_error(id + " is posed on " + domain + ", not " + spec.domain);
  }
  if (spec.has_b && (spec.bx != bx || spec.by != by)) {
    config_error(id + " uses a different convection vector");
  }
  spec.domain = domain;

  std::size_t num_rows = 0;
  check(ldc_fixture_num_rows(fx.get(), &num_rows), "fixture");
  std::vector<std::size_t> rows = spec.rows;
  if (rows.empty()) {
    for (std::size_t r = 0; r < num_rows; ++r) rows.push_back(r);
  }

  ldc_table* traw = nullptr;
  check(ldc_table_create(&traw), "table");
  Table table(traw);
  Result last;
  std::vector<std::size_t> kept;
  for (std::size_t r : rows) {
    if (r >= num_rows) config_error(id + " has no row " + std::to_string(r + 1));
    ldc_config* craw = nullptr;
    check(ldc_fixture_row_config(fx.get(), r, &craw), "row configuration");
    Config cfg(craw);
    if (spec.has_mode) check(ldc_config_set_mode(cfg.get(), spec.mode.c_str()), "mode");
    apply_overrides(cfg.get(), spec);
    const std::string title = id + ", row " + std::to_string(r + 1) + " (" + domain +
                              ", b=(" + num(bx) + "," + num(by) + "))";
    last = run_config(cfg.get(), title);
    check(ldc_table_append(table.get(), last.get()), "table");
    kept.push_back(r);
  }
  write_outputs(spec, table.get(), last.get());

  ldc_comparison* cmp_raw = nullptr;
  check(ldc_table_compare(table.get(), fx.get(), kept.data(), kept.size(), spec.tol, &cmp_raw),
        "comparing with fixture");
  Comparison cmp(cmp_raw);
  int passed = 0;
  double max_diff = 0.0;
  std::size_t failures = 0;
  check(ldc_comparison_passed(cmp.get(), &passed), "comparison");
  check(ldc_comparison_max_diff(cmp.get(), &max_diff), "comparison");
  check(ldc_comparison_num_failures(cmp.get(), &failures), "comparison");
  for (std::size_t i = 0; i < failures; ++i) {
    const char* text = nullptr;
    check(ldc_comparison_failure(cmp.get(), i, &text), "comparison");
    std::printf("  mismatch: %s\n", text);
  }
  std::printf("%s: %s (max |diff| %.2e, tol %.1e)\n", id.c_str(), passed ? "PASS" : "FAIL",
              max_diff, spec.tol);
  return passed ? kExitPass : kExitCompareFail;
}

int run_single(const RunSpec& spec) {
  ldc_config* raw = nullptr;
  check(ldc_config_create(&raw), "configuration");
  Config cfg(raw);
  check(ldc_config_set_domain(cfg.get(), spec.domain.c_str()), "domain");
  check(ldc_config_set_convection(cfg.get(), spec.bx, spec.by), "convection");
  check(ldc_config_set_coarse(cfg.get(), spec.coarse_n), "coarse mesh");
  check(ldc_config_set_levels(cfg.get(), spec.levels), "levels");
  check(ldc_config_set_mode(cfg.get(), spec.mode.c_str()), "mode");
  double ref = 0.0;
  if (!spec.reference &&
      ldc_reference_lambda(spec.domain.c_str(), spec.bx, spec.by, &ref) == LDC_OK) {
    check(ldc_config_set_reference(cfg.get(), ref), "reference");
  }
  apply_overrides(cfg.get(), spec);

  int meso = 0;
  check(ldc_config_meso_n(cfg.get(), &meso), "schedule");
  const std::string title = spec.domain + ", b=(" + num(spec.bx) + "," + num(spec.by) + "), H=1/" +
                            std::to_string(spec.coarse_n) + ", w=1/" +
                            std::to_string(meso) + ", " + spec.mode;
  Result res = run_config(cfg.get(), title);

  ldc_table* traw = nullptr;
  check(ldc_table_create(&traw), "table");
  Table table(traw);
  check(ldc_table_append(table.get(), res.get()), "table");
  write_outputs(spec, table.get(), res.get());
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  const ParseOutcome parsed = parse_cli(argc, argv, std::cout, std::cerr);
  if (!parsed.spec) return parsed.exit_code;
  try {
    return parsed.spec->table ? run_table(*parsed.spec) : run_single(*parsed.spec);
  } catch (const Failure& f) {
    return f.code;
  }
}
