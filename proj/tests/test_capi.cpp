// SPDX-License-Identifier: Apache-2.0
//
// Exercises the shared library through its C header only.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "ldc/ldc.h"

#ifndef LDC_FIXTURE_DIR
#define LDC_FIXTURE_DIR "fixtures"
#endif

namespace {

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("status strings and backend") {
  CHECK(std::string(ldc_status_string(LDC_OK)) == "ok");
  CHECK(std::string(ldc_status_string(LDC_ERR_BUDGET)) == "budget exceeded");
  CHECK(std::string(ldc_solver_backend()).find("COLAMD") != std::string::npos);
}

TEST_CASE("null handles are rejected") {
  CHECK(ldc_config_create(nullptr) == LDC_ERR_INVALID_ARGUMENT);
  CHECK(std::string(ldc_last_error()).find("null") != std::string::npos);
  CHECK(ldc_config_set_domain(nullptr, "lshape") == LDC_ERR_INVALID_ARGUMENT);
  CHECK(ldc_run(nullptr, nullptr) == LDC_ERR_INVALID_ARGUMENT);
  ldc_config_destroy(nullptr);
  ldc_result_destroy(nullptr);
}

TEST_CASE("configuration errors map to status codes") {
  ldc_config* cfg = nullptr;
  REQUIRE(ldc_config_create(&cfg) == LDC_OK);
  CHECK(ldc_config_set_domain(cfg, "torus") == LDC_ERR_CONFIG);
  CHECK(ldc_config_set_mode(cfg, "sideways") == LDC_ERR_CONFIG);
  CHECK(ldc_config_set_rates(cfg, 0.0, 0.5) == LDC_ERR_CONFIG);
  CHECK(ldc_config_set_convection(cfg, NAN, 0.0) == LDC_ERR_COEFFICIENT);
  CHECK(ldc_config_set_coarse(cfg, 24) == LDC_OK);
  int meso = 0;
  CHECK(ldc_config_meso_n(cfg, &meso) == LDC_ERR_CONFIG);
  CHECK(ldc_config_set_coarse(cfg, 64) == LDC_OK);
  CHECK(ldc_config_set_dof_budget(cfg, 1000) == LDC_OK);
  ldc_result* res = nullptr;
  CHECK(ldc_run(cfg, &res) == LDC_ERR_BUDGET);
  CHECK(res == nullptr);
  CHECK(ldc_config_set_mode(cfg, "symmetric") == LDC_OK);
  CHECK(ldc_config_set_convection(cfg, 0.0, 3.0) == LDC_OK);
  CHECK(ldc_config_set_dof_budget(cfg, 0) == LDC_OK);
  CHECK(ldc_run(cfg, &res) == LDC_ERR_CONFIG);
  ldc_config_destroy(cfg);
}

TEST_CASE("run, inspect and dump") {
  ldc_config* cfg = nullptr;
  REQUIRE(ldc_config_create(&cfg) == LDC_OK);
  REQUIRE(ldc_config_set_domain(cfg, "slit") == LDC_OK);
  REQUIRE(ldc_config_set_convection(cfg, 1.0, 1.0) == LDC_OK);
  REQUIRE(ldc_config_set_coarse(cfg, 16) == LDC_OK);
  REQUIRE(ldc_config_set_levels(cfg, 2) == LDC_OK);
  double ref = 0.0;
  REQUIRE(ldc_reference_lambda("slit", 1.0, 1.0, &ref) == LDC_OK);
  CHECK(ref == 8.871);
  CHECK(ldc_reference_lambda("square", 1.0, 1.0, &ref) == LDC_ERR_INVALID_ARGUMENT);
  REQUIRE(ldc_config_set_reference(cfg, 8.871) == LDC_OK);
  int meso = 0;
  REQUIRE(ldc_config_meso_n(cfg, &meso) == LDC_OK);
  CHECK(meso == 32);

  ldc_result* res = nullptr;
  REQUIRE(ldc_run(cfg, &res) == LDC_OK);
  size_t n = 0;
  REQUIRE(ldc_result_num_reports(res, &n) == LDC_OK);
  CHECK(n == 4);
  ldc_level_report r{};
  REQUIRE(ldc_result_report(res, 0, &r) == LDC_OK);
  CHECK(r.level == -1);
  CHECK(r.dof == 945);
  CHECK(std::abs(r.lambda - 9.06244) <= 5e-3);
  CHECK(r.error == doctest::Approx(std::abs(r.lambda - 8.871)));
  REQUIRE(ldc_result_report(res, 3, &r) == LDC_OK);
  CHECK(r.level == 2);
  CHECK(ldc_result_report(res, 4, &r) == LDC_ERR_INVALID_ARGUMENT);
  int dof_h = 0, dof_w = 0;
  REQUIRE(ldc_result_dofs(res, &dof_h, &dof_w) == LDC_OK);
  CHECK(dof_h == 945);
  CHECK(dof_w == 3937);

  const std::string mesh_path = temp_path("ldc_capi_mesh.txt");
  const std::string nodal_path = temp_path("ldc_capi_nodal.txt");
  CHECK(ldc_result_write_mesh(res, "meso", mesh_path.c_str()) == LDC_OK);
  CHECK(ldc_result_write_mesh(res, "fine", mesh_path.c_str()) == LDC_ERR_INVALID_ARGUMENT);
  CHECK(ldc_result_write_mesh(res, "coarse", "/nonexistent/dir/m.txt") == LDC_ERR_IO);
  CHECK(ldc_result_write_nodal(res, nodal_path.c_str()) == LDC_OK);
  std::ifstream mesh(mesh_path);
  std::size_t nv = 0, nt = 0;
  mesh >> nv >> nt;
  CHECK(nv == 65 * 65);
  CHECK(nt == 2 * 64 * 64);
  std::ifstream nodal(nodal_path);
  std::string header;
  std::getline(nodal, header);
  CHECK(header == "# x y u u_star");
  double x, y, u, us;
  int rows = 0;
  while (nodal >> x >> y >> u >> us) ++rows;
  CHECK(rows > 3937);
  std::filesystem::remove(mesh_path);
  std::filesystem::remove(nodal_path);

  ldc_table* table = nullptr;
  REQUIRE(ldc_table_create(&table) == LDC_OK);
  REQUIRE(ldc_table_append(table, res) == LDC_OK);
  const std::string csv = temp_path("ldc_capi.csv");
  REQUIRE(ldc_table_write_csv(table, csv.c_str()) == LDC_OK);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line.rfind("945,3937,", 0) == 0);
  std::filesystem::remove(csv);

  ldc_table_destroy(table);
  ldc_result_destroy(res);
  ldc_config_destroy(cfg);
}

TEST_CASE("fixture comparison through the C API") {
  ldc_fixture* fx = nullptr;
  CHECK(ldc_fixture_load("/nonexistent", 1, &fx) == LDC_ERR_IO);
  REQUIRE(ldc_fixture_load(LDC_FIXTURE_DIR, 4, &fx) == LDC_OK);
  size_t rows = 0;
  REQUIRE(ldc_fixture_num_rows(fx, &rows) == LDC_OK);
  CHECK(rows == 3);
  const char* domain = nullptr;
  double bx = 0, by = 0;
  REQUIRE(ldc_fixture_problem(fx, &domain, &bx, &by) == LDC_OK);
  CHECK(std::string(domain) == "slit");
  CHECK(bx == 1.0);
  CHECK(by == 1.0);

  ldc_config* cfg = nullptr;
  REQUIRE(ldc_fixture_row_config(fx, 0, &cfg) == LDC_OK);
  CHECK(ldc_fixture_row_config(fx, 7, &cfg) == LDC_ERR_CONFIG);
  ldc_result* res = nullptr;
  REQUIRE(ldc_run(cfg, &res) == LDC_OK);
  ldc_table* table = nullptr;
  REQUIRE(ldc_table_create(&table) == LDC_OK);
  REQUIRE(ldc_table_append(table, res) == LDC_OK);

  const size_t selected[] = {0};
  ldc_comparison* cmp = nullptr;
  REQUIRE(ldc_table_compare(table, fx, selected, 1, 5e-3, &cmp) == LDC_OK);
  int passed = 0;
  double diff = 1.0;
  size_t failures = 9;
  REQUIRE(ldc_comparison_passed(cmp, &passed) == LDC_OK);
  REQUIRE(ldc_comparison_max_diff(cmp, &diff) == LDC_OK);
  REQUIRE(ldc_comparison_num_failures(cmp, &failures) == LDC_OK);
  CHECK(passed == 1);
  CHECK(diff <= 5e-3);
  CHECK(failures == 0);
  ldc_comparison_destroy(cmp);

  REQUIRE(ldc_table_compare(table, fx, selected, 1, 1e-9, &cmp) == LDC_OK);
  REQUIRE(ldc_comparison_passed(cmp, &passed) == LDC_OK);
  REQUIRE(ldc_comparison_num_failures(cmp, &failures) == LDC_OK);
  CHECK(passed == 0);
  CHECK(failures > 0);
  const char* text = nullptr;
  REQUIRE(ldc_comparison_failure(cmp, 0, &text) == LDC_OK);
  CHECK(std::string(text).find("row 1") == 0);
  CHECK(ldc_comparison_failure(cmp, failures, &text) == LDC_ERR_INVALID_ARGUMENT);
  ldc_comparison_destroy(cmp);

  CHECK(ldc_table_compare(table, fx, nullptr, 0, 5e-3, &cmp) == LDC_ERR_SHAPE);

  ldc_table_destroy(table);
  ldc_result_destroy(res);
  ldc_config_destroy(cfg);
  ldc_fixture_destroy(fx);
}
