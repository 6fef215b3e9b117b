// SPDX-License-Identifier: Apache-2.0
//
// Benchmark tables: fixture files with the published eigenvalue tables,
// CSV emission of computed rows and cell-by-cell comparison.

#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ldc/scheme.hpp"

namespace ldc {

/// Cells of one table row: lambda_H, lambda^w, lambda^{w,h_1..6}.
inline constexpr int kTableCells = 8;
inline constexpr std::array<const char*, kTableCells> kCellNames{
    "lambda_H",   "lambda_w",   "lambda_wh1", "lambda_wh2",
    "lambda_wh3", "lambda_wh4", "lambda_wh5", "lambda_wh6"};

struct TableRow {
  int dof_h = 0;
  int dof_w = 0;
  std::array<std::optional<double>, kTableCells> cells;

  /// Number of populated local levels.
  int levels() const;
};

struct FixtureRow {
  int coarse_n = 0;
  TableRow row;
  std::array<std::string, kTableCells> text;  // verbatim cell text, "-" if absent
};

struct FixtureTable {
  int id = 0;
  DomainSpec domain;
  double bx = 0.0;
  double by = 0.0;
  SchemeMode mode = SchemeMode::Multilevel;
  std::vector<FixtureRow> rows;
};

/// Parses the plain-text fixture format:
///   table K / domain NAME / b X Y / mode NAME / row 1/N DOF_H DOF_W c1..c8
FixtureTable parse_fixture(std::istream& in);
/// Reads DIR/tableK.txt.
FixtureTable load_fixture(const std::string& dir, int id);

/// Scheme configuration reproducing one fixture row.
SchemeConfig fixture_config(const FixtureTable& table, std::size_t row);

/// Surrogate exact eigenvalue used for error columns, for the benchmark
/// problems only.
std::optional<double> reference_lambda(DomainKind domain, double bx, double by);

TableRow table_row(const SchemeResult& result);

/// Header DOF_H,DOF_w,lambda_H,...,lambda_wh6; eigenvalues with 5 decimals;
/// absent cells empty.
void write_csv(const std::vector<TableRow>& rows, std::ostream& out);
std::vector<TableRow> read_csv(std::istream& in);

struct CellDiff {
  std::size_t row = 0;
  std::string column;
  double computed = 0.0;
  double expected = 0.0;
  double diff = 0.0;
};

struct Comparison {
  bool pass = true;
  double max_diff = 0.0;
  std::vector<CellDiff> failures;
};

/// Passes iff every populated cell agrees within `tol` and every DOF column
/// matches exactly. Throws ErrorCode::Shape when the populated cells differ.
Comparison compare_fixture(const std::vector<TableRow>& computed,
                           const FixtureTable& fixture, double tol = 5e-3,
                           const std::vector<std::size_t>& rows = {});

}  // namespace ldc
