// SPDX-License-Identifier: Apache-2.0

#include "ldc/bench.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "ldc/error.hpp"

namespace ldc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& s, const char* what) {
  std::size_t pos = 0;
  int v = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size()) {
    fail(ErrorCode::Io, std::string("malformed ") + what + ": '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, const char* what) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size() || !std::isfinite(v)) {
    fail(ErrorCode::Io, std::string("malformed ") + what + ": '" + s + "'");
  }
  return v;
}

DomainSpec parse_domain(const std::string& name) {
  if (name == "lshape") return DomainSpec::lshape();
  if (name == "slit") return DomainSpec::slit();
  fail(ErrorCode::Io, "unknown fixture domain '" + name + "'");
}

}  // namespace

int TableRow::levels() const {
  int n = 0;
  for (int k = 2; k < kTableCells; ++k) {
    if (cells[k]) n = k - 1;
  }
  return n;
}

FixtureTable parse_fixture(std::istream& in) {
  FixtureTable t;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    std::vector<std::string> args;
    for (std::string a; ls >> a;) args.push_back(a);
    const auto need = [&](std::size_t n) {
      if (args.size() != n) {
        fail(ErrorCode::Io, "fixture line " + std::to_string(line_no) + ": '" +
                                key + "' expects " + std::to_string(n) + " fields");
      }
    };
    if (key == "table") {
      need(1);
      t.id = parse_int(args[0], "table id");
    } else if (key == "domain") {
      need(1);
      t.domain = parse_domain(args[0]);
    } else if (key == "b") {
      need(2);
      t.bx = parse_double(args[0], "b");
      t.by = parse_double(args[1], "b");
    } else if (key == "mode") {
      need(1);
      const auto m = parse_mode(args[0]);
      if (!m) fail(ErrorCode::Io, "unknown fixture mode '" + args[0] + "'");
      t.mode = *m;
    } else if (key == "row") {
      need(3 + kTableCells);
      FixtureRow r;
      if (args[0].rfind("1/", 0) != 0) fail(ErrorCode::Io, "H must be written 1/N");
      r.coarse_n = parse_int(args[0].substr(2), "H");
      r.row.dof_h = parse_int(args[1], "DOF_H");
      r.row.dof_w = parse_int(args[2], "DOF_w");
      for (int k = 0; k < kTableCells; ++k) {
        r.text[k] = args[3 + k];
        if (r.text[k] != "-") r.row.cells[k] = parse_double(r.text[k], "eigenvalue");
      }
      t.rows.push_back(std::move(r));
    } else {
      fail(ErrorCode::Io, "fixture line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
    }
  }
  if (t.id < 1 || t.rows.empty()) fail(ErrorCode::Io, "fixture without id or rows");
  return t;
}

FixtureTable load_fixture(const std::string& dir, int id) {
  const std::string path = dir + "/table" + std::to_string(id) + ".txt";
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open fixture " + path);
  FixtureTable t = parse_fixture(in);
  if (t.id != id) fail(ErrorCode::Io, path + " holds table " + std::to_string(t.id));
  return t;
}

SchemeConfig fixture_config(const FixtureTable& table, std::size_t row) {
  if (row >= table.rows.size()) {
    fail(ErrorCode::Config, "table " + std::to_string(table.id) + " has no row " +
                                std::to_string(row + 1));
  }
  const FixtureRow& r = table.rows[row];
  SchemeConfig cfg = plan_schedule(
      table.domain, ProblemCoeffs::convection_diffusion(table.bx, table.by),
      r.coarse_n, r.row.levels(), RateParameters::defaults_for(table.domain.kind),
      table.mode);
  cfg.reference_lambda = reference_lambda(table.domain.kind, table.bx, table.by);
  return cfg;
}

std::optional<double> reference_lambda(DomainKind domain, double bx, double by) {
  struct Entry {
    DomainKind domain;
    double bx, by, lambda;
  };
  static constexpr Entry kEntries[] = {
      {DomainKind::LShape, 0.0, 3.0, 11.8897}, {DomainKind::LShape, 1.0, 1.0, 10.1397},
      {DomainKind::LShape, 0.0, 10.0, 34.6397}, {DomainKind::Slit, 0.0, 3.0, 10.621},
      {DomainKind::Slit, 1.0, 1.0, 8.871},      {DomainKind::Slit, 0.0, 10.0, 33.371},
  };
  for (const Entry& e : kEntries) {
    if (e.domain == domain && e.bx == bx && e.by == by) return e.lambda;
  }
  return std::nullopt;
}

TableRow table_row(const SchemeResult& result) {
  TableRow row;
  row.dof_h = result.dof_coarse();
  row.dof_w = result.dof_meso();
  for (const LevelReport& r : result.reports) {
    const int k = r.level + 1;
    if (k >= 0 && k < kTableCells) row.cells[k] = r.lambda;
  }
  return row;
}

void write_csv(const std::vector<TableRow>& rows, std::ostream& out) {
  out << "DOF_H,DOF_w";
  for (const char* name : kCellNames) out << ',' << name;
  out << '\n';
  out << std::fixed << std::setprecision(5);
  for (const TableRow& r : rows) {
    out << r.dof_h << ',' << r.dof_w;
    for (const auto& c : r.cells) {
      out << ',';
      if (c) out << *c;
    }
    out << '\n';
  }
  if (!out) fail(ErrorCode::Io, "CSV write failed");
}

std::vector<TableRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::Io, "empty CSV");
  std::vector<TableRow> rows;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    for (std::string f; std::getline(ss, f, ',');) fields.push_back(trim(f));
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 2 + kTableCells) {
      fail(ErrorCode::Io, "CSV row with " + std::to_string(fields.size()) + " fields");
    }
    TableRow r;
    r.dof_h = parse_int(fields[0], "DOF_H");
    r.dof_w = parse_int(fields[1], "DOF_w");
    for (int k = 0; k < kTableCells; ++k) {
      if (!fields[2 + k].empty()) r.cells[k] = parse_double(fields[2 + k], "eigenvalue");
    }
    rows.push_back(r);
  }
  return rows;
}

Comparison compare_fixture(const std::vector<TableRow>& computed,
                           const FixtureTable& fixture, double tol,
                           const std::vector<std::size_t>& rows) {
  std::vector<std::size_t> selected = rows;
  if (selected.empty()) {
    for (std::size_t i = 0; i < fixture.rows.size(); ++i) selected.push_back(i);
  }
  if (computed.size() != selected.size()) {
    fail(ErrorCode::Shape, "computed " + std::to_string(computed.size()) +
                               " rows, fixture selection has " +
                               std::to_string(selected.size()));
  }
  Comparison cmp;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (selected[i] >= fixture.rows.size()) fail(ErrorCode::Shape, "row out of range");
    const TableRow& want = fixture.rows[selected[i]].row;
    const TableRow& got = computed[i];
    const std::size_t row_no = selected[i] + 1;
    for (auto [name, g, w] : {std::tuple{"DOF_H", got.dof_h, want.dof_h},
                              std::tuple{"DOF_w", got.dof_w, want.dof_w}}) {
      if (g != w) {
        cmp.pass = false;
        cmp.failures.push_back({row_no, name, double(g), double(w), std::abs(double(g - w))});
      }
    }
    for (int k = 0; k < kTableCells; ++k) {
      if (got.cells[k].has_value() != want.cells[k].has_value()) {
        fail(ErrorCode::Shape, "row " + std::to_string(row_no) + " column " +
                                   kCellNames[k] + " populated on one side only");
      }
      if (!want.cells[k]) continue;
      const double d = std::abs(*got.cells[k] - *want.cells[k]);
      cmp.max_diff = std::max(cmp.max_diff, d);
      if (!(d <= tol)) {
        cmp.pass = false;
        cmp.failures.push_back({row_no, kCellNames[k], *got.cells[k], *want.cells[k], d});
      }
    }
  }
  return cmp;
}

}  // namespace ldc
