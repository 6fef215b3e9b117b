// SPDX-License-Identifier: Apache-2.0

#include "ldc/ldc.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <new>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ldc/bench.hpp"
#include "ldc/error.hpp"
#include "ldc/scheme.hpp"
#include "ldc/sparse_linalg.hpp"

struct ldc_config {
  ldc::DomainSpec domain = ldc::DomainSpec::lshape();
  double bx = 0.0;
  double by = 0.0;
  int coarse_n = 16;
  int levels = 3;
  ldc::SchemeMode mode = ldc::SchemeMode::Multilevel;
  ldc::RateParameters rates = ldc::RateParameters::defaults_for(ldc::DomainKind::LShape);
  std::optional<double> reference;
  std::int64_t budget = 0;

  ldc::SchemeConfig plan() const {
    ldc::SchemeConfig cfg = ldc::plan_schedule(
        domain, ldc::ProblemCoeffs::convection_diffusion(bx, by), coarse_n, levels,
        rates, mode, budget);
    cfg.reference_lambda = reference;
    return cfg;
  }
};

struct ldc_result {
  ldc::SchemeResult result;
};

struct ldc_fixture {
  ldc::FixtureTable table;
  std::string domain_name;
};

struct ldc_table {
  std::vector<ldc::TableRow> rows;
};

struct ldc_comparison {
  ldc::Comparison cmp;
  std::vector<std::string> text;
};

namespace {

thread_local std::string last_error;

ldc_status status_of(ldc::ErrorCode code) {
  using ldc::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return LDC_ERR_INVALID_ARGUMENT;
    case ErrorCode::Alignment: return LDC_ERR_ALIGNMENT;
    case ErrorCode::Coefficient: return LDC_ERR_COEFFICIENT;
    case ErrorCode::Transfer: return LDC_ERR_TRANSFER;
    case ErrorCode::Partition: return LDC_ERR_PARTITION;
    case ErrorCode::Singular: return LDC_ERR_SINGULAR;
    case ErrorCode::SizeMismatch: return LDC_ERR_SIZE_MISMATCH;
    case ErrorCode::UnsupportedSpectrum: return LDC_ERR_UNSUPPORTED_SPECTRUM;
    case ErrorCode::Shift: return LDC_ERR_SHIFT;
    case ErrorCode::DegeneratePairing: return LDC_ERR_DEGENERATE_PAIRING;
    case ErrorCode::Budget: return LDC_ERR_BUDGET;
    case ErrorCode::Io: return LDC_ERR_IO;
    case ErrorCode::Shape: return LDC_ERR_SHAPE;
    case ErrorCode::Config: return LDC_ERR_CONFIG;
  }
  return LDC_ERR_INTERNAL;
}

template <class F>
ldc_status guarded(F&& body) noexcept {
  try {
    body();
    return LDC_OK;
  } catch (const ldc::Error& e) {
    last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return LDC_ERR_INTERNAL;
}

void require(const void* p, const char* what) {
  if (!p) ldc::fail(ldc::ErrorCode::InvalidArgument, std::string("null ") + what);
}

const char* domain_name(ldc::DomainKind kind) {
  switch (kind) {
    case ldc::DomainKind::LShape: return "lshape";
    case ldc::DomainKind::Slit: return "slit";
    case ldc::DomainKind::Square: return "square";
    case ldc::DomainKind::Rectangle: return "rectangle";
  }
  return "unknown";
}

std::ofstream open_out(const char* path) {
  require(path, "path");
  std::ofstream out(path);
  if (!out) ldc::fail(ldc::ErrorCode::Io, std::string("cannot write ") + path);
  return out;
}

}  // namespace

extern "C" {

const char* ldc_last_error(void) { return last_error.c_str(); }

const char* ldc_status_string(ldc_status status) {
  switch (status) {
    case LDC_OK: return "ok";
    case LDC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LDC_ERR_ALIGNMENT: return "alignment error";
    case LDC_ERR_COEFFICIENT: return "coefficient error";
    case LDC_ERR_TRANSFER: return "transfer error";
    case LDC_ERR_PARTITION: return "partition error";
    case LDC_ERR_SINGULAR: return "singular matrix";
    case LDC_ERR_SIZE_MISMATCH: return "size mismatch";
    case LDC_ERR_UNSUPPORTED_SPECTRUM: return "unsupported spectrum";
    case LDC_ERR_SHIFT: return "shift error";
    case LDC_ERR_DEGENERATE_PAIRING: return "degenerate pairing";
    case LDC_ERR_BUDGET: return "budget exceeded";
    case LDC_ERR_IO: return "I/O error";
    case LDC_ERR_SHAPE: return "shape mismatch";
    case LDC_ERR_CONFIG: return "configuration error";
    case LDC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* ldc_solver_backend(void) { return ldc::Factorization::ordering_name(); }

ldc_status ldc_reference_lambda(const char* domain, double bx, double by,
                                double* lambda) {
  return guarded([&] {
    require(domain, "domain");
    require(lambda, "output");
    const std::string name = domain;
    std::optional<double> ref;
    if (name == "lshape") ref = ldc::reference_lambda(ldc::DomainKind::LShape, bx, by);
    else if (name == "slit") ref = ldc::reference_lambda(ldc::DomainKind::Slit, bx, by);
    if (!ref) {
      ldc::fail(ldc::ErrorCode::InvalidArgument, "no reference eigenvalue for " + name);
    }
    *lambda = *ref;
  });
}

ldc_status ldc_config_create(ldc_config** out) {
  return guarded([&] {
    require(out, "output");
    *out = new ldc_config;
  });
}

void ldc_config_destroy(ldc_config* cfg) { delete cfg; }

ldc_status ldc_config_set_domain(ldc_config* cfg, const char* domain) {
  return guarded([&] {
    require(cfg, "config");
    require(domain, "domain");
    const std::string name = domain;
    if (name == "lshape") cfg->domain = ldc::DomainSpec::lshape();
    else if (name == "slit") cfg->domain = ldc::DomainSpec::slit();
    else if (name == "square") cfg->domain = ldc::DomainSpec::square();
    else ldc::fail(ldc::ErrorCode::Config, "unknown domain '" + name + "'");
    cfg->rates = ldc::RateParameters::defaults_for(cfg->domain.kind);
  });
}

ldc_status ldc_config_set_convection(ldc_config* cfg, double bx, double by) {
  return guarded([&] {
    require(cfg, "config");
    if (!std::isfinite(bx) || !std::isfinite(by)) {
      ldc::fail(ldc::ErrorCode::Coefficient, "non-finite convection");
    }
    cfg->bx = bx;
    cfg->by = by;
  });
}

ldc_status ldc_config_set_coarse(ldc_config* cfg, int coarse_n) {
  return guarded([&] {
    require(cfg, "config");
    cfg->coarse_n = coarse_n;
  });
}

ldc_status ldc_config_set_levels(ldc_config* cfg, int levels) {
  return guarded([&] {
    require(cfg, "config");
    if (levels < 0) ldc::fail(ldc::ErrorCode::Config, "negative level count");
    cfg->levels = levels;
  });
}

ldc_status ldc_config_set_mode(ldc_config* cfg, const char* mode) {
  return guarded([&] {
    require(cfg, "config");
    require(mode, "mode");
    const auto m = ldc::parse_mode(mode);
    if (!m) ldc::fail(ldc::ErrorCode::Config, std::string("unknown mode '") + mode + "'");
    cfg->mode = *m;
  });
}

ldc_status ldc_config_set_rates(ldc_config* cfg, double s, double gamma) {
  return guarded([&] {
    require(cfg, "config");
    if (!(s > 0.0 && s <= 1.0) || !(gamma > 0.0 && gamma <= 1.0)) {
      ldc::fail(ldc::ErrorCode::Config, "s and gamma must lie in (0, 1]");
    }
    cfg->rates.s = cfg->rates.s2 = s;
    cfg->rates.gamma1 = cfg->rates.gamma2 = gamma;
  });
}

ldc_status ldc_config_set_reference(ldc_config* cfg, double lambda) {
  return guarded([&] {
    require(cfg, "config");
    cfg->reference = lambda;
  });
}

ldc_status ldc_config_set_dof_budget(ldc_config* cfg, int64_t budget) {
  return guarded([&] {
    require(cfg, "config");
    cfg->budget = budget;
  });
}

ldc_status ldc_config_meso_n(const ldc_config* cfg, int* meso_n) {
  return guarded([&] {
    require(cfg, "config");
    require(meso_n, "output");
    *meso_n = cfg->plan().meso_n;
  });
}

ldc_status ldc_run(const ldc_config* cfg, ldc_result** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "output");
    auto res = std::make_unique<ldc_result>();
    res->result = ldc::run(cfg->plan());
    *out = res.release();
  });
}

void ldc_result_destroy(ldc_result* res) { delete res; }

ldc_status ldc_result_num_reports(const ldc_result* res, size_t* n) {
  return guarded([&] {
    require(res, "result");
    require(n, "output");
    *n = res->result.reports.size();
  });
}

ldc_status ldc_result_report(const ldc_result* res, size_t index,
                             ldc_level_report* out) {
  return guarded([&] {
    require(res, "result");
    require(out, "output");
    if (index >= res->result.reports.size()) {
      ldc::fail(ldc::ErrorCode::InvalidArgument, "report index out of range");
    }
    const ldc::LevelReport& r = res->result.reports[index];
    *out = {r.level, r.lambda, r.lambda_adjoint, r.dof, r.dof_adjoint, r.error, r.seconds};
  });
}

ldc_status ldc_result_dofs(const ldc_result* res, int* dof_coarse, int* dof_meso) {
  return guarded([&] {
    require(res, "result");
    if (dof_coarse) *dof_coarse = res->result.dof_coarse();
    if (dof_meso) *dof_meso = res->result.dof_meso();
  });
}

ldc_status ldc_result_write_mesh(const ldc_result* res, const char* which,
                                 const char* path) {
  return guarded([&] {
    require(res, "result");
    require(which, "mesh name");
    const std::string name = which;
    ldc::MeshPtr mesh;
    if (name == "coarse") mesh = res->result.coarse_mesh;
    else if (name == "meso") mesh = res->result.meso_mesh;
    else ldc::fail(ldc::ErrorCode::InvalidArgument, "mesh must be coarse or meso");
    std::ofstream out = open_out(path);
    ldc::write_mesh(*mesh, out);
    if (!out) ldc::fail(ldc::ErrorCode::Io, std::string("failed writing ") + path);
  });
}

ldc_status ldc_result_write_nodal(const ldc_result* res, const char* path) {
  return guarded([&] {
    require(res, "result");
    const ldc::SchemeState& s = res->result.state;
    std::vector<ldc::LocalMesh> meshes = s.primal.local_meshes();
    for (const ldc::LocalMesh& lm : s.adjoint.local_meshes()) meshes.push_back(lm);
    const ldc::CompositePartition part =
        ldc::composite_partition(*res->result.meso_mesh, meshes);
    std::map<std::pair<double, double>, std::pair<double, double>> nodes;
    for (const ldc::PartitionCell& c : part.cells()) {
      const auto u = s.primal.cell_values(c);
      const auto us = s.adjoint.cell_values(c);
      for (int k = 0; k < 3; ++k) {
        nodes.emplace(std::pair{c.corners[k].x, c.corners[k].y}, std::pair{u[k], us[k]});
      }
    }
    std::ofstream out = open_out(path);
    out << "# x y u u_star\n" << std::setprecision(17);
    for (const auto& [p, v] : nodes) {
      out << p.first << ' ' << p.second << ' ' << v.first << ' ' << v.second << '\n';
    }
    if (!out) ldc::fail(ldc::ErrorCode::Io, std::string("failed writing ") + path);
  });
}

ldc_status ldc_fixture_load(const char* dir, int table, ldc_fixture** out) {
  return guarded([&] {
    require(dir, "directory");
    require(out, "output");
    auto fx = std::make_unique<ldc_fixture>();
    fx->table = ldc::load_fixture(dir, table);
    fx->domain_name = domain_name(fx->table.domain.kind);
    *out = fx.release();
  });
}

void ldc_fixture_destroy(ldc_fixture* fx) { delete fx; }

ldc_status ldc_fixture_num_rows(const ldc_fixture* fx, size_t* n) {
  return guarded([&] {
    require(fx, "fixture");
    require(n, "output");
    *n = fx->table.rows.size();
  });
}

ldc_status ldc_fixture_problem(const ldc_fixture* fx, const char** domain,
                               double* bx, double* by) {
  return guarded([&] {
    require(fx, "fixture");
    if (domain) *domain = fx->domain_name.c_str();
    if (bx) *bx = fx->table.bx;
    if (by) *by = fx->table.by;
  });
}

ldc_status ldc_fixture_row_config(const ldc_fixture* fx, size_t row,
                                  ldc_config** out) {
  return guarded([&] {
    require(fx, "fixture");
    require(out, "output");
    const ldc::SchemeConfig planned = ldc::fixture_config(fx->table, row);
    auto cfg = std::make_unique<ldc_config>();
    cfg->domain = planned.domain;
    cfg->bx = fx->table.bx;
    cfg->by = fx->table.by;
    cfg->coarse_n = planned.coarse_n;
    cfg->levels = planned.levels();
    cfg->mode = planned.mode;
    cfg->rates = planned.rates;
    cfg->reference = planned.reference_lambda;
    *out = cfg.release();
  });
}

ldc_status ldc_table_create(ldc_table** out) {
  return guarded([&] {
    require(out, "output");
    *out = new ldc_table;
  });
}

void ldc_table_destroy(ldc_table* t) { delete t; }

ldc_status ldc_table_append(ldc_table* t, const ldc_result* res) {
  return guarded([&] {
    require(t, "table");
    require(res, "result");
    t->rows.push_back(ldc::table_row(res->result));
  });
}

ldc_status ldc_table_write_csv(const ldc_table* t, const char* path) {
  return guarded([&] {
    require(t, "table");
    std::ofstream out = open_out(path);
    ldc::write_csv(t->rows, out);
  });
}

ldc_status ldc_table_compare(const ldc_table* t, const ldc_fixture* fx,
                             const size_t* rows, size_t num_rows, double tol,
                             ldc_comparison** out) {
  return guarded([&] {
    require(t, "table");
    require(fx, "fixture");
    require(out, "output");
    if (num_rows > 0) require(rows, "row list");
    const std::vector<std::size_t> selected(rows, rows + num_rows);
    auto c = std::make_unique<ldc_comparison>();
    c->cmp = ldc::compare_fixture(t->rows, fx->table, tol, selected);
    for (const ldc::CellDiff& d : c->cmp.failures) {
      std::ostringstream msg;
      msg << std::setprecision(10) << "row " << d.row << ' ' << d.column
          << ": computed " << d.computed << ", expected " << d.expected
          << ", |diff| " << d.diff;
      c->text.push_back(msg.str());
    }
    *out = c.release();
  });
}

void ldc_comparison_destroy(ldc_comparison* c) { delete c; }

ldc_status ldc_comparison_passed(const ldc_comparison* c, int* passed) {
  return guarded([&] {
    require(c, "comparison");
    require(passed, "output");
    *passed = c->cmp.pass ? 1 : 0;
  });
}

ldc_status ldc_comparison_max_diff(const ldc_comparison* c, double* diff) {
  return guarded([&] {
    require(c, "comparison");
    require(diff, "output");
    *diff = c->cmp.max_diff;
  });
}

ldc_status ldc_comparison_num_failures(const ldc_comparison* c, size_t* n) {
  return guarded([&] {
    require(c, "comparison");
    require(n, "output");
    *n = c->cmp.failures.size();
  });
}

ldc_status ldc_comparison_failure(const ldc_comparison* c, size_t index,
                                  const char** text) {
  return guarded([&] {
    require(c, "comparison");
    require(text, "output");
    if (index >= c->text.size()) {
      ldc::fail(ldc::ErrorCode::InvalidArgument, "failure index out of range");
    }
    *text = c->text[index].c_str();
  });
}

}  // extern "C"
