// SPDX-License-Identifier: Apache-2.0

#include "ldc/scheme.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "ldc/error.hpp"
#include "ldc/sparse_linalg.hpp"

namespace ldc {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(int n) {
  int k = 0;
  while ((1 << k) < n) ++k;
  return k;
}

// Error annotated with the step it came from.
[[noreturn]] void rethrow_at(const Error& e, const std::string& where) {
  throw Error(e.code(), where + ": " + e.what());
}

std::vector<double> scaled_product(const SparseMatrix& b,
                                   std::span<const double> x, double factor) {
  std::vector<double> y = b.multiply(x);
  for (double& v : y) v *= factor;
  return y;
}

}  // namespace

const char* to_string(SchemeMode mode) noexcept {
  switch (mode) {
    case SchemeMode::TwoGrid: return "two-grid";
    case SchemeMode::ThreeLevel: return "three-level";
    case SchemeMode::Multilevel: return "multilevel";
    case SchemeMode::Parallel: return "parallel";
    case SchemeMode::Symmetric: return "symmetric";
  }
  return "unknown";
}

std::optional<SchemeMode> parse_mode(const std::string& text) {
  for (SchemeMode m : {SchemeMode::TwoGrid, SchemeMode::ThreeLevel,
                       SchemeMode::Multilevel, SchemeMode::Parallel,
                       SchemeMode::Symmetric}) {
    if (text == to_string(m)) return m;
  }
  return std::nullopt;
}

RateParameters RateParameters::defaults_for(DomainKind kind) {
  const double v = kind == DomainKind::Slit ? 0.5 : 2.0 / 3.0;
  return {1.0, v, v, v, v};
}

double SchemeConfig::h(int level) const { return w() / std::ldexp(1.0, level); }

void SchemeConfig::validate() const {
  coeffs.validate();
  if (coarse_n < 2) fail(ErrorCode::Config, "coarse mesh needs H <= 1/2");
  if (meso_n < coarse_n || meso_n % coarse_n != 0 ||
      !is_power_of_two(meso_n / coarse_n)) {
    fail(ErrorCode::Config, "w must be H divided by a power of two");
  }
  const int depth = log2_exact(meso_n / coarse_n) + levels();
  if (depth > TriKey::kMaxDepth) {
    fail(ErrorCode::Config, "schedule exceeds the supported refinement depth");
  }
  if (mode == SchemeMode::TwoGrid && levels() != 0) {
    fail(ErrorCode::Config, "the two-grid mode has no local levels");
  }
  if (mode == SchemeMode::ThreeLevel && levels() != 1) {
    fail(ErrorCode::Config, "the three-level mode has exactly one local level");
  }
  if (mode == SchemeMode::Symmetric && !coeffs.is_symmetric()) {
    fail(ErrorCode::Config, "symmetric mode needs a symmetric bilinear form");
  }
  for (int i = 0; i < levels(); ++i) {
    const LevelRegions& r = regions[i];
    if (r.primal.empty()) fail(ErrorCode::Config, "level without primal subdomain");
    if (!symmetric() && r.adjoint.empty()) {
      fail(ErrorCode::Config, "level without adjoint subdomain");
    }
    if (i == 0) continue;
    const LevelRegions& prev = regions[i - 1];
    for (const auto* list : {&r.primal, &r.adjoint}) {
      for (const SubdomainSpec& s : *list) {
        const auto nested = [&](const SubdomainSpec& p) { return p.encloses(s); };
        if (std::none_of(prev.primal.begin(), prev.primal.end(), nested) &&
            std::none_of(prev.adjoint.begin(), prev.adjoint.end(), nested)) {
          std::ostringstream msg;
          msg << "level " << i + 1 << " subdomain is not nested in a level " << i
              << " subdomain";
          fail(ErrorCode::Config, msg.str());
        }
      }
    }
  }
}

LevelRegions canonical_regions(DomainKind kind, int level) {
  const double s = std::ldexp(1.0, -level);
  SubdomainSpec region;
  switch (kind) {
    case DomainKind::LShape: region = SubdomainSpec::scaled_lshape(s, level); break;
    case DomainKind::Slit: region = SubdomainSpec::scaled_slit(s, level); break;
    case DomainKind::Square:
      region = SubdomainSpec::rectangle(-s, s, -s, s, level);
      break;
    case DomainKind::Rectangle:
      fail(ErrorCode::Config, "no canonical subdomains for a plain rectangle");
  }
  return {{region}, {region}};
}

LevelRegions parallel_regions(DomainKind kind, int level) {
  const double e = std::ldexp(1.0, -level);
  const SubdomainSpec top =
      SubdomainSpec::rectangle(-2.0 * e, 2.0 * e, 1.0 - e, 1.0, level);
  const SubdomainSpec bottom_left =
      SubdomainSpec::rectangle(-0.5 - e, -0.5 + e, -1.0, -1.0 + e, level);
  switch (kind) {
    case DomainKind::LShape: {
      const auto corner = SubdomainSpec::scaled_lshape(0.5 * e, level);
      return {{corner, top}, {corner, bottom_left}};
    }
    case DomainKind::Slit: {
      const auto tip = SubdomainSpec::scaled_slit(e, level);
      const auto bottom_right =
          SubdomainSpec::rectangle(0.5 - e, 0.5 + e, -1.0, -1.0 + e, level);
      return {{tip, top}, {tip, bottom_right, bottom_left}};
    }
    default:
      fail(ErrorCode::Config, "the parallel variant needs the L-shape or the slit");
  }
}

SchemeConfig plan_schedule(const DomainSpec& domain, const ProblemCoeffs& coeffs,
                           int coarse_n, int levels, const RateParameters& rates,
                           SchemeMode mode, std::int64_t dof_budget) {
  if (!is_power_of_two(coarse_n) || coarse_n < 2) {
    fail(ErrorCode::Config, "H must be 1/2^k with k >= 1");
  }
  if (!(rates.r > 0.0)) fail(ErrorCode::Config, "r must be positive");
  if (mode == SchemeMode::TwoGrid) levels = 0;
  if (mode == SchemeMode::ThreeLevel) levels = 1;
  if (levels < 0) fail(ErrorCode::Config, "negative level count");

  const int kh = log2_exact(coarse_n);
  const double exponent = (rates.r + rates.s - 1.0 + rates.gamma1) / rates.r;
  const int kw = std::max(static_cast<int>(std::floor(kh * exponent + 1e-9)), kh + 1);
  if (kw > 30) fail(ErrorCode::Config, "mesoscopic mesh size underflows");

  SchemeConfig cfg;
  cfg.domain = domain;
  cfg.coeffs = coeffs;
  cfg.coarse_n = coarse_n;
  cfg.meso_n = 1 << kw;
  cfg.rates = rates;
  cfg.mode = mode;
  cfg.dof_budget = dof_budget;
  for (int i = 1; i <= levels; ++i) {
    cfg.regions.push_back(mode == SchemeMode::Parallel
                              ? parallel_regions(domain.kind, i)
                              : canonical_regions(domain.kind, i));
  }
  cfg.validate();
  if (dof_budget > 0 && estimate_dofs(cfg) > dof_budget) {
    std::ostringstream msg;
    msg << "schedule needs about " << estimate_dofs(cfg)
        << " unknowns, budget is " << dof_budget;
    fail(ErrorCode::Budget, msg.str());
  }
  return cfg;
}

std::int64_t estimate_dofs(const SchemeConfig& cfg) {
  const double area = cfg.domain.area();
  double total = area * cfg.coarse_n * cfg.coarse_n + area * cfg.meso_n * cfg.meso_n;
  for (int i = 1; i <= cfg.levels(); ++i) {
    const double inv_h = 1.0 / cfg.h(i);
    std::vector<SubdomainSpec> distinct;
    for (const auto* list : {&cfg.regions[i - 1].primal, &cfg.regions[i - 1].adjoint}) {
      for (const SubdomainSpec& s : *list) {
        const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                      [&](const SubdomainSpec& d) { return d.same_region(s); });
        if (!seen) distinct.push_back(s);
      }
    }
    for (const SubdomainSpec& s : distinct) total += s.area() * inv_h * inv_h;
  }
  return static_cast<std::int64_t>(total);
}

const LevelReport& SchemeResult::report(int level) const {
  for (const LevelReport& r : reports) {
    if (r.level == level) return r;
  }
  fail(ErrorCode::InvalidArgument, "no report for level " + std::to_string(level));
}

// ---------------------------------------------------------------------------
// LdcSolver

struct LdcSolver::Cache {
  struct Local {
    SubdomainSpec region;
    MeshPtr mesh;
    std::unique_ptr<MeshOperators> ops;
    std::unique_ptr<Factorization> lu;
  };

  MeshPtr coarse;
  std::optional<EigenResult> coarse_result;
  MeshPtr meso;
  std::unique_ptr<MeshOperators> meso_ops;
  std::unique_ptr<Factorization> meso_lu;
  // locals[i-1]: meshes of level i
  std::vector<std::vector<Local>> locals;
};

LdcSolver::LdcSolver(SchemeConfig cfg) : cfg_(std::move(cfg)), cache_(new Cache) {
  cfg_.validate();
  cache_->locals.resize(cfg_.levels());
}

LdcSolver::~LdcSolver() = default;

MeshPtr LdcSolver::coarse_mesh() {
  if (!cache_->coarse) cache_->coarse = build_mesh(cfg_.domain, cfg_.coarse_n);
  return cache_->coarse;
}

MeshPtr LdcSolver::meso_mesh() {
  if (!cache_->meso) {
    MeshPtr m = coarse_mesh();
    for (int n = cfg_.coarse_n; n < cfg_.meso_n; n *= 2) m = refine_uniform(*m);
    cache_->meso = std::move(m);
  }
  return cache_->meso;
}

MeshPtr LdcSolver::local_mesh(const SubdomainSpec& region, int level) {
  if (level < 1 || level > cfg_.levels()) {
    fail(ErrorCode::InvalidArgument, "level outside the schedule");
  }
  auto& slot = cache_->locals[level - 1];
  for (const Cache::Local& l : slot) {
    if (l.region.same_region(region)) return l.mesh;
  }
  MeshPtr parent;
  if (level == 1) {
    parent = meso_mesh();
  } else {
    const LevelRegions& prev = cfg_.regions[level - 2];
    for (const auto* list : {&prev.primal, &prev.adjoint}) {
      for (const SubdomainSpec& p : *list) {
        if (!parent && p.encloses(region)) parent = local_mesh(p, level - 1);
      }
    }
    if (!parent) fail(ErrorCode::Config, "subdomain has no enclosing parent");
  }
  MeshPtr mesh = refine_uniform(*extract_submesh(*parent, region).mesh);
  slot.push_back({region, mesh, nullptr, nullptr});
  return mesh;
}

const EigenResult& LdcSolver::step1_coarse() {
  if (!cache_->coarse_result) {
    try {
      const MeshOperators ops = build_operators(coarse_mesh(), cfg_.coeffs);
      cache_->coarse_result = solve_eigenproblem(ops, cfg_.eigen, cfg_.symmetric());
    } catch (const Error& e) {
      rethrow_at(e, "coarse eigenproblem");
    }
  }
  return *cache_->coarse_result;
}

SchemeState LdcSolver::step2_meso() {
  const EigenResult& coarse = step1_coarse();
  try {
    const MeshPtr meso = meso_mesh();
    if (!cache_->meso_ops) {
      cache_->meso_ops = std::make_unique<MeshOperators>(build_operators(meso, cfg_.coeffs));
      cache_->meso_lu = std::make_unique<Factorization>(cache_->meso_ops->a);
    }
    const MeshOperators& ops = *cache_->meso_ops;
    const std::vector<double> g = prolongate(coarse.u, meso).unknowns();
    SchemeState state;
    state.primal = CompositeFunction(FeFunction::from_unknowns(
        meso, cache_->meso_lu->solve(scaled_product(ops.b, g, coarse.lambda))));
    if (cfg_.symmetric()) {
      state.adjoint = state.primal;
    } else {
      const std::vector<double> gs = prolongate(coarse.u_star, meso).unknowns();
      state.adjoint = CompositeFunction(FeFunction::from_unknowns(
          meso,
          cache_->meso_lu->solve_transpose(scaled_product(ops.b, gs, coarse.lambda))));
    }
    const CompositePartition partition = composite_partition(*meso, {});
    state.lambda = rayleigh_quotient(state.primal, state.adjoint, partition, cfg_.coeffs);
    state.level = 0;
    return state;
  } catch (const Error& e) {
    rethrow_at(e, "mesoscopic step");
  }
}

void LdcSolver::local_correct(SchemeState& state, int level) {
  if (level != state.level + 1) {
    fail(ErrorCode::InvalidArgument, "levels must be corrected in order");
  }
  const LevelRegions& regions = cfg_.regions.at(level - 1);
  try {
    auto entry = [&](const SubdomainSpec& region) -> Cache::Local& {
      const MeshPtr mesh = local_mesh(region, level);
      for (Cache::Local& l : cache_->locals[level - 1]) {
        if (l.mesh != mesh) continue;
        if (!l.ops) {
          l.ops = std::make_unique<MeshOperators>(build_operators(mesh, cfg_.coeffs));
          l.lu = std::make_unique<Factorization>(l.ops->a);
        }
        return l;
      }
      fail(ErrorCode::InvalidArgument, "local mesh missing from cache");
    };

    // Every defect is taken against the level-(i-1) state.
    std::vector<std::pair<SubdomainSpec, FeFunction>> primal, adjoint;
    for (const SubdomainSpec& region : regions.primal) {
      Cache::Local& l = entry(region);
      const std::vector<double> g = state.primal.values_on(*l.mesh);
      const std::vector<double> f = defect_functional(*l.ops, g, state.lambda, false);
      primal.emplace_back(region, FeFunction::from_unknowns(l.mesh, l.lu->solve(f)));
    }
    if (!cfg_.symmetric()) {
      for (const SubdomainSpec& region : regions.adjoint) {
        Cache::Local& l = entry(region);
        const std::vector<double> g = state.adjoint.values_on(*l.mesh);
        const std::vector<double> f = defect_functional(*l.ops, g, state.lambda, true);
        adjoint.emplace_back(region,
                             FeFunction::from_unknowns(l.mesh, l.lu->solve_transpose(f)));
      }
    }
    for (auto& [region, e] : primal) state.primal.add_correction(region, std::move(e));
    for (auto& [region, e] : adjoint) state.adjoint.add_correction(region, std::move(e));
    if (cfg_.symmetric()) state.adjoint = state.primal;

    std::vector<LocalMesh> meshes;
    for (const CompositeFunction* c : {&state.primal, &state.adjoint}) {
      for (const LocalMesh& lm : c->local_meshes()) {
        const bool seen = std::any_of(meshes.begin(), meshes.end(),
                                      [&](const LocalMesh& m) { return m.mesh == lm.mesh; });
        if (!seen) meshes.push_back(lm);
      }
    }
    const CompositePartition partition = composite_partition(*meso_mesh(), meshes);
    state.lambda = rayleigh_quotient(state.primal, state.adjoint, partition, cfg_.coeffs);
    state.level = level;
  } catch (const Error& e) {
    rethrow_at(e, "local level " + std::to_string(level));
  }
}

LevelReport LdcSolver::make_report(int level, double lambda, double lambda_adj,
                                   int dof, int dof_adj, double seconds) const {
  LevelReport r;
  r.level = level;
  r.lambda = lambda;
  r.lambda_adjoint = lambda_adj;
  r.dof = dof;
  r.dof_adjoint = dof_adj;
  r.error = cfg_.reference_lambda ? std::abs(lambda - *cfg_.reference_lambda)
                                  : std::numeric_limits<double>::quiet_NaN();
  r.seconds = seconds;
  return r;
}

SchemeResult LdcSolver::run() {
  SchemeResult result;
  result.config = cfg_;

  auto start = Clock::now();
  result.coarse = step1_coarse();
  result.coarse_mesh = coarse_mesh();
  const int dof_h = result.coarse_mesh->num_unknowns();
  result.reports.push_back(make_report(-1, result.coarse.lambda,
                                       result.coarse.lambda_adjoint, dof_h, dof_h,
                                       seconds_since(start)));

  start = Clock::now();
  SchemeState state = step2_meso();
  cache_->meso_ops.reset();
  cache_->meso_lu.reset();
  result.meso_mesh = meso_mesh();
  const int dof_w = result.meso_mesh->num_unknowns();
  result.reports.push_back(
      make_report(0, state.lambda, state.lambda, dof_w, dof_w, seconds_since(start)));

  for (int i = 1; i <= cfg_.levels(); ++i) {
    start = Clock::now();
    local_correct(state, i);
    for (Cache::Local& l : cache_->locals[i - 1]) {
      l.ops.reset();
      l.lu.reset();
    }
    int dof = 0, dof_adj = 0;
    for (const SubdomainSpec& s : cfg_.regions[i - 1].primal) {
      dof += local_mesh(s, i)->num_unknowns();
    }
    for (const SubdomainSpec& s : cfg_.regions[i - 1].adjoint) {
      dof_adj += local_mesh(s, i)->num_unknowns();
    }
    if (cfg_.symmetric()) dof_adj = dof;
    result.reports.push_back(
        make_report(i, state.lambda, state.lambda, dof, dof_adj, seconds_since(start)));
  }
  result.state = std::move(state);
  return result;
}

SchemeResult run(const SchemeConfig& cfg) { return LdcSolver(cfg).run(); }

// ---------------------------------------------------------------------------
// Error measurement

namespace {

constexpr const char* kCacheMagic = "ldc-reference-v1";

bool read_reference(const std::string& path, const MeshPtr& mesh,
                    ReferenceEigenpair& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::string magic;
  std::size_t n = 0;
  double lambda = 0.0;
  in >> magic >> n;
  in.get();
  if (magic != kCacheMagic || n != mesh->num_vertices()) return false;
  in.read(reinterpret_cast<char*>(&lambda), sizeof lambda);
  std::vector<double> u(n), us(n);
  in.read(reinterpret_cast<char*>(u.data()), static_cast<std::streamsize>(n * sizeof(double)));
  in.read(reinterpret_cast<char*>(us.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) return false;
  out.lambda = lambda;
  out.u = FeFunction(mesh, std::move(u));
  out.u_star = FeFunction(mesh, std::move(us));
  return true;
}

void write_reference(const std::string& path, const ReferenceEigenpair& r) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot write reference cache " + path);
  const std::size_t n = r.u.values().size();
  out << kCacheMagic << ' ' << n << '\n';
  out.write(reinterpret_cast<const char*>(&r.lambda), sizeof r.lambda);
  out.write(reinterpret_cast<const char*>(r.u.values().data()),
            static_cast<std::streamsize>(n * sizeof(double)));
  out.write(reinterpret_cast<const char*>(r.u_star.values().data()),
            static_cast<std::streamsize>(n * sizeof(double)));
  if (!out) fail(ErrorCode::Io, "failed writing reference cache " + path);
}

}  // namespace

ReferenceEigenpair reference_eigenpair(const MeshPtr& base, int extra_depth,
                                       const ProblemCoeffs& p,
                                       const EigenOptions& opts, bool symmetric,
                                       const std::string& cache_path) {
  if (extra_depth < 0) fail(ErrorCode::InvalidArgument, "negative refinement depth");
  MeshPtr mesh = base;
  for (int i = 0; i < extra_depth; ++i) mesh = refine_uniform(*mesh);
  ReferenceEigenpair r;
  if (!cache_path.empty() && read_reference(cache_path, mesh, r)) return r;
  const EigenResult e = solve_eigenproblem(build_operators(mesh, p), opts, symmetric);
  r.lambda = e.lambda;
  r.u = e.u;
  r.u_star = e.u_star;
  if (!cache_path.empty()) write_reference(cache_path, r);
  return r;
}

ErrorNorms error_report(const CompositeFunction& state,
                        const FeFunction& reference,
                        const std::optional<SubdomainSpec>& excluded) {
  const Mesh& m = reference.mesh();
  const ProblemCoeffs laplace;  // unit diffusion, no convection, unit weight
  const auto vals = reference.values();

  std::vector<PartitionCell> cells(m.num_triangles());
  std::vector<std::array<double, 3>> s(m.num_triangles()), r(m.num_triangles());
  double sr = 0.0, rr = 0.0;
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    const auto& tri = m.triangles()[t];
    cells[t] = {m.key(static_cast<int>(t)),
                {m.vertices()[tri[0]], m.vertices()[tri[1]], m.vertices()[tri[2]]}};
    s[t] = state.cell_values(cells[t]);
    r[t] = {vals[tri[0]], vals[tri[1]], vals[tri[2]]};
    sr += element_b(cells[t].corners, s[t], r[t], laplace);
    rr += element_b(cells[t].corners, r[t], r[t], laplace);
  }
  if (!(rr > 0.0)) fail(ErrorCode::InvalidArgument, "reference function vanishes");
  const double alpha = sr / rr;

  double l2 = 0.0, semi = 0.0, semi_out = 0.0, l2_out = 0.0;
  for (std::size_t t = 0; t < cells.size(); ++t) {
    std::array<double, 3> d{};
    for (int k = 0; k < 3; ++k) d[k] = s[t][k] - alpha * r[t][k];
    const double mass = element_b(cells[t].corners, d, d, laplace);
    const double grad = element_a(cells[t].corners, d, d, laplace);
    l2 += mass;
    semi += grad;
    if (!excluded || !excluded->contains_closure(m.centroid(static_cast<int>(t)))) {
      l2_out += mass;
      semi_out += grad;
    }
  }
  return {std::sqrt(l2), std::sqrt(l2 + semi), std::sqrt(l2_out + semi_out)};
}

std::vector<double> empirical_orders(std::span<const double> errors) {
  std::vector<double> orders;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    orders.push_back(std::log2(errors[i - 1] / errors[i]));
  }
  return orders;
}

double fitted_order(std::span<const double> errors, int count) {
  if (count < 2 || count > static_cast<int>(errors.size())) {
    fail(ErrorCode::InvalidArgument, "order fit needs at least two errors");
  }
  const auto tail = errors.last(static_cast<std::size_t>(count));
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < count; ++i) {
    mx += i;
    my += -std::log2(tail[i]);
  }
  mx /= count;
  my /= count;
  double sxy = 0.0, sxx = 0.0;
  for (int i = 0; i < count; ++i) {
    sxy += (i - mx) * (-std::log2(tail[i]) - my);
    sxx += (i - mx) * (i - mx);
  }
  return sxy / sxx;
}

}  // namespace ldc
