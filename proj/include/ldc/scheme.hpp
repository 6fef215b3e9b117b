// SPDX-License-Identifier: Apache-2.0
//
// Multilevel local defect-correction for the smallest eigenpair of a
// nonsymmetric pencil: a coarse eigensolve on pi_H, two linear solves on the
// mesoscopic mesh pi_w, then per level i one linear solve per subdomain on
// the locally fine mesh pi_{h_i}(Omega_i), followed by the generalized
// Rayleigh quotient of the corrected composite pair.

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ldc/eigen_solver.hpp"
#include "ldc/fem_assembly.hpp"
#include "ldc/function.hpp"
#include "ldc/mesh.hpp"

namespace ldc {

enum class SchemeMode { TwoGrid, ThreeLevel, Multilevel, Parallel, Symmetric };

const char* to_string(SchemeMode mode) noexcept;
/// Accepts two-grid, three-level, multilevel, parallel, symmetric.
std::optional<SchemeMode> parse_mode(const std::string& text);

/// r is the polynomial degree, s/s2 the regularity exponents of the primal
/// and adjoint eigenfunctions, gamma1/gamma2 the local-estimate exponents.
struct RateParameters {
  double r = 1.0;
  double s = 2.0 / 3.0;
  double s2 = 2.0 / 3.0;
  double gamma1 = 2.0 / 3.0;
  double gamma2 = 2.0 / 3.0;

  /// s = s2 = gamma1 = gamma2 = 2/3 on the L-shape, 1/2 on the slit.
  static RateParameters defaults_for(DomainKind kind);
};

/// Subdomains corrected at one level. Primal and adjoint lists may differ.
struct LevelRegions {
  std::vector<SubdomainSpec> primal;
  std::vector<SubdomainSpec> adjoint;
};

struct SchemeConfig {
  DomainSpec domain = DomainSpec::lshape();
  ProblemCoeffs coeffs;
  int coarse_n = 16;  // H = 1/coarse_n
  int meso_n = 32;    // w = 1/meso_n
  /// regions[i-1] holds the subdomains of level i; levels = regions.size().
  std::vector<LevelRegions> regions;
  RateParameters rates;
  SchemeMode mode = SchemeMode::Multilevel;
  EigenOptions eigen;
  /// Upper bound on the estimated total number of unknowns; 0 disables.
  std::int64_t dof_budget = 0;
  /// Surrogate exact eigenvalue for the error column of the reports.
  std::optional<double> reference_lambda;

  int levels() const { return static_cast<int>(regions.size()); }
  double H() const { return 1.0 / coarse_n; }
  double w() const { return 1.0 / meso_n; }
  /// Spacing of the level-i local meshes, w / 2^i.
  double h(int level) const;
  bool symmetric() const { return mode == SchemeMode::Symmetric; }

  /// Throws ErrorCode::Config on inconsistent settings.
  void validate() const;
};

/// Canonical nested regions around the re-entrant corner or slit tip:
/// the domain shape scaled by 2^-level.
LevelRegions canonical_regions(DomainKind kind, int level);
/// Regions of the parallel variant: a near-origin region for both problems
/// plus boundary-layer rectangles (top edge for the primal, bottom edge for
/// the adjoint).
LevelRegions parallel_regions(DomainKind kind, int level);

/// Mesoscopic mesh size w = 2^-floor(log2(1/H) (r+s-1+gamma)/r), capped at
/// w <= H/2, h_i = w/2^i, and the canonical (or parallel) regions.
/// `levels` is ignored for the two-grid and three-level modes.
SchemeConfig plan_schedule(const DomainSpec& domain, const ProblemCoeffs& coeffs,
                           int coarse_n, int levels, const RateParameters& rates,
                           SchemeMode mode, std::int64_t dof_budget = 0);

/// Rough unknown count of every mesh the schedule builds.
std::int64_t estimate_dofs(const SchemeConfig& cfg);

struct LevelReport {
  int level = 0;  // -1: coarse, 0: mesoscopic, i >= 1: local level i
  double lambda = 0.0;
  double lambda_adjoint = 0.0;
  int dof = 0;          // unknowns of the mesh(es) solved for the primal
  int dof_adjoint = 0;  // and for the adjoint problem
  double error = 0.0;   // |lambda - reference| or NaN without a reference
  double seconds = 0.0;
};

struct SchemeState {
  CompositeFunction primal;
  CompositeFunction adjoint;
  double lambda = 0.0;
  int level = 0;
};

struct SchemeResult {
  SchemeConfig config;
  EigenResult coarse;
  MeshPtr coarse_mesh;
  MeshPtr meso_mesh;
  SchemeState state;
  std::vector<LevelReport> reports;

  const LevelReport& report(int level) const;
  int dof_coarse() const { return coarse_mesh->num_unknowns(); }
  int dof_meso() const { return meso_mesh->num_unknowns(); }
};

/// Runs the steps of one configuration, caching meshes, operators and
/// factorizations across steps.
class LdcSolver {
 public:
  explicit LdcSolver(SchemeConfig cfg);
  ~LdcSolver();
  LdcSolver(const LdcSolver&) = delete;
  LdcSolver& operator=(const LdcSolver&) = delete;

  const SchemeConfig& config() const { return cfg_; }

  /// Coarse primal and adjoint eigenpairs.
  const EigenResult& step1_coarse();
  /// u^w, u^{w*} from the coarse data and lambda^w by the quotient.
  SchemeState step2_meso();
  /// One defect-correction sweep on the level-`level` subdomains.
  void local_correct(SchemeState& state, int level);
  /// Every step in order. Factorizations are dropped once their step is done.
  SchemeResult run();

  MeshPtr coarse_mesh();
  MeshPtr meso_mesh();
  /// Fine mesh of one level-`level` region (shared by primal and adjoint).
  MeshPtr local_mesh(const SubdomainSpec& region, int level);

 private:
  struct Cache;
  LevelReport make_report(int level, double lambda, double lambda_adj, int dof,
                          int dof_adj, double seconds) const;

  SchemeConfig cfg_;
  std::unique_ptr<Cache> cache_;
};

SchemeResult run(const SchemeConfig& cfg);

// ---------------------------------------------------------------------------
// Error measurement

struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0;
  double h1_outside = 0.0;  // H1 norm over the domain minus the closure of F
};

struct ReferenceEigenpair {
  double lambda = 0.0;
  FeFunction u;
  FeFunction u_star;
};

/// Eigenpair on `base` refined `extra_depth` times. With a non-empty
/// `cache_path` the result is read from / written to that file.
ReferenceEigenpair reference_eigenpair(const MeshPtr& base, int extra_depth,
                                       const ProblemCoeffs& p,
                                       const EigenOptions& opts, bool symmetric,
                                       const std::string& cache_path = {});

/// Norms of state - alpha reference over the cells of the reference mesh,
/// where alpha is the L2-best scaling of the reference onto the state.
ErrorNorms error_report(const CompositeFunction& state,
                        const FeFunction& reference,
                        const std::optional<SubdomainSpec>& excluded);

/// log2(e[i-1] / e[i]) for successive errors at halved mesh sizes.
std::vector<double> empirical_orders(std::span<const double> errors);
/// Least-squares slope of -log2(error) against level over the last `count`
/// entries.
double fitted_order(std::span<const double> errors, int count);

}  // namespace ldc
