/* SPDX-License-Identifier: Apache-2.0
 *
 * C interface of the local defect-correction eigensolver. All objects are
 * opaque handles released with the matching *_destroy function. Every call
 * returns an ldc_status; on failure ldc_last_error() describes the cause
 * (thread-local, valid until the next failing call on the same thread).
 */
#ifndef LDC_LDC_H
#define LDC_LDC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(LDC_BUILDING_LIBRARY)
#    define LDC_API __declspec(dllexport)
#  else
#    define LDC_API __declspec(dllimport)
#  endif
#else
#  define LDC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ldc_status {
  LDC_OK = 0,
  LDC_ERR_INVALID_ARGUMENT = 1,
  LDC_ERR_ALIGNMENT = 2,
  LDC_ERR_COEFFICIENT = 3,
  LDC_ERR_TRANSFER = 4,
  LDC_ERR_PARTITION = 5,
  LDC_ERR_SINGULAR = 6,
  LDC_ERR_SIZE_MISMATCH = 7,
  LDC_ERR_UNSUPPORTED_SPECTRUM = 8,
  LDC_ERR_SHIFT = 9,
  LDC_ERR_DEGENERATE_PAIRING = 10,
  LDC_ERR_BUDGET = 11,
  LDC_ERR_IO = 12,
  LDC_ERR_SHAPE = 13,
  LDC_ERR_CONFIG = 14,
  LDC_ERR_INTERNAL = 15
} ldc_status;

typedef struct ldc_config ldc_config;
typedef struct ldc_result ldc_result;
typedef struct ldc_fixture ldc_fixture;
typedef struct ldc_table ldc_table;
typedef struct ldc_comparison ldc_comparison;

typedef struct ldc_level_report {
  int level; /* -1 coarse, 0 mesoscopic, i >= 1 local level i */
  double lambda;
  double lambda_adjoint;
  int dof;
  int dof_adjoint;
  double error; /* NaN without a reference eigenvalue */
  double seconds;
} ldc_level_report;

LDC_API const char* ldc_last_error(void);
LDC_API const char* ldc_status_string(ldc_status status);
/* Sparse factorization backend description. */
LDC_API const char* ldc_solver_backend(void);
/* Surrogate exact eigenvalue of a benchmark problem; LDC_ERR_INVALID_ARGUMENT
 * when none is tabulated for (domain, b). */
LDC_API ldc_status ldc_reference_lambda(const char* domain, double bx, double by,
                                        double* lambda);

/* ---- configuration ---------------------------------------------------- */

/* Defaults: L-shape, b = (0,0), H = 1/16, 3 levels, multilevel mode, rate
 * parameters of the domain. */
LDC_API ldc_status ldc_config_create(ldc_config** out);
LDC_API void ldc_config_destroy(ldc_config* cfg);
/* "lshape", "slit" or "square"; resets s and gamma to the domain defaults. */
LDC_API ldc_status ldc_config_set_domain(ldc_config* cfg, const char* domain);
LDC_API ldc_status ldc_config_set_convection(ldc_config* cfg, double bx, double by);
/* H = 1/coarse_n. */
LDC_API ldc_status ldc_config_set_coarse(ldc_config* cfg, int coarse_n);
LDC_API ldc_status ldc_config_set_levels(ldc_config* cfg, int levels);
/* "two-grid", "three-level", "multilevel", "parallel" or "symmetric". */
LDC_API ldc_status ldc_config_set_mode(ldc_config* cfg, const char* mode);
LDC_API ldc_status ldc_config_set_rates(ldc_config* cfg, double s, double gamma);
LDC_API ldc_status ldc_config_set_reference(ldc_config* cfg, double lambda);
LDC_API ldc_status ldc_config_set_dof_budget(ldc_config* cfg, int64_t budget);
/* Mesoscopic n (w = 1/meso_n) of the planned schedule. */
LDC_API ldc_status ldc_config_meso_n(const ldc_config* cfg, int* meso_n);

/* ---- running ---------------------------------------------------------- */

LDC_API ldc_status ldc_run(const ldc_config* cfg, ldc_result** out);
LDC_API void ldc_result_destroy(ldc_result* res);
LDC_API ldc_status ldc_result_num_reports(const ldc_result* res, size_t* n);
LDC_API ldc_status ldc_result_report(const ldc_result* res, size_t index,
                                     ldc_level_report* out);
LDC_API ldc_status ldc_result_dofs(const ldc_result* res, int* dof_coarse,
                                   int* dof_meso);
/* "coarse" or "meso"; plain-text mesh dump (see README). */
LDC_API ldc_status ldc_result_write_mesh(const ldc_result* res, const char* which,
                                         const char* path);
/* "x y u u_star" per vertex of the composite partition (the finest cells
 * available at every point). */
LDC_API ldc_status ldc_result_write_nodal(const ldc_result* res, const char* path);

/* ---- benchmark tables ------------------------------------------------- */

LDC_API ldc_status ldc_fixture_load(const char* dir, int table, ldc_fixture** out);
LDC_API void ldc_fixture_destroy(ldc_fixture* fx);
LDC_API ldc_status ldc_fixture_num_rows(const ldc_fixture* fx, size_t* n);
/* Domain name and convection of the table. */
LDC_API ldc_status ldc_fixture_problem(const ldc_fixture* fx, const char** domain,
                                       double* bx, double* by);
/* Configuration reproducing one row (0-based). */
LDC_API ldc_status ldc_fixture_row_config(const ldc_fixture* fx, size_t row,
                                          ldc_config** out);

LDC_API ldc_status ldc_table_create(ldc_table** out);
LDC_API void ldc_table_destroy(ldc_table* t);
LDC_API ldc_status ldc_table_append(ldc_table* t, const ldc_result* res);
LDC_API ldc_status ldc_table_write_csv(const ldc_table* t, const char* path);
/* `rows` lists the 0-based fixture rows held by the table in order; NULL
 * with num_rows 0 means all rows. */
LDC_API ldc_status ldc_table_compare(const ldc_table* t, const ldc_fixture* fx,
                                     const size_t* rows, size_t num_rows,
                                     double tol, ldc_comparison** out);

LDC_API void ldc_comparison_destroy(ldc_comparison* c);
LDC_API ldc_status ldc_comparison_passed(const ldc_comparison* c, int* passed);
LDC_API ldc_status ldc_comparison_max_diff(const ldc_comparison* c, double* diff);
LDC_API ldc_status ldc_comparison_num_failures(const ldc_comparison* c, size_t* n);
/* Human-readable description of one failing cell. */
LDC_API ldc_status ldc_comparison_failure(const ldc_comparison* c, size_t index,
                                          const char** text);

#ifdef __cplusplus
}
#endif

#endif /* LDC_LDC_H */
