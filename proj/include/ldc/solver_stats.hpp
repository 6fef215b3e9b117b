// SPDX-License-Identifier: Apache-2.0
//
// Process-wide residual bookkeeping for linear solves. Checking is on by
// default in debug builds and can be switched on explicitly elsewhere (the
// acceptance suite does this for a full table reproduction).

#pragma once

namespace ldc::solver_stats {

void enable_checking(bool on);
bool checking();

void record_solve(double relative_residual);
double max_solve_residual();
long solve_count();

void reset();

}  // namespace ldc::solver_stats
