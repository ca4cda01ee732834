#pragma once

#include <span>
#include <vector>

#include "mlpoly/linear_program.hpp"

namespace mlpoly {

struct SimplexOptions {
  // Row and bound feasibility tolerance of the final basic solution.
  double feasibility_tol = 1e-7;
  // Reduced-cost tolerance (Harris ratio test bound).
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-7;
  // Node-variable integrality tolerance used for SolveReport::is_binary.
  double integrality_tol = 1e-6;
  long max_iterations = 10'000'000;
  // Eta-file length that triggers a fresh factorization of the basis.
  int refactor_interval = 100;
  // Also refactor once the eta file holds more than this many entries per
  // variable (structural plus logical).
  double eta_fill_limit = 2.0;
  // Consecutive degenerate pivots after which Bland's rule takes over until
  // the next improving pivot.
  int bland_after = 50;
  // Perturb costs by about 1e-6 while iterating when every variable and
  // row activity is bounded; the true costs are restored before the end.
  bool perturb = true;
  // LPs with more than this many rows per variable are solved over a growing
  // working set of rows (every violated row is added, none is removed) until
  // all rows hold. 0 disables it.
  double row_generation_ratio = 3.0;
};

// Solves the maximization LP with a bounded dual simplex method on the
// revised (factorized basis plus eta file) representation. Pricing is dual
// steepest edge; the ratio test is a two-pass Harris test. The result is
// deterministic for identical input.
//
// Variables with an infinite bound on the side demanded by their cost get an
// artificial bound of +-1e7; a solution that rests on such a bound is reported
// as unbounded. Infeasibility and unboundedness are reported through the
// status, never by throwing. Throws std::invalid_argument for a malformed LP.
//
// start_basis (n + m statuses, exactly m basic) warm-starts the solve; it is
// ignored when malformed, singular or not repairable into a dual feasible
// basis by bound flips.
SolveReport solve_lp(const LinearProgram& lp, const SimplexOptions& options = {},
                     std::span<const VarStatus> start_basis = {});

// Carries a final basis of `from` over to `to`, which has the same variables.
// Structural statuses are copied; a row of `to` identical to a row of `from`
// (terms, relation, rhs) keeps that row's logical status and all other
// logicals become basic. Returns an empty vector when the variable counts
// differ or the result does not have one basic variable per row.
std::vector<VarStatus> transfer_basis(const LinearProgram& from,
                                      std::span<const VarStatus> basis,
                                      const LinearProgram& to);

}  // namespace mlpoly
