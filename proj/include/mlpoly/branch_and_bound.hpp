#pragma once

#include <span>
#include <vector>

#include "mlpoly/linear_program.hpp"
#include "mlpoly/simplex.hpp"

namespace mlpoly {

struct BranchAndBoundOptions {
  SimplexOptions lp;
  long max_nodes = 1'000'000;
  // A subproblem is pruned when its LP bound does not exceed the incumbent
  // by more than this.
  double prune_tol = 1e-9;
};

// Exact maximum over assignments with binary_vars in {0, 1}. Best-first
// branch and bound on LP bounds; branches on the most fractional variable
// (lowest index on ties). When every branching variable is integral the
// subproblem is re-solved with them fixed, which makes the incumbent exact
// for the auxiliary variables too. Exhausting max_nodes yields status
// iteration_limit with the best incumbent found.
IpReport solve_binary_ip(const LinearProgram& lp, std::span<const int> binary_vars,
                         const BranchAndBoundOptions& options = {});

struct Rounding {
  bool is_binary = false;
  std::vector<double> rounded;
};

// Node variables within tol of an integer are snapped to it; is_binary is
// true when all of them were. Each node variable is then rounded to the
// nearest integer with an exact tie (0.5) going down. Other entries are
// copied unchanged.
Rounding classify_and_round(const SolveReport& report, double tol = 1e-6);

}  // namespace mlpoly
