#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mlpoly/hypergraph.hpp"
#include "mlpoly/objective.hpp"
#include "mlpoly/relaxations.hpp"
#include "mlpoly/rng.hpp"
#include "mlpoly/simplex.hpp"

namespace mlpoly::testing {

// 2x2 patches of a rows x cols grid, node id r * cols + c.
inline std::vector<Clique> grid_patches(int rows, int cols) {
  std::vector<Clique> out;
  for (int r = 0; r + 1 < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      out.push_back({r * cols + c, r * cols + c + 1, (r + 1) * cols + c,
                     (r + 1) * cols + c + 1});
    }
  }
  return out;
}

// Integer coefficients in [-range, range] on every node and edge.
inline MultilinearObjective random_objective(const Hypergraph& h, Rng& rng,
                                             int range = 5) {
  MultilinearObjective obj = MultilinearObjective::zero(h);
  const auto draw = [&] {
    return static_cast<double>(static_cast<int>(rng.below(2 * range + 1)) - range);
  };
  for (auto& c : obj.node_coeffs) c = draw();
  for (auto& c : obj.edge_coeffs) c = draw();
  return obj;
}

// LP optimum of a relaxation; fails the calling test on a non-optimal status.
inline double relaxation_value(const Hypergraph& h, RelaxationKind kind,
                               const MultilinearObjective& obj) {
  const SolveReport r = solve_lp(build_relaxation(h, kind, obj));
  if (r.status != SolveStatus::kOptimal) return std::nan("");
  return r.objective_value;
}

}  // namespace mlpoly::testing
