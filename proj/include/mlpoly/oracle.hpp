#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlpoly/hypergraph.hpp"
#include "mlpoly/ldpc.hpp"
#include "mlpoly/objective.hpp"
#include "mlpoly/relaxations.hpp"
#include "mlpoly/restoration.hpp"

namespace mlpoly {

// Exhaustive optimum. Assignments are bit masks over the nodes (bit v set
// means node v is 1).
struct OracleResult {
  double optimum = 0.0;
  std::vector<std::uint64_t> optima;  // every assignment within tie_tol of optimum
  std::uint64_t enumerated = 0;

  std::vector<std::uint8_t> assignment(std::size_t k, int node_count) const;
};

inline constexpr int kOracleMaxNodes = 25;
inline constexpr int kOracleMaxCutSupport = 20;

// Maximum of the multilinear objective (constant excluded) over all binary
// node assignments. Throws std::invalid_argument above kOracleMaxNodes.
OracleResult brute_force_map(const Hypergraph& h, const MultilinearObjective& obj,
                             double tie_tol = 1e-9);

// Maximum of sum_{y_v=1} x_v - sum_{y_v=0} x_v over all words satisfying
// every parity row with even parity. Codewords are enumerated from a GF(2)
// nullspace basis; throws std::invalid_argument when n > 64 or the code has
// more than 2^kOracleMaxNodes codewords.
OracleResult brute_force_decode(const LdpcCode& code, std::span<const std::uint8_t> y,
                                double tie_tol = 1e-9);

// True iff the row holds at every point of the multilinear set of h. Only
// the nodes under the row's support are enumerated; throws
// std::invalid_argument when they exceed kOracleMaxCutSupport.
bool validate_cut(const CutRow& row, const Hypergraph& h);

struct GridMapResult {
  double energy = 0.0;  // restoration_energy of argmax, constant included
  BitImage argmax;
};

inline constexpr int kGridOracleMaxSide = 20;

// Exact maximum of restoration_energy by dynamic programming over a row-major
// frontier of the last (side + 1) pixels, side being the shorter image side.
// Independent of the LP machinery. Throws std::invalid_argument when the
// shorter side exceeds kGridOracleMaxSide or an image side is below 2.
GridMapResult grid_map_oracle(const BitImage& noisy, double alpha,
                              const PatternPotentials& phi);

}  // namespace mlpoly
