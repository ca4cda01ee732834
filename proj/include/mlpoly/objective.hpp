#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlpoly/hypergraph.hpp"

namespace mlpoly {

// max  sum_v c_v z_v + sum_e c_e z_e  (+ constant) over a hypergraph.
// node_coeffs already include any data term; alpha is kept for reporting.
struct MultilinearObjective {
  double alpha = 0.0;
  std::vector<double> node_coeffs;  // indexed by node
  std::vector<double> edge_coeffs;  // aligned with Hypergraph::edges()
  double constant = 0.0;            // never part of an LP objective

  static MultilinearObjective zero(const Hypergraph& h);

  // Coefficient of a variable slot (node or edge).
  double slot_coeff(const Hypergraph& h, int slot) const;
  void add_to_slot(const Hypergraph& h, int slot, double value);

  // Objective at a binary node assignment with edge values as products.
  // The constant is not included.
  double evaluate(const Hypergraph& h, std::span<const std::uint8_t> x) const;

  // Throws std::invalid_argument when the vectors do not fit `h`.
  void check_shape(const Hypergraph& h) const;
};

}  // namespace mlpoly
