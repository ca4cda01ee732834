#include "mlpoly/objective.hpp"

#include <stdexcept>

namespace mlpoly {

MultilinearObjective MultilinearObjective::zero(const Hypergraph& h) {
  MultilinearObjective obj;
  obj.node_coeffs.assign(h.node_count(), 0.0);
  obj.edge_coeffs.assign(h.edge_count(), 0.0);
  return obj;
}

double MultilinearObjective::slot_coeff(const Hypergraph& h, int slot) const {
  return h.is_node_slot(slot) ? node_coeffs[slot]
                              : edge_coeffs[slot - h.node_count()];
}

void MultilinearObjective::add_to_slot(const Hypergraph& h, int slot,
                                       double value) {
  if (h.is_node_slot(slot)) {
    node_coeffs[slot] += value;
  } else {
    edge_coeffs[slot - h.node_count()] += value;
  }
}

double MultilinearObjective::evaluate(const Hypergraph& h,
                                      std::span<const std::uint8_t> x) const {
  double value = 0.0;
  for (int v = 0; v < h.node_count(); ++v) {
    if (x[v]) value += node_coeffs[v];
  }
  for (int k = 0; k < h.edge_count(); ++k) {
    if (edge_coeffs[k] == 0.0) continue;
    bool all = true;
    for (NodeId v : h.edges()[k]) {
      if (!x[v]) {
        all = false;
        break;
      }
    }
    if (all) value += edge_coeffs[k];
  }
  return value;
}

void MultilinearObjective::check_shape(const Hypergraph& h) const {
  if (static_cast<int>(node_coeffs.size()) != h.node_count() ||
      static_cast<int>(edge_coeffs.size()) != h.edge_count()) {
    throw std::invalid_argument("objective does not match the hypergraph");
  }
}

}  // namespace mlpoly
