#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlpoly/hypergraph.hpp"
#include "mlpoly/linear_program.hpp"
#include "mlpoly/objective.hpp"
#include "mlpoly/simplex.hpp"

namespace mlpoly {

enum class Family : std::uint8_t {
  kStandard,
  kFlower,
  kRunningIntersection,
  kCliqueRlt,
  kLiftedOddCycle,
  kParity,
  kParityEquality,
};

std::string_view to_string(Family family);

// A linear row over hypergraph slots with integer coefficients. After
// canonicalize() the terms are sorted by slot with no zeros, the relation is
// <= or =, and coefficients share no common factor that also divides rhs.
struct CutRow {
  std::vector<std::pair<int, std::int64_t>> terms;  // (slot, coefficient)
  Relation rel = Relation::kLessEqual;
  std::int64_t rhs = 0;
  Family family = Family::kStandard;
  std::string provenance;  // the generating tuple, human readable

  void canonicalize();
  // Row activity at a point given by slot values.
  std::int64_t activity(std::span<const std::int64_t> slot_values) const;
  bool holds(std::span<const std::int64_t> slot_values) const;
  // "+1 z_0_1 -1 z_0_1_2 <= 0"
  std::string linear_form(const Hypergraph& h) const;
};

// The standard linearization: for each edge e, z_e >= 0,
// z_e >= sum_{v in e} z_v - |e| + 1 and z_e <= z_v for v in e. The node
// bounds 0 <= z_v <= 1 are carried by the variable bounds.
std::vector<CutRow> standard_linearization(const Hypergraph& h);

// Flower inequalities centered at e0 with neighbours e_k (k in T), for every
// choice with e0 and all e_k inside one clique and each e0 ∩ e_k keeping at
// least two nodes outside the other intersections.
std::vector<CutRow> flower_inequalities(const Hypergraph& h);

// Running intersection inequalities confined to single cliques: neighbours
// with |e0 ∩ e_k| >= 2, pairwise non-nested intersections that have a
// running intersection ordering, and every admissible choice of w_k inside
// the separator of e0 ∩ e_k. A choice w_k = {} for a non-empty separator
// contributes the constant 1.
std::vector<CutRow> running_intersection_inequalities(const Hypergraph& h);

// The 2^|C| rows psi_U(z_C) >= 0 describing the multilinear polytope of the
// complete hypergraph on C. Throws std::out_of_range when a subset of C has
// no slot in h.
std::vector<CutRow> clique_rlt_inequalities(const Clique& c, const Hypergraph& h);

// The two lifted odd-cycle rows for each odd subset D of the link cycle
// K = {{v_i, v_{i+1}}}. Throws std::out_of_range naming the missing set when
// a required slot does not exist.
std::vector<CutRow> lifted_odd_cycle_inequalities(const LiftedCliqueCycle& cycle,
                                                  const Hypergraph& h);

struct RelaxationKind {
  enum class Kind : std::uint8_t {
    kStandard,
    kFlower,
    kRunningIntersection,
    kClique,
    kMultiClique,
  };
  Kind kind = Kind::kClique;
  int max_cycle_len = 4;  // used by kMultiClique only

  static RelaxationKind standard() { return {Kind::kStandard, 4}; }
  static RelaxationKind flower() { return {Kind::kFlower, 4}; }
  static RelaxationKind running_intersection() {
    return {Kind::kRunningIntersection, 4};
  }
  static RelaxationKind clique() { return {Kind::kClique, 4}; }
  static RelaxationKind multi_clique(int max_len = 4) {
    return {Kind::kMultiClique, max_len};
  }

  friend bool operator==(const RelaxationKind&, const RelaxationKind&) = default;
};

// "Standard", "Flower", "RunningIntersection", "Clique", "MultiClique" (the
// default length 4) or "MultiClique(M)".
std::string to_string(RelaxationKind kind);
std::optional<RelaxationKind> parse_relaxation_kind(std::string_view name);

// Removes rows identical to an earlier one after canonicalization; keeps the
// first occurrence so the order stays deterministic.
void deduplicate_rows(std::vector<CutRow>& rows);

// All rows of the named polytope, canonical and deduplicated, in the order
// standard, flower, running intersection (each edge/clique order), or clique
// rows then lifted odd-cycle rows.
std::vector<CutRow> relaxation_rows(const Hypergraph& h, RelaxationKind kind);

// LP over all slots of h, bounds [0, 1], objective from obj.
LinearProgram lp_from_rows(const Hypergraph& h, std::span<const CutRow> rows,
                           const MultilinearObjective& obj);
LinearProgram build_relaxation(const Hypergraph& h, RelaxationKind kind,
                               const MultilinearObjective& obj);

// Solves build_relaxation(h, kind, obj). MultiClique is warm-started from the
// optimal basis of the clique LP it contains; its cold start runs through
// badly conditioned bases and takes far more pivots. iterations counts both
// solves.
SolveReport solve_relaxation(const Hypergraph& h, RelaxationKind kind,
                             const MultilinearObjective& obj,
                             const SimplexOptions& options = {});

// One line per row: "<family> <provenance> : <linear form>".
std::string dump_rows(const Hypergraph& h, std::span<const CutRow> rows);

}  // namespace mlpoly
