#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlpoly {

// Dense, 0-based node index (a pixel or a message bit).
using NodeId = std::int32_t;

// A sorted, duplicate-free list of nodes. Set equality is structural equality.
using NodeSet = std::vector<NodeId>;

// Cliques and edges share the NodeSet representation; a Clique is a member of
// the maximal-clique list, an Edge is a member of the derived edge set.
using Clique = NodeSet;
using Edge = NodeSet;

// Power sets are materialized, so clique size is capped.
inline constexpr int kMaxRank = 16;

// Raised when a clique list handed to build_ugm_hypergraph contains a clique
// that is a subset of another one.
class NonMaximalCliqueError : public std::invalid_argument {
 public:
  NonMaximalCliqueError(int contained, int container);

  int contained() const { return contained_; }
  int container() const { return container_; }

 private:
  int contained_;
  int container_;
};

// Returns `nodes` sorted and deduplicated.
NodeSet make_node_set(std::vector<NodeId> nodes);

bool is_subset(std::span<const NodeId> a, std::span<const NodeId> b);
NodeSet set_intersection(std::span<const NodeId> a, std::span<const NodeId> b);
NodeSet set_union(std::span<const NodeId> a, std::span<const NodeId> b);
NodeSet set_difference(std::span<const NodeId> a, std::span<const NodeId> b);

// The UGM hypergraph: nodes 0..n-1 plus every subset of size >= 2 of every
// maximal clique. Each node and each edge owns one variable slot: node v has
// slot v, edge k (in canonical order) has slot n + k.
//
// Immutable after construction.
class Hypergraph {
 public:
  Hypergraph() = default;

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int slot_count() const { return node_count_ + edge_count(); }
  int rank() const { return rank_; }

  const std::vector<Clique>& cliques() const { return cliques_; }
  // Edges in canonical order: size ascending, then lexicographic.
  const std::vector<Edge>& edges() const { return edges_; }

  // Slot of a node set: a singleton maps to its node slot, a larger set to
  // its edge slot. Empty optional when the set is not a node or an edge.
  std::optional<int> slot_of(std::span<const NodeId> nodes) const;
  // Like slot_of but throws std::out_of_range naming the set.
  int require_slot(std::span<const NodeId> nodes) const;

  // Nodes covered by a slot (a singleton for node slots).
  NodeSet slot_nodes(int slot) const;
  bool is_node_slot(int slot) const { return slot < node_count_; }

  // Human-readable variable label, e.g. "z_3" or "z_0_1_4".
  std::string slot_label(int slot) const;

  // Textual dump: `nodes <n>`, one `clique ...` line per clique, then one
  // `edge ...` line per derived edge.
  std::string dump() const;

 private:
  friend Hypergraph build_ugm_hypergraph(std::vector<Clique> cliques,
                                         int node_count);

  int node_count_ = 0;
  int rank_ = 0;
  std::vector<Clique> cliques_;
  std::vector<Edge> edges_;
  std::map<NodeSet, int> edge_index_;
};

// Builds the hypergraph whose edge set is the union over cliques of all
// subsets of size >= 2. Throws NonMaximalCliqueError when a clique is
// contained in another, std::invalid_argument for cliques of size < 2, nodes
// out of range, repeated nodes or cliques above kMaxRank.
Hypergraph build_ugm_hypergraph(std::vector<Clique> cliques, int node_count);

// A running intersection ordering of a set family together with the induced
// separator sets N(p_1) = {} and N(p_k) = p_k ∩ (p_1 ∪ ... ∪ p_{k-1}).
struct RipOrdering {
  std::vector<int> order;           // indices into the input family
  std::vector<NodeSet> separators;  // separators[k] belongs to order[k]
};

// Finds a running intersection ordering by repeatedly eliminating a set whose
// intersection with the union of the remaining sets lies inside a single
// other remaining set. Returns nullopt when the family has no such ordering.
// Throws std::invalid_argument on an empty family or an empty member.
std::optional<RipOrdering> running_intersection_ordering(
    std::span<const NodeSet> sets);

// Bitmask variant used by the cut generators; sets are subsets of a clique
// encoded over at most 32 positions. separators are masks as well.
struct RipMaskOrdering {
  std::vector<int> order;
  std::vector<std::uint32_t> separators;
};
std::optional<RipMaskOrdering> running_intersection_ordering(
    std::span<const std::uint32_t> sets);

// Cliques C_1..C_m (m >= 3, |C_i| >= 3) with C_i ∩ C_{i+1} = {v_i, shared}
// for all i (cyclically), the link nodes v_i pairwise distinct and
// non-consecutive cliques meeting only in the shared node.
struct LiftedCliqueCycle {
  std::vector<int> cliques;  // indices into the clique list, cyclic order
  NodeId shared_node = -1;
  std::vector<NodeId> link_nodes;  // link_nodes[i] = v_i joins cliques i, i+1
};

// All lifted cycles of cliques of length 3..max_len. Each cycle is emitted
// once: the smallest clique index comes first and the smaller of its two
// neighbours second.
std::vector<LiftedCliqueCycle> enumerate_lifted_clique_cycles(
    std::span<const Clique> cliques, int max_len);

// Checks the definition directly; used by tests and by the cut generator.
bool is_lifted_clique_cycle(std::span<const Clique> cliques,
                            const LiftedCliqueCycle& cycle);

}  // namespace mlpoly
