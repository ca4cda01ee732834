#include "mlpoly/hypergraph.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

namespace mlpoly {

NonMaximalCliqueError::NonMaximalCliqueError(int contained, int container)
    : std::invalid_argument("clique " + std::to_string(contained) +
                            " is contained in clique " +
                            std::to_string(container) +
                            "; clique list must contain maximal cliques only"),
      contained_(contained),
      container_(container) {}

NodeSet make_node_set(std::vector<NodeId> nodes) {
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

bool is_subset(std::span<const NodeId> a, std::span<const NodeId> b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

NodeSet set_intersection(std::span<const NodeId> a, std::span<const NodeId> b) {
  NodeSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return out;
}

NodeSet set_union(std::span<const NodeId> a, std::span<const NodeId> b) {
  NodeSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(),
                 std::back_inserter(out));
  return out;
}

NodeSet set_difference(std::span<const NodeId> a, std::span<const NodeId> b) {
  NodeSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                      std::back_inserter(out));
  return out;
}

namespace {

bool canonical_less(const NodeSet& a, const NodeSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::string join_nodes(std::span<const NodeId> nodes, char sep) {
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) out += sep;
    out += std::to_string(nodes[i]);
  }
  return out;
}

}  // namespace

std::optional<int> Hypergraph::slot_of(std::span<const NodeId> nodes) const {
  if (nodes.size() == 1) {
    if (nodes[0] < 0 || nodes[0] >= node_count_) return std::nullopt;
    return nodes[0];
  }
  if (nodes.size() < 2) return std::nullopt;
  auto it = edge_index_.find(NodeSet(nodes.begin(), nodes.end()));
  if (it == edge_index_.end()) return std::nullopt;
  return node_count_ + it->second;
}

int Hypergraph::require_slot(std::span<const NodeId> nodes) const {
  if (auto slot = slot_of(nodes)) return *slot;
  throw std::out_of_range("no variable slot for node set {" +
                          join_nodes(nodes, ',') + "}");
}

NodeSet Hypergraph::slot_nodes(int slot) const {
  if (slot < 0 || slot >= slot_count()) {
    throw std::out_of_range("slot " + std::to_string(slot) + " out of range");
  }
  if (slot < node_count_) return {slot};
  return edges_[slot - node_count_];
}

std::string Hypergraph::slot_label(int slot) const {
  return "z_" + join_nodes(slot_nodes(slot), '_');
}

std::string Hypergraph::dump() const {
  std::ostringstream os;
  os << "nodes " << node_count_ << '\n';
  for (const auto& c : cliques_) os << "clique " << join_nodes(c, ' ') << '\n';
  for (const auto& e : edges_) os << "edge " << join_nodes(e, ' ') << '\n';
  return os.str();
}

Hypergraph build_ugm_hypergraph(std::vector<Clique> cliques, int node_count) {
  if (node_count < 0) throw std::invalid_argument("negative node count");
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    Clique& c = cliques[i];
    std::sort(c.begin(), c.end());
    if (std::adjacent_find(c.begin(), c.end()) != c.end()) {
      throw std::invalid_argument("clique " + std::to_string(i) +
                                  " repeats a node");
    }
    if (c.size() < 2) {
      throw std::invalid_argument("clique " + std::to_string(i) +
                                  " has fewer than two nodes");
    }
    if (static_cast<int>(c.size()) > kMaxRank) {
      throw std::invalid_argument("clique " + std::to_string(i) +
                                  " exceeds the rank cap of " +
                                  std::to_string(kMaxRank));
    }
    if (c.front() < 0 || c.back() >= node_count) {
      throw std::invalid_argument("clique " + std::to_string(i) +
                                  " references a node outside [0, " +
                                  std::to_string(node_count) + ")");
    }
  }

  // Containment check restricted to cliques sharing the smaller one's first
  // node.
  std::vector<std::vector<int>> incident(node_count);
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    for (NodeId v : cliques[i]) incident[v].push_back(static_cast<int>(i));
  }
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    for (int j : incident[cliques[i].front()]) {
      if (j == static_cast<int>(i)) continue;
      const Clique& small = cliques[i];
      const Clique& big = cliques[j];
      if (small.size() > big.size()) continue;
      if (small.size() == big.size() && static_cast<int>(i) > j) continue;
      if (is_subset(small, big)) {
        throw NonMaximalCliqueError(static_cast<int>(i), j);
      }
    }
  }

  Hypergraph h;
  h.node_count_ = node_count;
  std::vector<NodeSet> edges;
  for (const Clique& c : cliques) {
    h.rank_ = std::max(h.rank_, static_cast<int>(c.size()));
    const std::uint32_t full = (1u << c.size()) - 1;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      if (std::popcount(mask) < 2) continue;
      NodeSet e;
      for (std::size_t b = 0; b < c.size(); ++b) {
        if (mask & (1u << b)) e.push_back(c[b]);
      }
      edges.push_back(std::move(e));
    }
  }
  std::sort(edges.begin(), edges.end(), canonical_less);
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (std::size_t k = 0; k < edges.size(); ++k) {
    h.edge_index_.emplace(edges[k], static_cast<int>(k));
  }
  h.edges_ = std::move(edges);
  h.cliques_ = std::move(cliques);
  return h;
}

namespace {

// Generic elimination shared by the NodeSet and bitmask front ends. `Set`
// must support intersection, union, subset and emptiness via the ops struct.
template <typename Set, typename Ops>
std::optional<std::pair<std::vector<int>, std::vector<Set>>> eliminate(
    std::span<const Set> sets, const Ops& ops) {
  const int n = static_cast<int>(sets.size());
  std::vector<bool> alive(n, true);
  std::vector<int> removal;
  removal.reserve(n);
  for (int remaining = n; remaining > 1; --remaining) {
    int picked = -1;
    // Later sets are preferred so that an already ordered family keeps its
    // order.
    for (int i = n - 1; i >= 0 && picked < 0; --i) {
      if (!alive[i]) continue;
      Set rest = ops.empty();
      for (int j = 0; j < n; ++j) {
        if (j != i && alive[j]) rest = ops.unite(rest, sets[j]);
      }
      const Set meet = ops.intersect(sets[i], rest);
      for (int j = 0; j < n; ++j) {
        if (j != i && alive[j] && ops.subset(meet, sets[j])) {
          picked = i;
          break;
        }
      }
    }
    if (picked < 0) return std::nullopt;
    alive[picked] = false;
    removal.push_back(picked);
  }
  for (int i = 0; i < n; ++i) {
    if (alive[i]) removal.push_back(i);
  }
  std::reverse(removal.begin(), removal.end());

  std::vector<Set> separators;
  separators.reserve(n);
  Set seen = ops.empty();
  for (int idx : removal) {
    separators.push_back(ops.intersect(sets[idx], seen));
    seen = ops.unite(seen, sets[idx]);
  }
  return std::make_pair(std::move(removal), std::move(separators));
}

struct NodeSetOps {
  NodeSet empty() const { return {}; }
  NodeSet unite(const NodeSet& a, const NodeSet& b) const {
    return set_union(a, b);
  }
  NodeSet intersect(const NodeSet& a, const NodeSet& b) const {
    return set_intersection(a, b);
  }
  bool subset(const NodeSet& a, const NodeSet& b) const {
    return is_subset(a, b);
  }
};

struct MaskOps {
  std::uint32_t empty() const { return 0; }
  std::uint32_t unite(std::uint32_t a, std::uint32_t b) const { return a | b; }
  std::uint32_t intersect(std::uint32_t a, std::uint32_t b) const {
    return a & b;
  }
  bool subset(std::uint32_t a, std::uint32_t b) const { return (a & ~b) == 0; }
};

}  // namespace

std::optional<RipOrdering> running_intersection_ordering(
    std::span<const NodeSet> sets) {
  if (sets.empty()) throw std::invalid_argument("empty set family");
  for (const auto& s : sets) {
    if (s.empty()) throw std::invalid_argument("empty member in set family");
  }
  auto result = eliminate<NodeSet>(sets, NodeSetOps{});
  if (!result) return std::nullopt;
  return RipOrdering{std::move(result->first), std::move(result->second)};
}

std::optional<RipMaskOrdering> running_intersection_ordering(
    std::span<const std::uint32_t> sets) {
  if (sets.empty()) throw std::invalid_argument("empty set family");
  for (auto s : sets) {
    if (s == 0) throw std::invalid_argument("empty member in set family");
  }
  auto result = eliminate<std::uint32_t>(sets, MaskOps{});
  if (!result) return std::nullopt;
  return RipMaskOrdering{std::move(result->first), std::move(result->second)};
}

bool is_lifted_clique_cycle(std::span<const Clique> cliques,
                            const LiftedCliqueCycle& cycle) {
  const int m = static_cast<int>(cycle.cliques.size());
  if (m < 3 || static_cast<int>(cycle.link_nodes.size()) != m) return false;
  for (int idx : cycle.cliques) {
    if (idx < 0 || idx >= static_cast<int>(cliques.size())) return false;
    if (cliques[idx].size() < 3) return false;
  }
  NodeSet links(cycle.link_nodes.begin(), cycle.link_nodes.end());
  std::sort(links.begin(), links.end());
  if (std::adjacent_find(links.begin(), links.end()) != links.end()) {
    return false;
  }
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      const NodeSet meet = set_intersection(cliques[cycle.cliques[i]],
                                            cliques[cycle.cliques[j]]);
      const bool consecutive = (j == i + 1) || (i == 0 && j == m - 1);
      NodeSet expected{cycle.shared_node};
      if (consecutive) {
        const NodeId link = (j == i + 1) ? cycle.link_nodes[i]
                                         : cycle.link_nodes[m - 1];
        expected = make_node_set({link, cycle.shared_node});
      }
      if (meet != expected) return false;
    }
  }
  return true;
}

std::vector<LiftedCliqueCycle> enumerate_lifted_clique_cycles(
    std::span<const Clique> cliques, int max_len) {
  if (max_len < 3) throw std::invalid_argument("cycle length bound below 3");
  std::vector<LiftedCliqueCycle> out;
  if (cliques.size() < 3) return out;

  NodeId max_node = -1;
  for (const auto& c : cliques) {
    if (!c.empty()) max_node = std::max(max_node, c.back());
  }
  std::vector<std::vector<int>> incident(max_node + 1);
  for (std::size_t i = 0; i < cliques.size(); ++i) {
    if (cliques[i].size() < 3) continue;
    for (NodeId v : cliques[i]) incident[v].push_back(static_cast<int>(i));
  }

  for (NodeId shared = 0; shared <= max_node; ++shared) {
    const std::vector<int>& around = incident[shared];
    const int k = static_cast<int>(around.size());
    if (k < 3) continue;
    // link[a][b] = the other node of C_a ∩ C_b when |C_a ∩ C_b| = 2.
    std::vector<std::vector<NodeId>> link(k, std::vector<NodeId>(k, -1));
    std::vector<std::vector<bool>> only_shared(k, std::vector<bool>(k, false));
    for (int a = 0; a < k; ++a) {
      for (int b = a + 1; b < k; ++b) {
        const NodeSet meet =
            set_intersection(cliques[around[a]], cliques[around[b]]);
        if (meet.size() == 2) {
          const NodeId other = meet[0] == shared ? meet[1] : meet[0];
          link[a][b] = link[b][a] = other;
        } else if (meet.size() == 1) {
          only_shared[a][b] = only_shared[b][a] = true;
        }
      }
    }

    std::vector<int> path;
    std::vector<NodeId> links;
    auto extend = [&](auto&& self) -> void {
      const int last = path.back();
      const int len = static_cast<int>(path.size());
      if (len >= 3 && link[last][path[0]] >= 0 && path[1] < last) {
        const NodeId closing = link[last][path[0]];
        if (std::find(links.begin(), links.end(), closing) == links.end()) {
          LiftedCliqueCycle cyc;
          cyc.shared_node = shared;
          for (int p : path) cyc.cliques.push_back(around[p]);
          cyc.link_nodes = links;
          cyc.link_nodes.push_back(closing);
          out.push_back(std::move(cyc));
        }
      }
      if (len == max_len) return;
      for (int next = path[0] + 1; next < k; ++next) {
        if (link[last][next] < 0) continue;
        if (std::find(path.begin(), path.end(), next) != path.end()) continue;
        const NodeId via = link[last][next];
        if (std::find(links.begin(), links.end(), via) != links.end()) continue;
        // Non-consecutive members may only meet in the shared node; the
        // first clique is checked against the closing clique separately.
        bool ok = true;
        for (int i = 1; i + 1 < len && ok; ++i) {
          ok = only_shared[path[i]][next];
        }
        if (!ok) continue;
        if (len >= 2 && !only_shared[path[0]][next] && link[path[0]][next] < 0) {
          continue;
        }
        path.push_back(next);
        links.push_back(via);
        self(self);
        path.pop_back();
        links.pop_back();
      }
    };
    for (int start = 0; start < k; ++start) {
      path.assign(1, start);
      links.clear();
      extend(extend);
    }
  }

  // A cycle whose first and last members are not consecutive-only may still
  // have been produced when an intermediate clique is linked to the first
  // one; filter with the definition.
  std::erase_if(out, [&](const LiftedCliqueCycle& c) {
    return !is_lifted_clique_cycle(cliques, c);
  });
  std::sort(out.begin(), out.end(),
            [](const LiftedCliqueCycle& a, const LiftedCliqueCycle& b) {
              return a.cliques < b.cliques;
            });
  return out;
}

}  // namespace mlpoly
