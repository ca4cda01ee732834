#include "mlpoly/hypergraph.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

namespace mlpoly {
namespace {

// Independent union of clique power sets (size >= 2) via std::set.
std::set<NodeSet> power_set_union(const std::vector<Clique>& cliques) {
  std::set<NodeSet> out;
  for (const auto& c : cliques) {
    for (unsigned mask = 0; mask < (1u << c.size()); ++mask) {
      NodeSet e;
      for (std::size_t b = 0; b < c.size(); ++b) {
        if (mask >> b & 1u) e.push_back(c[b]);
      }
      if (e.size() >= 2) out.insert(e);
    }
  }
  return out;
}

std::vector<Clique> grid(int w, int h) {
  std::vector<Clique> out;
  for (int r = 0; r + 1 < h; ++r) {
    for (int c = 0; c + 1 < w; ++c) {
      const int v = r * w + c;
      out.push_back({v, v + 1, v + w, v + w + 1});
    }
  }
  return out;
}

TEST(BuildHypergraph, SingleTriangle) {
  Hypergraph h = build_ugm_hypergraph({{0, 1, 2}}, 3);
  ASSERT_EQ(h.edge_count(), 4);
  EXPECT_EQ(h.edges()[0], (NodeSet{0, 1}));
  EXPECT_EQ(h.edges()[1], (NodeSet{0, 2}));
  EXPECT_EQ(h.edges()[2], (NodeSet{1, 2}));
  EXPECT_EQ(h.edges()[3], (NodeSet{0, 1, 2}));
  EXPECT_EQ(h.rank(), 3);
  EXPECT_EQ(h.slot_count(), 7);
}

TEST(BuildHypergraph, RankTwoChain) {
  Hypergraph h = build_ugm_hypergraph({{0, 1}, {1, 2}}, 3);
  ASSERT_EQ(h.edge_count(), 2);
  EXPECT_EQ(h.edges()[0], (NodeSet{0, 1}));
  EXPECT_EQ(h.edges()[1], (NodeSet{1, 2}));
}

TEST(BuildHypergraph, OverlappingFourCliquesShareOnePair) {
  std::vector<Clique> cliques{{0, 1, 2, 3}, {2, 3, 4, 5}};
  Hypergraph h = build_ugm_hypergraph(cliques, 6);
  const auto expected = power_set_union(cliques);
  EXPECT_EQ(h.edge_count(), static_cast<int>(expected.size()));
  EXPECT_EQ(h.edge_count(), 21);
}

TEST(BuildHypergraph, EdgesMatchIndependentUnionOnGrids) {
  for (auto [w, hgt] : {std::pair{2, 2}, {3, 3}, {4, 3}, {5, 5}}) {
    auto cliques = grid(w, hgt);
    Hypergraph h = build_ugm_hypergraph(cliques, w * hgt);
    const auto expected = power_set_union(cliques);
    ASSERT_EQ(h.edge_count(), static_cast<int>(expected.size()));
    std::set<NodeSet> got(h.edges().begin(), h.edges().end());
    EXPECT_EQ(got, expected);
    for (const auto& e : h.edges()) {
      EXPECT_TRUE(std::any_of(cliques.begin(), cliques.end(),
                              [&](const Clique& c) { return is_subset(e, c); }));
    }
  }
}

TEST(BuildHypergraph, CanonicalOrderAndSlots) {
  Hypergraph h = build_ugm_hypergraph(grid(3, 3), 9);
  for (int k = 1; k < h.edge_count(); ++k) {
    const auto& a = h.edges()[k - 1];
    const auto& b = h.edges()[k];
    EXPECT_TRUE(a.size() < b.size() || (a.size() == b.size() && a < b));
  }
  for (int s = 0; s < h.slot_count(); ++s) {
    EXPECT_EQ(h.require_slot(h.slot_nodes(s)), s);
  }
  EXPECT_EQ(h.slot_label(h.require_slot(NodeSet{0, 1, 3})), "z_0_1_3");
  EXPECT_FALSE(h.slot_of(NodeSet{0, 2}).has_value());
  EXPECT_THROW(h.require_slot(NodeSet{0, 8}), std::out_of_range);
}

TEST(BuildHypergraph, DumpIsStable) {
  const std::string a = build_ugm_hypergraph({{0, 1, 2}, {2, 3}}, 4).dump();
  const std::string b = build_ugm_hypergraph({{0, 1, 2}, {2, 3}}, 4).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a,
            "nodes 4\nclique 0 1 2\nclique 2 3\nedge 0 1\nedge 0 2\n"
            "edge 1 2\nedge 2 3\nedge 0 1 2\n");
}

TEST(BuildHypergraph, RejectsNonMaximalClique) {
  try {
    build_ugm_hypergraph({{0, 1, 2}, {1, 2}}, 3);
    FAIL() << "expected NonMaximalCliqueError";
  } catch (const NonMaximalCliqueError& e) {
    EXPECT_EQ(e.contained(), 1);
    EXPECT_EQ(e.container(), 0);
  }
  EXPECT_THROW(build_ugm_hypergraph({{0, 1}, {0, 1}}, 2), NonMaximalCliqueError);
}

TEST(BuildHypergraph, RejectsMalformedCliques) {
  EXPECT_THROW(build_ugm_hypergraph({{0}}, 1), std::invalid_argument);
  EXPECT_THROW(build_ugm_hypergraph({{0, 0, 1}}, 2), std::invalid_argument);
  EXPECT_THROW(build_ugm_hypergraph({{0, 5}}, 3), std::invalid_argument);
  Clique big(kMaxRank + 1);
  for (int i = 0; i <= kMaxRank; ++i) big[i] = i;
  EXPECT_THROW(build_ugm_hypergraph({big}, kMaxRank + 1), std::invalid_argument);
}

// Direct check of the running intersection condition for an ordering.
bool has_running_intersection(const std::vector<NodeSet>& sets,
                              const std::vector<int>& order) {
  NodeSet seen;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const NodeSet& cur = sets[order[k]];
    if (k > 0) {
      const NodeSet meet = set_intersection(cur, seen);
      bool inside = false;
      for (std::size_t j = 0; j < k && !inside; ++j) {
        inside = is_subset(meet, sets[order[j]]);
      }
      if (!inside) return false;
    }
    seen = set_union(seen, cur);
  }
  return true;
}

TEST(RunningIntersection, TwoSets) {
  std::vector<NodeSet> sets{{0, 1}, {1, 2}};
  auto r = running_intersection_ordering(sets);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->order, (std::vector<int>{0, 1}));
  EXPECT_TRUE(r->separators[0].empty());
  EXPECT_EQ(r->separators[1], (NodeSet{1}));
}

TEST(RunningIntersection, ChainKeepsOrder) {
  std::vector<NodeSet> sets{{0, 1, 2}, {1, 2, 3}, {2, 3, 4}};
  auto r = running_intersection_ordering(sets);
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(r->order, (std::vector<int>{0, 1, 2}));
  EXPECT_TRUE(r->separators[0].empty());
  EXPECT_EQ(r->separators[1], (NodeSet{1, 2}));
  EXPECT_EQ(r->separators[2], (NodeSet{2, 3}));
  EXPECT_TRUE(has_running_intersection(sets, r->order));
}

TEST(RunningIntersection, GridPatchCycleHasNone) {
  auto cliques = grid(3, 3);
  EXPECT_FALSE(running_intersection_ordering(cliques).has_value());
}

TEST(RunningIntersection, AgreesWithExhaustiveOrderingSearch) {
  std::mt19937 gen(7);
  for (int trial = 0; trial < 300; ++trial) {
    const int count = 2 + static_cast<int>(gen() % 4);
    std::vector<NodeSet> sets;
    std::vector<std::uint32_t> masks;
    for (int i = 0; i < count; ++i) {
      std::uint32_t mask = 0;
      while (mask == 0) mask = gen() & 0x3Fu;
      masks.push_back(mask);
      NodeSet s;
      for (int b = 0; b < 6; ++b) {
        if (mask >> b & 1u) s.push_back(b);
      }
      sets.push_back(s);
    }
    std::vector<int> perm(count);
    for (int i = 0; i < count; ++i) perm[i] = i;
    bool exists = false;
    do {
      exists = has_running_intersection(sets, perm);
    } while (!exists && std::next_permutation(perm.begin(), perm.end()));

    auto r = running_intersection_ordering(sets);
    ASSERT_EQ(r.has_value(), exists) << "trial " << trial;
    auto rm = running_intersection_ordering(std::span<const std::uint32_t>(masks));
    ASSERT_EQ(rm.has_value(), exists);
    if (r) {
      EXPECT_TRUE(has_running_intersection(sets, r->order));
      EXPECT_EQ(rm->order, r->order);
    }
  }
}

TEST(RunningIntersection, RejectsEmptyInput) {
  std::vector<NodeSet> none;
  EXPECT_THROW(running_intersection_ordering(none), std::invalid_argument);
  std::vector<NodeSet> with_empty{{0}, {}};
  EXPECT_THROW(running_intersection_ordering(with_empty), std::invalid_argument);
}

TEST(LiftedCycles, GridPatchesFormOneFourCycle) {
  auto cliques = grid(3, 3);
  auto cycles = enumerate_lifted_clique_cycles(cliques, 4);
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(cycles[0].cliques.size(), 4u);
  EXPECT_EQ(cycles[0].shared_node, 4);
  EXPECT_EQ(cycles[0].cliques, (std::vector<int>{0, 1, 3, 2}));
  EXPECT_TRUE(is_lifted_clique_cycle(cliques, cycles[0]));
  EXPECT_FALSE(running_intersection_ordering(cliques).has_value());
  EXPECT_TRUE(enumerate_lifted_clique_cycles(cliques, 3).empty());
}

TEST(LiftedCycles, ThreeTrianglesAroundSharedNode) {
  // Shared node 0, link nodes 1, 2, 3.
  std::vector<Clique> cliques{{0, 1, 2}, {0, 2, 3}, {0, 1, 3}};
  auto cycles = enumerate_lifted_clique_cycles(cliques, 4);
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(cycles[0].shared_node, 0);
  EXPECT_EQ(cycles[0].cliques.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    const auto meet = set_intersection(cliques[cycles[0].cliques[i]],
                                       cliques[cycles[0].cliques[(i + 1) % 3]]);
    EXPECT_EQ(meet, make_node_set({cycles[0].link_nodes[i], 0}));
  }
}

TEST(LiftedCycles, ThreeLargerCliquesMatchBruteForce) {
  // Cliques {c,a,x}-style: shared 0, links 1,2,3, private nodes 4,5,6.
  std::vector<Clique> cliques{{0, 1, 2, 4}, {0, 2, 3, 5}, {0, 1, 3, 6}};
  auto cycles = enumerate_lifted_clique_cycles(cliques, 4);
  int brute = 0;
  for (NodeId shared = 0; shared < 7; ++shared) {
    LiftedCliqueCycle c;
    c.cliques = {0, 1, 2};
    c.shared_node = shared;
    for (int i = 0; i < 3; ++i) {
      auto meet = set_intersection(cliques[i], cliques[(i + 1) % 3]);
      if (meet.size() != 2) break;
      c.link_nodes.push_back(meet[0] == shared ? meet[1] : meet[0]);
    }
    if (c.link_nodes.size() == 3 && is_lifted_clique_cycle(cliques, c)) ++brute;
  }
  EXPECT_EQ(brute, 1);
  EXPECT_EQ(static_cast<int>(cycles.size()), brute);
}

TEST(LiftedCycles, TwoCliquesGiveNothing) {
  std::vector<Clique> cliques{{0, 1, 2}, {0, 2, 3}};
  EXPECT_TRUE(enumerate_lifted_clique_cycles(cliques, 4).empty());
  EXPECT_THROW(enumerate_lifted_clique_cycles(cliques, 2), std::invalid_argument);
}

TEST(LiftedCycles, LargerGridCyclesAreValidAndUnique) {
  auto cliques = grid(5, 4);
  auto cycles = enumerate_lifted_clique_cycles(cliques, 4);
  // One cycle per interior pixel.
  EXPECT_EQ(cycles.size(), static_cast<std::size_t>((5 - 2) * (4 - 2)));
  std::set<std::pair<std::vector<int>, NodeId>> seen;
  for (const auto& c : cycles) {
    EXPECT_TRUE(is_lifted_clique_cycle(cliques, c));
    std::vector<int> members = c.cliques;
    std::sort(members.begin(), members.end());
    EXPECT_TRUE(seen.emplace(members, c.shared_node).second);
    std::vector<NodeSet> family;
    for (int idx : c.cliques) family.push_back(cliques[idx]);
    EXPECT_FALSE(running_intersection_ordering(family).has_value());
  }
}

}  // namespace
}  // namespace mlpoly
