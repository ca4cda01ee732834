#include "mlpoly/relaxations.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <string>

#include "mlpoly/oracle.hpp"
#include "mlpoly/simplex.hpp"
#include "test_support.hpp"

namespace mlpoly {
namespace {

using testing::grid_patches;
using testing::random_objective;
using testing::relaxation_value;

std::set<std::string> forms(const Hypergraph& h, const std::vector<CutRow>& rows) {
  std::set<std::string> out;
  for (const CutRow& r : rows) out.insert(r.linear_form(h));
  return out;
}

std::vector<CutRow> of_family(const std::vector<CutRow>& rows, Family f) {
  std::vector<CutRow> out;
  for (const CutRow& r : rows) {
    if (r.family == f) out.push_back(r);
  }
  return out;
}

// Random families of maximal cliques over few nodes.
Hypergraph random_hypergraph(Rng& rng, int nodes, int max_rank) {
  for (;;) {
    std::vector<Clique> draws;
    const int count = 1 + static_cast<int>(rng.below(4));
    for (int k = 0; k < count; ++k) {
      const int size = 2 + static_cast<int>(rng.below(max_rank - 1));
      std::vector<int> perm(nodes);
      for (int i = 0; i < nodes; ++i) perm[i] = i;
      rng.shuffle(std::span<int>(perm));
      Clique c(perm.begin(), perm.begin() + size);
      std::sort(c.begin(), c.end());
      draws.push_back(c);
    }
    std::vector<Clique> maximal;
    for (std::size_t i = 0; i < draws.size(); ++i) {
      bool keep = true;
      for (std::size_t j = 0; j < draws.size() && keep; ++j) {
        if (i == j) continue;
        const bool inside = std::includes(draws[j].begin(), draws[j].end(),
                                          draws[i].begin(), draws[i].end());
        if (inside && (draws[i] != draws[j] || j < i)) keep = false;
      }
      if (keep) maximal.push_back(draws[i]);
    }
    if (!maximal.empty()) return build_ugm_hypergraph(maximal, nodes);
  }
}

const std::vector<Clique> kThreeCliqueCycle = {{0, 1, 2, 4}, {0, 2, 3, 5}, {0, 1, 3, 6}};

std::vector<RelaxationKind> all_kinds() {
  return {RelaxationKind::standard(), RelaxationKind::flower(),
          RelaxationKind::running_intersection(), RelaxationKind::clique(),
          RelaxationKind::multi_clique(4)};
}

TEST(StandardLinearization, EdgeRows) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1}}, 2);
  const auto rows = standard_linearization(h);
  EXPECT_EQ(forms(h, rows), (std::set<std::string>{
                                "-1 z_0_1 <= 0",
                                "+1 z_0 +1 z_1 -1 z_0_1 <= 1",
                                "-1 z_0 +1 z_0_1 <= 0",
                                "-1 z_1 +1 z_0_1 <= 0",
                            }));
  const Hypergraph h3 = build_ugm_hypergraph({{0, 1, 2}}, 3);
  int triple_rows = 0;
  const int triple = h3.require_slot(std::vector<NodeId>{0, 1, 2});
  for (const CutRow& r : standard_linearization(h3)) {
    triple_rows += std::any_of(r.terms.begin(), r.terms.end(),
                               [&](const auto& t) { return t.first == triple; });
  }
  EXPECT_EQ(triple_rows, 5);
}

TEST(StandardLinearization, CountMatchesFormula) {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const Hypergraph h = random_hypergraph(rng, 7, 5);
    std::size_t expected = 0;
    for (const Edge& e : h.edges()) expected += e.size() + 2;
    EXPECT_EQ(standard_linearization(h).size(), expected);
  }
  EXPECT_EQ(standard_linearization(build_ugm_hypergraph({{0, 1, 2, 3}}, 4)).size(), 50u);
}

TEST(Flower, DocumentedRows) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1, 2, 3}}, 4);
  const auto rows = flower_inequalities(h);
  const auto f = forms(h, rows);
  EXPECT_TRUE(f.count("+1 z_0_1 +1 z_2_3 -1 z_0_1_2_3 <= 1"));
  EXPECT_TRUE(f.count("+1 z_2 +1 z_0_1 -1 z_0_1_2 <= 1"));
  for (const CutRow& r : rows) {
    EXPECT_EQ(r.provenance.find("e0={0,1,2} T={0,1};{1,2}"), std::string::npos)
        << r.provenance;
  }
}

TEST(RunningIntersection, DocumentedRows) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1, 2, 3}}, 4);
  const auto f = forms(h, running_intersection_inequalities(h));
  EXPECT_TRUE(f.count("-1 z_1_2 +1 z_0_1_2 +1 z_1_2_3 -1 z_0_1_2_3 <= 0"));
  EXPECT_TRUE(f.count("+1 z_0_1_2 +1 z_1_2_3 -1 z_0_1_2_3 <= 1"));
}

TEST(RunningIntersection, SkipsFamiliesWithoutRip) {
  // Intersections {0,1}, {1,2}, {0,2} form a cycle.
  const Hypergraph h = build_ugm_hypergraph({{0, 1, 2, 3}}, 4);
  const int a = h.require_slot(std::vector<NodeId>{0, 1});
  const int b = h.require_slot(std::vector<NodeId>{1, 2});
  const int c = h.require_slot(std::vector<NodeId>{0, 2});
  for (const CutRow& r : running_intersection_inequalities(h)) {
    int hits = 0;
    for (const auto& [slot, coef] : r.terms) {
      if ((slot == a || slot == b || slot == c) && coef == 1) ++hits;
    }
    EXPECT_LT(hits, 3) << r.provenance;
  }
}

TEST(CliqueRlt, RankTwoIsMcCormick) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1}}, 2);
  EXPECT_EQ(forms(h, clique_rlt_inequalities({0, 1}, h)),
            forms(h, standard_linearization(h)));
}

TEST(CliqueRlt, TripleFullRow) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1, 2}}, 3);
  const auto f = forms(h, clique_rlt_inequalities({0, 1, 2}, h));
  EXPECT_TRUE(f.count("+1 z_0 +1 z_1 +1 z_2 -1 z_0_1 -1 z_0_2 -1 z_1_2 +1 z_0_1_2 <= 1"));
  EXPECT_EQ(f.size(), 8u);
}

TEST(CliqueRlt, SixteenValidRowsOnFourClique) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1, 2, 3}}, 4);
  const auto rows = clique_rlt_inequalities({0, 1, 2, 3}, h);
  EXPECT_EQ(rows.size(), 16u);
  for (const CutRow& r : rows) EXPECT_TRUE(validate_cut(r, h)) << r.provenance;
}

TEST(CliqueRlt, MissingSlotThrows) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1}, {1, 2}}, 3);
  EXPECT_THROW(clique_rlt_inequalities({0, 1, 2}, h), std::out_of_range);
}

TEST(LiftedOddCycle, ThreeCycleFullD) {
  const Hypergraph h = build_ugm_hypergraph(kThreeCliqueCycle, 7);
  const auto cycles = enumerate_lifted_clique_cycles(h.cliques(), 4);
  ASSERT_EQ(cycles.size(), 1u);
  const auto rows = lifted_odd_cycle_inequalities(cycles[0], h);
  EXPECT_EQ(rows.size(), 8u);
  EXPECT_TRUE(forms(h, rows).count(
      "-1 z_0 +1 z_0_1 +1 z_0_2 +1 z_0_3 -1 z_0_1_2 -1 z_0_1_3 -1 z_0_2_3 <= 0"));
}

TEST(LiftedOddCycle, FourCycleHasSixteenRows) {
  const Hypergraph h = build_ugm_hypergraph(grid_patches(3, 3), 9);
  const auto cycles = enumerate_lifted_clique_cycles(h.cliques(), 4);
  ASSERT_EQ(cycles.size(), 1u);
  EXPECT_EQ(lifted_odd_cycle_inequalities(cycles[0], h).size(), 16u);
}

TEST(LiftedOddCycle, CycleOutsideHypergraphThrows) {
  const Hypergraph grid = build_ugm_hypergraph(grid_patches(3, 3), 9);
  const auto cycle = enumerate_lifted_clique_cycles(grid.cliques(), 4).at(0);
  const Hypergraph partial = build_ugm_hypergraph({{0, 1, 3, 4}, {5, 7, 8}}, 9);
  EXPECT_THROW(lifted_odd_cycle_inequalities(cycle, partial), std::out_of_range);
}

// Every emitted row must hold on the whole multilinear set.
TEST(Validity, AllFamiliesOnStructuredInstances) {
  const std::vector<std::pair<std::vector<Clique>, int>> cases = {
      {grid_patches(3, 3), 9},
      {grid_patches(3, 4), 12},
      {kThreeCliqueCycle, 7},
      {{{0, 1, 2}, {1, 2, 3}, {2, 3, 4}}, 5},
      {{{0, 1, 2, 3, 4}}, 5},
      {{{0, 1, 2, 3}, {2, 3, 4, 5}}, 6},
  };
  for (const auto& [cliques, n] : cases) {
    const Hypergraph h = build_ugm_hypergraph(cliques, n);
    for (RelaxationKind kind : all_kinds()) {
      for (const CutRow& r : relaxation_rows(h, kind)) {
        ASSERT_TRUE(validate_cut(r, h)) << to_string(r.family) << " " << r.provenance;
      }
    }
  }
}

TEST(Validity, RandomHypergraphs) {
  Rng rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const Hypergraph h = random_hypergraph(rng, 7, 4);
    for (RelaxationKind kind : all_kinds()) {
      for (const CutRow& r : relaxation_rows(h, kind)) {
        ASSERT_TRUE(validate_cut(r, h)) << to_string(r.family) << " " << r.provenance;
      }
    }
  }
}

TEST(Rows, NoDuplicatesAfterCanonicalization) {
  const Hypergraph h = build_ugm_hypergraph(grid_patches(3, 4), 12);
  for (RelaxationKind kind : all_kinds()) {
    const auto rows = relaxation_rows(h, kind);
    std::set<std::string> seen;
    for (const CutRow& r : rows) {
      EXPECT_TRUE(seen.insert(r.linear_form(h)).second) << r.linear_form(h);
    }
  }
}

TEST(Rows, FamiliesComposeBySuperset) {
  const Hypergraph h = build_ugm_hypergraph(grid_patches(3, 3), 9);
  const auto std_rows = forms(h, relaxation_rows(h, RelaxationKind::standard()));
  const auto fl_rows = forms(h, relaxation_rows(h, RelaxationKind::flower()));
  const auto ri_rows = forms(h, relaxation_rows(h, RelaxationKind::running_intersection()));
  const auto cl_rows = forms(h, relaxation_rows(h, RelaxationKind::clique()));
  const auto mcl_rows = forms(h, relaxation_rows(h, RelaxationKind::multi_clique()));
  EXPECT_TRUE(std::includes(fl_rows.begin(), fl_rows.end(), std_rows.begin(), std_rows.end()));
  EXPECT_TRUE(std::includes(ri_rows.begin(), ri_rows.end(), fl_rows.begin(), fl_rows.end()));
  EXPECT_TRUE(std::includes(mcl_rows.begin(), mcl_rows.end(), cl_rows.begin(), cl_rows.end()));
  EXPECT_GT(mcl_rows.size(), cl_rows.size());
}

TEST(Kind, NamesRoundTrip) {
  for (RelaxationKind kind : all_kinds()) {
    EXPECT_EQ(parse_relaxation_kind(to_string(kind)), kind);
  }
  EXPECT_EQ(parse_relaxation_kind("MultiClique(6)"), RelaxationKind::multi_clique(6));
  EXPECT_FALSE(parse_relaxation_kind("MultiClique(2)").has_value());
  EXPECT_FALSE(parse_relaxation_kind("clique").has_value());
  const Hypergraph h = build_ugm_hypergraph(grid_patches(3, 3), 9);
  EXPECT_THROW(relaxation_rows(h, RelaxationKind::multi_clique(2)), std::invalid_argument);
}

TEST(Chain, OptimaDecreaseAlongTheHierarchy) {
  Rng rng(21);
  const std::vector<std::pair<std::vector<Clique>, int>> fixed = {
      {grid_patches(3, 3), 9}, {grid_patches(3, 4), 12}, {kThreeCliqueCycle, 7}};
  std::vector<Hypergraph> graphs;
  for (const auto& [c, n] : fixed) graphs.push_back(build_ugm_hypergraph(c, n));
  for (int i = 0; i < 20; ++i) graphs.push_back(random_hypergraph(rng, 7, 4));
  for (const Hypergraph& h : graphs) {
    for (int k = 0; k < 3; ++k) {
      const MultilinearObjective obj = random_objective(h, rng);
      std::vector<double> values;
      for (RelaxationKind kind : all_kinds()) values.push_back(relaxation_value(h, kind, obj));
      values.push_back(brute_force_map(h, obj).optimum);
      for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        ASSERT_GE(values[i], values[i + 1] - 1e-6) << "position " << i;
      }
    }
  }
}

TEST(Strictness, CliqueBeatsRunningIntersectionOnATriangle) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1, 2}}, 3);
  MultilinearObjective obj = MultilinearObjective::zero(h);
  obj.node_coeffs = {1, 1, 1};
  for (int e = 0; e < 3; ++e) obj.edge_coeffs[e] = -1;
  const double ri = relaxation_value(h, RelaxationKind::running_intersection(), obj);
  const double cl = relaxation_value(h, RelaxationKind::clique(), obj);
  EXPECT_NEAR(cl, 1.0, 1e-9);
  EXPECT_NEAR(cl, brute_force_map(h, obj).optimum, 1e-9);
  EXPECT_GT(ri, cl + 0.25);
}

void expect_exact(const Hypergraph& h, RelaxationKind kind, int trials, std::uint64_t seed) {
  Rng rng(seed);
  for (int t = 0; t < trials; ++t) {
    const MultilinearObjective obj = random_objective(h, rng);
    ASSERT_NEAR(relaxation_value(h, kind, obj), brute_force_map(h, obj).optimum, 1e-6)
        << to_string(kind) << " trial " << t;
  }
}

TEST(Exactness, SingleClique) {
  for (int size : {3, 4, 5}) {
    Clique c;
    for (int v = 0; v < size; ++v) c.push_back(v);
    expect_exact(build_ugm_hypergraph({c}, size), RelaxationKind::clique(), 100, size);
  }
}

TEST(Exactness, RipCliqueChain) {
  const Hypergraph h =
      build_ugm_hypergraph({{0, 1, 2, 3}, {2, 3, 4, 5}, {4, 5, 6, 7}, {5, 7, 8}}, 9);
  expect_exact(h, RelaxationKind::clique(), 50, 7);
}

TEST(Exactness, LiftedCycles) {
  expect_exact(build_ugm_hypergraph(kThreeCliqueCycle, 7), RelaxationKind::multi_clique(), 100, 8);
  expect_exact(build_ugm_hypergraph(grid_patches(3, 3), 9), RelaxationKind::multi_clique(), 100, 9);
}

// Without the cycle rows the clique LP is loose somewhere on a lifted cycle.
TEST(Exactness, CliqueAloneIsLooseOnALiftedCycle) {
  const Hypergraph h = build_ugm_hypergraph(grid_patches(3, 3), 9);
  Rng rng(14);
  int loose = 0;
  for (int t = 0; t < 300 && loose == 0; ++t) {
    const MultilinearObjective obj = random_objective(h, rng);
    if (relaxation_value(h, RelaxationKind::clique(), obj) >
        brute_force_map(h, obj).optimum + 1e-6) {
      ++loose;
    }
  }
  EXPECT_GT(loose, 0);
}

TEST(Exactness, BergeAcyclicPairs) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1}, {1, 2}, {2, 3}, {3, 4}, {2, 5}}, 6);
  expect_exact(h, RelaxationKind::standard(), 100, 10);
}

// Rows confined to no single clique are implied by the in-clique ones.
TEST(Redundancy, OutOfCliqueFlowerLeavesOptimumUnchanged) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1, 2}, {1, 2, 3}}, 4);
  CutRow extra;
  extra.terms = {{0, 1},
                 {h.require_slot(std::vector<NodeId>{1, 2, 3}), 1},
                 {h.require_slot(std::vector<NodeId>{0, 1, 2}), -1}};
  extra.rhs = 1;
  extra.family = Family::kFlower;
  extra.canonicalize();
  ASSERT_TRUE(validate_cut(extra, h));
  Rng rng(12);
  for (RelaxationKind kind : {RelaxationKind::flower(), RelaxationKind::running_intersection()}) {
    for (int t = 0; t < 50; ++t) {
      const MultilinearObjective obj = random_objective(h, rng);
      auto rows = relaxation_rows(h, kind);
      const double base = solve_lp(lp_from_rows(h, rows, obj)).objective_value;
      rows.push_back(extra);
      const double with_extra = solve_lp(lp_from_rows(h, rows, obj)).objective_value;
      ASSERT_NEAR(base, with_extra, 1e-7);
    }
  }
}

TEST(Dump, OneLinePerRow) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1}}, 2);
  const auto rows = relaxation_rows(h, RelaxationKind::clique());
  EXPECT_EQ(dump_rows(h, rows),
            "clique_rlt C={0,1} U={} : -1 z_0_1 <= 0\n"
            "clique_rlt C={0,1} U={0} : -1 z_1 +1 z_0_1 <= 0\n"
            "clique_rlt C={0,1} U={1} : -1 z_0 +1 z_0_1 <= 0\n"
            "clique_rlt C={0,1} U={0,1} : +1 z_0 +1 z_1 -1 z_0_1 <= 1\n");
}

}  // namespace
}  // namespace mlpoly
