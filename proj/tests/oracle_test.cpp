#include "mlpoly/oracle.hpp"

#include <gtest/gtest.h>

#include <numeric>

#include "mlpoly/branch_and_bound.hpp"
#include "test_support.hpp"

namespace mlpoly {
namespace {

using testing::grid_patches;
using testing::random_objective;

TEST(BruteForceMap, SingleNodeTerm) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1}}, 2);
  MultilinearObjective obj = MultilinearObjective::zero(h);
  obj.node_coeffs[0] = 1.0;
  const OracleResult r = brute_force_map(h, obj);
  EXPECT_EQ(r.optimum, 1.0);
  EXPECT_EQ(r.enumerated, 4u);
  EXPECT_EQ(r.optima, (std::vector<std::uint64_t>{1, 3}));
  EXPECT_EQ(r.assignment(0, 2), (std::vector<std::uint8_t>{1, 0}));
}

TEST(BruteForceMap, ZeroObjectiveTiesEverywhere) {
  const Hypergraph h = build_ugm_hypergraph(grid_patches(3, 3), 9);
  const OracleResult r = brute_force_map(h, MultilinearObjective::zero(h));
  EXPECT_EQ(r.optimum, 0.0);
  EXPECT_EQ(r.optima.size(), 512u);
}

TEST(BruteForceMap, EdgeTermsUseProducts) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1, 2}}, 3);
  MultilinearObjective obj = MultilinearObjective::zero(h);
  obj.node_coeffs = {-1, -1, -1};
  obj.edge_coeffs.back() = 4.0;  // {0,1,2}
  const OracleResult r = brute_force_map(h, obj);
  EXPECT_EQ(r.optimum, 1.0);
  EXPECT_EQ(r.optima, (std::vector<std::uint64_t>{7}));
}

TEST(BruteForceMap, RejectsLargeInstances) {
  const Hypergraph h = build_ugm_hypergraph(grid_patches(6, 5), 30);
  EXPECT_THROW(brute_force_map(h, MultilinearObjective::zero(h)), std::invalid_argument);
}

TEST(BruteForceDecode, ZeroWordIsOptimal) {
  const LdpcCode code = gallager_parity_check(9, 3, 2, 1);
  const OracleResult r = brute_force_decode(code, std::vector<std::uint8_t>(9, 0));
  EXPECT_EQ(r.optimum, 0.0);
  EXPECT_EQ(r.optima, (std::vector<std::uint64_t>{0}));
}

TEST(BruteForceDecode, EnumeratesTheNullspace) {
  const LdpcCode code = gallager_parity_check(9, 3, 2, 1);
  const OracleResult r = brute_force_decode(code, std::vector<std::uint8_t>(9, 0));
  // Count even-parity words directly.
  std::uint64_t codewords = 0;
  for (std::uint32_t x = 0; x < 512; ++x) {
    std::vector<std::uint8_t> w(9);
    for (int v = 0; v < 9; ++v) w[v] = x >> v & 1u;
    codewords += code.is_codeword(w);
  }
  EXPECT_EQ(r.enumerated, codewords);
}

TEST(BruteForceDecode, SingleFlipKeepsZeroOptimal) {
  const LdpcCode code = gallager_parity_check(9, 3, 2, 1);
  for (int bit = 0; bit < 9; ++bit) {
    std::vector<std::uint8_t> y(9, 0);
    y[bit] = 1;
    const OracleResult r = brute_force_decode(code, y);
    EXPECT_EQ(r.optimum, 0.0);
    EXPECT_EQ(r.optima.front(), 0u);
  }
}

TEST(BruteForceDecode, ListsTiedCodewords) {
  const LdpcCode code = gallager_parity_check(9, 3, 2, 1);
  // Every listed optimum must be a codeword with the optimal score.
  std::vector<std::uint8_t> y = {1, 1, 0, 0, 0, 0, 0, 0, 0};
  const OracleResult r = brute_force_decode(code, y);
  for (std::size_t k = 0; k < r.optima.size(); ++k) {
    const auto x = r.assignment(k, 9);
    EXPECT_TRUE(code.is_codeword(x));
    double score = 0;
    for (int v = 0; v < 9; ++v) score += x[v] ? (y[v] ? 1 : -1) : 0;
    EXPECT_EQ(score, r.optimum);
  }
  EXPECT_GE(r.optima.size(), 1u);
}

TEST(ValidateCut, KnownRows) {
  const Hypergraph h = build_ugm_hypergraph({{0, 1, 2, 3}}, 4);
  const int z01 = h.require_slot(std::vector<NodeId>{0, 1});
  const int z23 = h.require_slot(std::vector<NodeId>{2, 3});
  const int z0123 = h.require_slot(std::vector<NodeId>{0, 1, 2, 3});
  CutRow flower;
  flower.terms = {{z01, 1}, {z23, 1}, {z0123, -1}};
  flower.rhs = 1;
  EXPECT_TRUE(validate_cut(flower, h));
  CutRow reversed;
  reversed.terms = {{z01, -1}, {z23, -1}, {z0123, 1}};
  reversed.rhs = -2;
  EXPECT_FALSE(validate_cut(reversed, h));
  CutRow mccormick;
  mccormick.terms = {{0, -1}, {z01, 1}};
  EXPECT_TRUE(validate_cut(mccormick, h));
  CutRow eq;
  eq.terms = {{0, 1}, {1, -1}};
  eq.rel = Relation::kEqual;
  EXPECT_FALSE(validate_cut(eq, h));
}

TEST(BranchAndBound, MatchesOracleOnGrids) {
  Rng rng(77);
  const std::vector<std::pair<int, int>> shapes = {{3, 3}, {3, 4}, {4, 4}};
  for (const auto& [r, c] : shapes) {
    const Hypergraph h = build_ugm_hypergraph(grid_patches(r, c), r * c);
    std::vector<int> nodes(h.node_count());
    std::iota(nodes.begin(), nodes.end(), 0);
    for (int t = 0; t < 10; ++t) {
      const MultilinearObjective obj = random_objective(h, rng);
      const LinearProgram lp = build_relaxation(h, RelaxationKind::standard(), obj);
      const IpReport ip = solve_binary_ip(lp, nodes);
      ASSERT_EQ(ip.status, SolveStatus::kOptimal);
      EXPECT_TRUE(ip.proven_optimal);
      EXPECT_TRUE(ip.is_binary);
      const OracleResult best = brute_force_map(h, obj);
      EXPECT_NEAR(ip.objective_value, best.optimum, 1e-9);
      std::vector<std::uint8_t> x(h.node_count());
      for (int v = 0; v < h.node_count(); ++v) x[v] = ip.solution[v] > 0.5;
      EXPECT_NEAR(obj.evaluate(h, x), best.optimum, 1e-9);
    }
  }
}

TEST(BranchAndBound, MatchesOracleOnCodes) {
  Rng rng(78);
  for (const auto& [n, beta, gamma] : {std::tuple{9, 3, 2}, std::tuple{12, 4, 3}}) {
    const LdpcCode code = gallager_parity_check(n, beta, gamma, rng.next());
    for (int t = 0; t < 10; ++t) {
      const auto y = bit_flip_channel(n, 0.25, rng.next());
      const DecodeReport ip = decode(code, y, {DecodeMethod::kIp});
      ASSERT_EQ(ip.status, SolveStatus::kOptimal);
      EXPECT_NEAR(ip.lp_value, brute_force_decode(code, y).optimum, 1e-9);
    }
  }
}

TEST(BranchAndBound, SmallKnapsack) {
  // max 5a + 4b + 3c s.t. 2a + 3b + c <= 4 over binaries: a = c = 1, value 8.
  LinearProgram lp = LinearProgram::with_unit_box(3);
  lp.objective = {{0, 5}, {1, 4}, {2, 3}};
  lp.rows.push_back({{{0, 2}, {1, 3}, {2, 1}}, Relation::kLessEqual, 4.0, "cap"});
  const std::vector<int> vars = {0, 1, 2};
  const IpReport r = solve_binary_ip(lp, vars);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective_value, 8.0, 1e-9);
  EXPECT_NEAR(r.solution[0], 1.0, 1e-9);
  EXPECT_NEAR(r.solution[1], 0.0, 1e-9);
  EXPECT_NEAR(r.solution[2], 1.0, 1e-9);
}

TEST(BranchAndBound, InfeasibleAndBudget) {
  LinearProgram lp = LinearProgram::with_unit_box(2);
  lp.objective = {{0, 1}, {1, 1}};
  lp.rows.push_back({{{0, 1}, {1, 1}}, Relation::kEqual, 1.0, "half"});
  lp.rows.push_back({{{0, 1}, {1, -1}}, Relation::kEqual, 0.0, "same"});
  const std::vector<int> vars = {0, 1};
  EXPECT_EQ(solve_binary_ip(lp, vars).status, SolveStatus::kInfeasible);
  BranchAndBoundOptions tiny;
  tiny.max_nodes = 1;
  const IpReport r = solve_binary_ip(lp, vars, tiny);
  EXPECT_EQ(r.status, SolveStatus::kIterationLimit);
  EXPECT_NEAR(r.best_bound, 1.0, 1e-9);
}

TEST(Rounding, TiesGoDown) {
  SolveReport r;
  r.node_var_count = 4;
  r.solution = {0.5, 0.5000001, 0.9999999, 0.2, 0.7};
  const Rounding out = classify_and_round(r, 1e-6);
  EXPECT_FALSE(out.is_binary);
  EXPECT_EQ(out.rounded, (std::vector<double>{0, 1, 1, 0, 0.7}));
  r.solution = {0, 1, 1e-8, 1 - 1e-8};
  EXPECT_TRUE(classify_and_round(r, 1e-6).is_binary);
}

}  // namespace
}  // namespace mlpoly
