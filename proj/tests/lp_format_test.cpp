#include "mlpoly/lp_format.hpp"

#include <gtest/gtest.h>

#include <sstream>
#include <stdexcept>
#include <string>

#include "mlpoly/ldpc.hpp"
#include "mlpoly/relaxations.hpp"
#include "mlpoly/restoration.hpp"
#include "mlpoly/simplex.hpp"

namespace mlpoly {
namespace {

std::string to_text(const LinearProgram& lp, std::span<const int> binary = {}) {
  std::ostringstream os;
  write_lp(os, lp, binary);
  return os.str();
}

LinearProgram from_text(const std::string& text) {
  std::istringstream is(text);
  return read_lp(is);
}

LinearProgram one_edge_standard() {
  const Hypergraph h = build_ugm_hypergraph({{0, 1}}, 2);
  MultilinearObjective obj = MultilinearObjective::zero(h);
  obj.node_coeffs = {1, 1};
  obj.edge_coeffs = {-1};
  return build_relaxation(h, RelaxationKind::standard(), obj);
}

TEST(LpFormat, OneEdgeStandardGolden) {
  const std::string golden =
      "\\ 3 columns, 4 rows\n"
      "Maximize\n"
      " obj: + 1 z_0 + 1 z_1 - 1 z_0_1\n"
      "Subject To\n"
      " c0: - 1 z_0_1 <= 0\n"
      " c1: + 1 z_0 + 1 z_1 - 1 z_0_1 <= 1\n"
      " c2: - 1 z_0 + 1 z_0_1 <= 0\n"
      " c3: - 1 z_1 + 1 z_0_1 <= 0\n"
      "Bounds\n"
      " 0 <= z_0 <= 1\n"
      " 0 <= z_1 <= 1\n"
      " 0 <= z_0_1 <= 1\n"
      "End\n";
  EXPECT_EQ(to_text(one_edge_standard()), golden);
}

TEST(LpFormat, ByteStable) {
  const LinearProgram lp = one_edge_standard();
  EXPECT_EQ(to_text(lp), to_text(lp));
}

TEST(LpFormat, RoundTripPreservesTheProgram) {
  const LinearProgram lp = one_edge_standard();
  const LinearProgram back = from_text(to_text(lp));
  ASSERT_EQ(back.num_vars, lp.num_vars);
  EXPECT_EQ(back.var_names, lp.var_names);
  EXPECT_EQ(back.objective, lp.objective);
  EXPECT_EQ(back.lower, lp.lower);
  EXPECT_EQ(back.upper, lp.upper);
  ASSERT_EQ(back.rows.size(), lp.rows.size());
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    EXPECT_EQ(back.rows[i].terms, lp.rows[i].terms);
    EXPECT_EQ(back.rows[i].rel, lp.rows[i].rel);
    EXPECT_EQ(back.rows[i].rhs, lp.rows[i].rhs);
  }
  EXPECT_EQ(to_text(back), to_text(lp));
}

TEST(LpFormat, CliqueLpOnThreeByThreeResolvesIdentically) {
  const BitImage noisy = apply_bit_flip_noise(BitImage::zeros(3, 3), 0.5, 5);
  const RestorationModel model = build_restoration_objective(noisy, 25.0, {-10, -20, -30, -40});
  const LinearProgram lp =
      build_relaxation(model.hypergraph, RelaxationKind::clique(), model.objective);
  const SolveReport a = solve_lp(lp);
  const SolveReport b = solve_lp(from_text(to_text(lp)));
  ASSERT_EQ(a.status, SolveStatus::kOptimal);
  ASSERT_EQ(b.status, SolveStatus::kOptimal);
  EXPECT_EQ(a.objective_value, b.objective_value);
}

TEST(LpFormat, ParityLpRoundTripValue) {
  const LdpcCode code = gallager_parity_check(9, 3, 2, 4);
  const auto y = bit_flip_channel(9, 0.2, 11);
  const LinearProgram lp = build_decoder(code, y, {DecodeMethod::kParity}).lp;
  EXPECT_EQ(solve_lp(lp).objective_value, solve_lp(from_text(to_text(lp))).objective_value);
}

TEST(LpFormat, NonUnitBoundsAndFractions) {
  LinearProgram lp = LinearProgram::with_unit_box(3);
  lp.lower = {-kInfinity, -2.5, 1.0};
  lp.upper = {kInfinity, kInfinity, 1.0};
  lp.objective = {{0, 0.1}, {1, -1e-7}};
  lp.rows.push_back({{{0, 1.0}, {1, 1.0 / 3.0}}, Relation::kEqual, 2.0 / 3.0, ""});
  lp.rows.push_back({{{2, -4.0}}, Relation::kGreaterEqual, -8.0, ""});
  const std::string text = to_text(lp);
  EXPECT_NE(text.find(" x0 free\n"), std::string::npos);
  EXPECT_NE(text.find(" -2.5 <= x1 <= +inf\n"), std::string::npos);
  EXPECT_NE(text.find(" x2 = 1\n"), std::string::npos);
  const LinearProgram back = from_text(text);
  EXPECT_EQ(back.lower, lp.lower);
  EXPECT_EQ(back.upper, lp.upper);
  EXPECT_EQ(back.objective, lp.objective);
  EXPECT_EQ(back.rows[0].terms, lp.rows[0].terms);
  EXPECT_EQ(back.rows[0].rhs, lp.rows[0].rhs);
  EXPECT_EQ(back.rows[1].rel, Relation::kGreaterEqual);
}

TEST(LpFormat, InvalidNamesAreReplaced) {
  LinearProgram lp = LinearProgram::with_unit_box(3);
  lp.var_names = {"has space", "e12", "ok"};
  lp.objective = {{0, 1.0}, {1, 1.0}, {2, 1.0}};
  const std::string text = to_text(lp);
  EXPECT_NE(text.find("+ 1 x0 + 1 x1 + 1 ok"), std::string::npos);
}

TEST(LpFormat, BinariesSection) {
  const std::vector<int> binary = {0, 1};
  const std::string text = to_text(one_edge_standard(), binary);
  EXPECT_NE(text.find("Binaries\n z_0\n z_1\nEnd\n"), std::string::npos);
}

TEST(LpFormat, LongRowsWrap) {
  LinearProgram lp = LinearProgram::with_unit_box(20);
  Row row;
  for (int j = 0; j < 20; ++j) row.terms.push_back({j, 1.0});
  row.rhs = 3.0;
  lp.rows.push_back(row);
  const LinearProgram back = from_text(to_text(lp));
  EXPECT_EQ(back.rows.at(0).terms, row.terms);
}

TEST(LpFormat, ReadsCommonVariants) {
  const LinearProgram lp = from_text(
      "\\ comment\n"
      "minimize\n"
      " cost: 2 a + 3b_2\n"
      "st\n"
      " a + b_2 >= 1\n"
      " lim: -a <= 0.5\n"
      "bounds\n"
      " a <= 4\n"
      " b_2 >= -1\n"
      "end\n");
  ASSERT_EQ(lp.num_vars, 2);
  EXPECT_EQ(lp.var_names[1], "b_2");
  EXPECT_EQ(lp.objective, (std::vector<Term>{{0, -2.0}, {1, -3.0}}));
  EXPECT_EQ(lp.rows.size(), 2u);
  EXPECT_EQ(lp.rows[1].name, "lim");
  EXPECT_EQ(lp.upper[0], 4.0);
  EXPECT_EQ(lp.lower[1], -1.0);
  EXPECT_EQ(lp.upper[1], kInfinity);
  const SolveReport r = solve_lp(lp);
  ASSERT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.objective_value, -1.0, 1e-9);  // a = 2, b = -1
}

TEST(LpFormat, RejectsMalformedInput) {
  EXPECT_THROW(from_text("Subject To\n c0: x <= 1\nEnd\n"), std::runtime_error);
  EXPECT_THROW(from_text("Maximize\n obj: x\nSubject To\n c0: x 1\nEnd\n"), std::runtime_error);
  EXPECT_THROW(from_text("Maximize\n obj: x\n"), std::runtime_error);
  EXPECT_THROW(from_text("Maximize\n obj: x\nBounds\n x <=\nEnd\n"), std::runtime_error);
  EXPECT_THROW(from_text("Maximize\n obj: 1e+ x\nEnd\n"), std::runtime_error);
}

}  // namespace
}  // namespace mlpoly
