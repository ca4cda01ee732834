#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace mlpoly {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation : std::uint8_t { kLessEqual, kEqual, kGreaterEqual };

std::string_view to_string(Relation rel);

struct Term {
  int var = 0;
  double coef = 0.0;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Row {
  std::vector<Term> terms;
  Relation rel = Relation::kLessEqual;
  double rhs = 0.0;
  std::string name;
};

// A maximization LP: max c'x subject to rows and lower <= x <= upper.
// Variables 0..node_var_count-1 are the ones whose integrality defines a
// "binary" solution; the remaining variables are auxiliary.
struct LinearProgram {
  int num_vars = 0;
  int node_var_count = 0;
  std::vector<Term> objective;
  std::vector<Row> rows;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<std::string> var_names;

  // Creates `n` variables bounded in [0, 1], all of them node variables.
  static LinearProgram with_unit_box(int n);

  // Throws std::invalid_argument when a term references a missing variable,
  // a bound pair is inverted or a coefficient is not finite.
  void validate() const;

  double evaluate_objective(const std::vector<double>& x) const;
  // Largest violation of any row or bound at x (0 when feasible).
  double max_violation(const std::vector<double>& x) const;
};

enum class SolveStatus : std::uint8_t {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
};

std::string_view to_string(SolveStatus status);

// Status of a variable in the final basis. Indices 0..num_vars-1 are the
// structural variables, num_vars + i is the logical variable of row i.
enum class VarStatus : std::uint8_t { kBasic, kAtLower, kAtUpper, kFree };

struct SolveReport {
  SolveStatus status = SolveStatus::kIterationLimit;
  double objective_value = 0.0;
  std::vector<double> solution;
  bool is_binary = false;
  int node_var_count = 0;
  long iterations = 0;
  double wall_time = 0.0;
  std::vector<VarStatus> basis;
};

struct IpReport : SolveReport {
  long nodes_explored = 0;
  bool proven_optimal = false;
  double best_bound = 0.0;
};

}  // namespace mlpoly
