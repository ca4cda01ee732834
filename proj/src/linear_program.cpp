#include "mlpoly/linear_program.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mlpoly {

std::string_view to_string(Relation rel) {
  switch (rel) {
    case Relation::kLessEqual:
      return "<=";
    case Relation::kEqual:
      return "=";
    case Relation::kGreaterEqual:
      return ">=";
  }
  return "?";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kUnbounded:
      return "unbounded";
    case SolveStatus::kIterationLimit:
      return "iteration_limit";
  }
  return "?";
}

LinearProgram LinearProgram::with_unit_box(int n) {
  LinearProgram lp;
  lp.num_vars = n;
  lp.node_var_count = n;
  lp.lower.assign(n, 0.0);
  lp.upper.assign(n, 1.0);
  lp.var_names.reserve(n);
  for (int j = 0; j < n; ++j) lp.var_names.push_back("x" + std::to_string(j));
  return lp;
}

void LinearProgram::validate() const {
  if (num_vars < 0) throw std::invalid_argument("negative variable count");
  if (static_cast<int>(lower.size()) != num_vars ||
      static_cast<int>(upper.size()) != num_vars) {
    throw std::invalid_argument("bound vectors do not match variable count");
  }
  if (node_var_count < 0 || node_var_count > num_vars) {
    throw std::invalid_argument("node variable count out of range");
  }
  for (int j = 0; j < num_vars; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j]) {
      throw std::invalid_argument("invalid bounds on variable " +
                                  std::to_string(j));
    }
  }
  auto check_terms = [&](const std::vector<Term>& terms, const std::string& where) {
    for (const Term& t : terms) {
      if (t.var < 0 || t.var >= num_vars) {
        throw std::invalid_argument(where + " references variable " +
                                    std::to_string(t.var));
      }
      if (!std::isfinite(t.coef)) {
        throw std::invalid_argument(where + " has a non-finite coefficient");
      }
    }
  };
  check_terms(objective, "objective");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    check_terms(rows[i].terms, "row " + std::to_string(i));
    if (!std::isfinite(rows[i].rhs)) {
      throw std::invalid_argument("row " + std::to_string(i) +
                                  " has a non-finite right-hand side");
    }
  }
}

double LinearProgram::evaluate_objective(const std::vector<double>& x) const {
  double value = 0.0;
  for (const Term& t : objective) value += t.coef * x[t.var];
  return value;
}

double LinearProgram::max_violation(const std::vector<double>& x) const {
  double worst = 0.0;
  for (int j = 0; j < num_vars; ++j) {
    worst = std::max({worst, lower[j] - x[j], x[j] - upper[j]});
  }
  for (const Row& row : rows) {
    double activity = 0.0;
    for (const Term& t : row.terms) activity += t.coef * x[t.var];
    switch (row.rel) {
      case Relation::kLessEqual:
        worst = std::max(worst, activity - row.rhs);
        break;
      case Relation::kGreaterEqual:
        worst = std::max(worst, row.rhs - activity);
        break;
      case Relation::kEqual:
        worst = std::max(worst, std::abs(activity - row.rhs));
        break;
    }
  }
  return worst;
}

}  // namespace mlpoly
