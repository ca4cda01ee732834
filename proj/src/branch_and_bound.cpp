#include "mlpoly/branch_and_bound.hpp"

#include <chrono>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace mlpoly {
namespace {

struct Subproblem {
  double bound = 0.0;
  long id = 0;
  std::vector<std::pair<int, double>> fixings;
  std::vector<VarStatus> basis;  // parent's final basis, the warm start
};

struct WorseFirst {
  bool operator()(const Subproblem& a, const Subproblem& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;
    return a.id > b.id;
  }
};

}  // namespace

IpReport solve_binary_ip(const LinearProgram& lp, std::span<const int> binary_vars,
                         const BranchAndBoundOptions& options) {
  lp.validate();
  for (int j : binary_vars) {
    if (j < 0 || j >= lp.num_vars) {
      throw std::invalid_argument("binary variable out of range");
    }
  }
  const auto start = std::chrono::steady_clock::now();
  const double tol = options.lp.integrality_tol;

  IpReport report;
  report.node_var_count = lp.node_var_count;
  bool have_incumbent = false;
  double incumbent = -kInfinity;

  LinearProgram work = lp;
  for (int j : binary_vars) {
    work.lower[j] = std::max(work.lower[j], 0.0);
    work.upper[j] = std::min(work.upper[j], 1.0);
  }
  const std::vector<double> base_lower = work.lower;
  const std::vector<double> base_upper = work.upper;
  auto solve_with = [&](const std::vector<std::pair<int, double>>& fixings,
                        const std::vector<VarStatus>& basis) {
    work.lower = base_lower;
    work.upper = base_upper;
    for (const auto& [j, v] : fixings) work.lower[j] = work.upper[j] = v;
    SolveReport r = solve_lp(work, options.lp, basis);
    report.iterations += r.iterations;
    return r;
  };

  std::priority_queue<Subproblem, std::vector<Subproblem>, WorseFirst> open;
  open.push({kInfinity, 0, {}, {}});
  long next_id = 1;
  bool budget_hit = false;
  bool unbounded = false;

  while (!open.empty()) {
    if (have_incumbent && open.top().bound <= incumbent + options.prune_tol) break;
    if (report.nodes_explored >= options.max_nodes) {
      budget_hit = true;
      break;
    }
    Subproblem node = open.top();
    open.pop();
    ++report.nodes_explored;

    SolveReport r = solve_with(node.fixings, node.basis);
    if (r.status == SolveStatus::kInfeasible) continue;
    if (r.status == SolveStatus::kUnbounded) {
      unbounded = true;
      break;
    }
    if (r.status != SolveStatus::kOptimal) {
      budget_hit = true;
      break;
    }
    if (have_incumbent && r.objective_value <= incumbent + options.prune_tol) continue;

    int branch = -1;
    double best_frac = -1.0;
    for (int j : binary_vars) {
      const double v = r.solution[j];
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac <= tol) continue;
      const double score = 0.5 - std::abs(v - 0.5);
      if (score > best_frac || (score == best_frac && j < branch)) {
        best_frac = score;
        branch = j;
      }
    }
    if (branch < 0) {
      // All branching variables integral: fix them exactly and re-solve.
      std::vector<std::pair<int, double>> fixed = node.fixings;
      for (int j : binary_vars) fixed.emplace_back(j, std::round(r.solution[j]));
      SolveReport exact = solve_with(fixed, r.basis);
      if (exact.status != SolveStatus::kOptimal) continue;
      if (!have_incumbent || exact.objective_value > incumbent) {
        have_incumbent = true;
        incumbent = exact.objective_value;
        report.solution = exact.solution;
      }
      continue;
    }
    for (double value : {0.0, 1.0}) {
      Subproblem child;
      child.bound = r.objective_value;
      child.id = next_id++;
      child.fixings = node.fixings;
      child.fixings.emplace_back(branch, value);
      child.basis = r.basis;
      open.push(std::move(child));
    }
  }

  if (unbounded) {
    report.status = SolveStatus::kUnbounded;
    report.objective_value = kInfinity;
  } else if (budget_hit) {
    report.status = SolveStatus::kIterationLimit;
    report.objective_value = have_incumbent ? incumbent : -kInfinity;
  } else if (!have_incumbent) {
    report.status = SolveStatus::kInfeasible;
  } else {
    report.status = SolveStatus::kOptimal;
    report.objective_value = incumbent;
    report.proven_optimal = true;
  }
  report.best_bound = report.objective_value;
  if (budget_hit) {
    double top = have_incumbent ? incumbent : -kInfinity;
    if (!open.empty()) top = std::max(top, open.top().bound);
    report.best_bound = top;
  }
  if (have_incumbent) {
    bool binary = true;
    for (int j = 0; j < lp.node_var_count; ++j) {
      const double v = report.solution[j];
      if (std::abs(v - std::round(v)) > tol) binary = false;
    }
    report.is_binary = binary;
  }
  report.basis.clear();
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

Rounding classify_and_round(const SolveReport& report, double tol) {
  Rounding out;
  out.rounded = report.solution;
  out.is_binary = true;
  const int n = std::min<int>(report.node_var_count, out.rounded.size());
  for (int j = 0; j < n; ++j) {
    double v = out.rounded[j];
    const double nearest = std::round(v);
    if (std::abs(v - nearest) <= tol) {
      v = nearest;
    } else {
      out.is_binary = false;
    }
    const double lo = std::floor(v);
    out.rounded[j] = (v - lo > 0.5) ? lo + 1.0 : lo;
  }
  return out;
}

}  // namespace mlpoly
