#include "mlpoly/simplex.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <tuple>
#include <span>
#include <utility>
#include <vector>

#include "mlpoly/rng.hpp"

namespace mlpoly {
namespace {

constexpr double kArtificialBound = 1e7;
constexpr double kDropTol = 1e-13;

// Elementary column transform recorded after each basis change.
struct Eta {
  int pos = 0;
  double pivot = 1.0;
  std::vector<std::pair<int, double>> entries;  // (position, alpha), pos excluded
};

// Dense values with a list of the touched indices, so that clearing and
// scanning cost the number of nonzeros rather than the dimension.
struct SparseVec {
  std::vector<double> val;
  std::vector<int> idx;
  std::vector<char> mark;

  void resize(int n) {
    val.assign(n, 0.0);
    mark.assign(n, 0);
    idx.clear();
  }
  void clear() {
    for (int i : idx) {
      val[i] = 0.0;
      mark[i] = 0;
    }
    idx.clear();
  }
  void touch(int i) {
    if (!mark[i]) {
      mark[i] = 1;
      idx.push_back(i);
    }
  }
  void set(int i, double v) {
    touch(i);
    val[i] = v;
  }
  void add(int i, double v) {
    touch(i);
    val[i] += v;
  }
};

// Bounded dual simplex on  min c'x  s.t.  A x - r = 0,  l <= (x, r) <= u.
// Column n + i is the logical variable r_i with coefficient -1 in row i.
class DualSimplex {
 public:
  DualSimplex(const LinearProgram& lp, const SimplexOptions& opt,
              std::span<const VarStatus> start);
  SolveReport run();

 private:
  enum class Step { kContinue, kOptimal, kInfeasible, kRefactor };

  void load(const LinearProgram& lp);
  void slack_basis();
  bool load_basis(std::span<const VarStatus> start);
  bool dual_feasible() const;
  bool refactor();
  void compute_primal();
  void compute_duals();
  void ftran(SparseVec& rhs, SparseVec& out);
  void btran(SparseVec& v, SparseVec& y);
  double infeasibility(int var) const;
  int choose_leaving();
  void track_infeasible(int pos);
  Step iterate();
  bool fix_dual_infeasibilities();
  SolveReport finish(SolveStatus status);

  const SimplexOptions& opt_;
  int n_ = 0;
  int m_ = 0;
  int node_vars_ = 0;

  std::vector<int> col_start_, col_row_;
  std::vector<double> col_val_;
  std::vector<int> row_start_, row_col_;
  std::vector<double> row_val_;

  std::vector<double> lower_, upper_, cost_;
  std::vector<double> max_cost_;  // objective in the caller's max form
  std::vector<double> original_cost_;
  bool perturbed_ = false;
  bool warm_ = false;
  std::vector<char> artificial_;

  std::vector<VarStatus> status_;
  std::vector<int> head_;      // basic variable at each position
  std::vector<int> position_;  // position of a basic variable, -1 otherwise
  std::vector<double> x_, d_;

  // Factorization of the basis as of the last refactor. Basic logicals cover
  // their own rows; the remaining rows times the basic structurals form M.
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<int> head0_;
  std::vector<int> m_rows_;        // rows of M, in M order
  std::vector<int> m_cols_pos_;    // positions of the basic structurals, M order
  std::vector<int> slack_pos_;     // row -> position of its basic logical, or -1
  std::vector<char> in_m_rows_;
  std::vector<int> m_local_row_;   // row -> index in M order, or -1
  std::vector<int> m_local_col_;   // variable -> column of M, or -1
  Eigen::VectorXd m_work_, m_sol_;
  std::vector<Eta> etas_;
  long eta_nnz_ = 0;

  SparseVec rho_, alpha_col_, work_rows_, work_pos_, tau_;
  std::vector<double> alpha_row_;
  std::vector<double> weights_;  // dual steepest-edge weights per position
  std::vector<int> touched_, rho_rows_;
  // Positions that may be primal infeasible; entries are revalidated lazily.
  std::vector<int> infeasible_;
  std::vector<char> in_infeasible_;
  std::vector<char> touched_flag_;

  long iterations_ = 0;
  int degenerate_run_ = 0;
  bool bland_ = false;
  int resets_ = 0;
};

DualSimplex::DualSimplex(const LinearProgram& lp, const SimplexOptions& opt,
                         std::span<const VarStatus> start)
    : opt_(opt) {
  load(lp);
  warm_ = !start.empty() && load_basis(start);
}

void DualSimplex::load(const LinearProgram& lp) {
  n_ = lp.num_vars;
  m_ = static_cast<int>(lp.rows.size());
  node_vars_ = lp.node_var_count;
  const int total = n_ + m_;

  // Merge duplicate terms row by row, then build CSR and CSC copies.
  std::vector<std::vector<std::pair<int, double>>> rows(m_);
  for (int i = 0; i < m_; ++i) {
    auto& r = rows[i];
    for (const Term& t : lp.rows[i].terms) r.emplace_back(t.var, t.coef);
    std::sort(r.begin(), r.end());
    std::size_t w = 0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (w > 0 && r[w - 1].first == r[k].first) {
        r[w - 1].second += r[k].second;
      } else {
        r[w++] = r[k];
      }
    }
    r.resize(w);
    std::erase_if(r, [](const auto& p) { return p.second == 0.0; });
  }
  row_start_.assign(m_ + 1, 0);
  std::vector<int> col_count(n_, 0);
  for (int i = 0; i < m_; ++i) {
    row_start_[i + 1] = row_start_[i] + static_cast<int>(rows[i].size());
    for (const auto& [j, v] : rows[i]) ++col_count[j];
  }
  row_col_.resize(row_start_[m_]);
  row_val_.resize(row_start_[m_]);
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + col_count[j];
  col_row_.resize(col_start_[n_]);
  col_val_.resize(col_start_[n_]);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int i = 0; i < m_; ++i) {
    int k = row_start_[i];
    for (const auto& [j, v] : rows[i]) {
      row_col_[k] = j;
      row_val_[k] = v;
      ++k;
      col_row_[fill[j]] = i;
      col_val_[fill[j]] = v;
      ++fill[j];
    }
  }

  lower_.assign(total, 0.0);
  upper_.assign(total, 0.0);
  cost_.assign(total, 0.0);
  max_cost_.assign(n_, 0.0);
  artificial_.assign(total, 0);
  for (const Term& t : lp.objective) max_cost_[t.var] += t.coef;
  for (int j = 0; j < n_; ++j) {
    lower_[j] = lp.lower[j];
    upper_[j] = lp.upper[j];
    cost_[j] = -max_cost_[j];
  }
  for (int i = 0; i < m_; ++i) {
    const Row& row = lp.rows[i];
    double lo = -kInfinity, hi = kInfinity;
    switch (row.rel) {
      case Relation::kLessEqual:
        hi = row.rhs;
        break;
      case Relation::kGreaterEqual:
        lo = row.rhs;
        break;
      case Relation::kEqual:
        lo = hi = row.rhs;
        break;
    }
    // Activity bounds implied by the variable bounds box the logical, so
    // that every nonbasic variable can be flipped to the other bound.
    double act_lo = 0.0, act_hi = 0.0;
    for (int e = row_start_[i]; e < row_start_[i + 1]; ++e) {
      const double a = row_val_[e];
      const int j = row_col_[e];
      act_lo += a > 0.0 ? a * lp.lower[j] : a * lp.upper[j];
      act_hi += a > 0.0 ? a * lp.upper[j] : a * lp.lower[j];
    }
    lower_[n_ + i] = std::max(lo, act_lo);
    upper_[n_ + i] = std::min(hi, act_hi);
  }

  // Dual feasibility of the slack basis needs each structural at the bound
  // its cost points to; missing bounds become artificial ones.
  for (int j = 0; j < n_; ++j) {
    const bool wants_lower = cost_[j] >= 0.0;
    if (wants_lower && !std::isfinite(lower_[j])) {
      lower_[j] = std::isfinite(upper_[j]) ? std::min(-kArtificialBound, upper_[j] - kArtificialBound)
                                           : -kArtificialBound;
      artificial_[j] = 1;
    }
    if (!wants_lower && !std::isfinite(upper_[j])) {
      upper_[j] = std::max(kArtificialBound, lower_[j] + kArtificialBound);
      artificial_[j] = 1;
    }
  }

  // Random cost perturbation against dual degeneracy, only when every
  // variable is boxed so that removing it never leaves an unfixable dual
  // infeasibility.
  bool boxed = true;
  for (int j = 0; j < total; ++j) {
    boxed = boxed && std::isfinite(lower_[j]) && std::isfinite(upper_[j]);
  }
  original_cost_ = cost_;
  perturbed_ = boxed && opt_.perturb;
  if (perturbed_) {
    Rng rng(0x5eed);
    for (int j = 0; j < n_; ++j) {
      if (lower_[j] == upper_[j]) continue;
      const double xi = 1e-6 * (1.0 + std::abs(cost_[j])) * (1.0 + rng.uniform01());
      cost_[j] += cost_[j] >= 0.0 ? xi : -xi;
    }
  }

  status_.assign(total, VarStatus::kAtLower);
  head_.assign(m_, 0);
  position_.assign(total, -1);
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  rho_.resize(m_);
  alpha_row_.assign(total, 0.0);
  alpha_col_.resize(m_);
  work_rows_.resize(m_);
  work_pos_.resize(m_);
  tau_.resize(m_);
  m_local_row_.assign(m_, -1);
  m_local_col_.assign(n_, -1);
  touched_flag_.assign(n_, 0);
  slack_pos_.assign(m_, -1);
  in_m_rows_.assign(m_, 0);
  slack_basis();
}

void DualSimplex::slack_basis() {
  for (int j = 0; j < n_; ++j) {
    position_[j] = -1;
    if (lower_[j] == upper_[j] || cost_[j] >= 0.0) {
      status_[j] = VarStatus::kAtLower;
      x_[j] = lower_[j];
    } else {
      status_[j] = VarStatus::kAtUpper;
      x_[j] = upper_[j];
    }
  }
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    position_[n_ + i] = i;
    status_[n_ + i] = VarStatus::kBasic;
  }
  // Rows of B^-1 = -I have unit norm.
  weights_.assign(m_, 1.0);
}

// Installs a caller basis. Nonbasic variables sit on the named bound, or the
// finite one when that bound is infinite. Returns false, leaving the slack
// basis, when the basic count is wrong.
bool DualSimplex::load_basis(std::span<const VarStatus> start) {
  const int total = n_ + m_;
  if (static_cast<int>(start.size()) != total) return false;
  if (std::count(start.begin(), start.end(), VarStatus::kBasic) != m_) return false;
  int p = 0;
  for (int j = 0; j < total; ++j) {
    position_[j] = -1;
    VarStatus st = start[j];
    if (st == VarStatus::kBasic) {
      head_[p] = j;
      position_[j] = p++;
      status_[j] = st;
      continue;
    }
    if (st == VarStatus::kAtUpper && !std::isfinite(upper_[j])) st = VarStatus::kAtLower;
    if (st == VarStatus::kAtLower && !std::isfinite(lower_[j])) {
      st = std::isfinite(upper_[j]) ? VarStatus::kAtUpper : VarStatus::kFree;
    }
    if (st == VarStatus::kFree && std::isfinite(lower_[j])) st = VarStatus::kAtLower;
    status_[j] = st;
    x_[j] = st == VarStatus::kAtLower ? lower_[j] : st == VarStatus::kAtUpper ? upper_[j] : 0.0;
  }
  weights_.assign(m_, 1.0);
  return true;
}

bool DualSimplex::dual_feasible() const {
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == VarStatus::kBasic || lower_[j] == upper_[j]) continue;
    const double d = d_[j];
    if (status_[j] == VarStatus::kFree && std::abs(d) > opt_.optimality_tol) return false;
    if (status_[j] == VarStatus::kAtLower && d < -opt_.optimality_tol) return false;
    if (status_[j] == VarStatus::kAtUpper && d > opt_.optimality_tol) return false;
  }
  return true;
}

bool DualSimplex::refactor() {
  etas_.clear();
  eta_nnz_ = 0;
  head0_ = head_;
  std::fill(slack_pos_.begin(), slack_pos_.end(), -1);
  std::fill(in_m_rows_.begin(), in_m_rows_.end(), 0);
  m_cols_pos_.clear();
  std::fill(m_local_row_.begin(), m_local_row_.end(), -1);
  std::fill(m_local_col_.begin(), m_local_col_.end(), -1);
  for (int p = 0; p < m_; ++p) {
    const int var = head_[p];
    if (var >= n_) {
      slack_pos_[var - n_] = p;
    } else {
      m_cols_pos_.push_back(p);
    }
  }
  m_rows_.clear();
  std::vector<int>& local = m_local_row_;
  for (int i = 0; i < m_; ++i) {
    if (slack_pos_[i] < 0) {
      local[i] = static_cast<int>(m_rows_.size());
      m_rows_.push_back(i);
      in_m_rows_[i] = 1;
    }
  }
  const int k = static_cast<int>(m_rows_.size());
  if (k != static_cast<int>(m_cols_pos_.size())) return false;
  for (int c = 0; c < k; ++c) m_local_col_[head_[m_cols_pos_[c]]] = c;
  m_work_.resize(k);
  if (k == 0) return true;

  std::vector<Eigen::Triplet<double>> triplets;
  for (int c = 0; c < k; ++c) {
    const int j = head_[m_cols_pos_[c]];
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      const int r = local[col_row_[e]];
      if (r >= 0) triplets.emplace_back(r, c, col_val_[e]);
    }
  }
  Eigen::SparseMatrix<double> mat(k, k);
  mat.setFromTriplets(triplets.begin(), triplets.end());
  mat.makeCompressed();
  lu_.analyzePattern(mat);
  lu_.factorize(mat);
  if (lu_.info() != Eigen::Success) return false;
  // SparseLU accepts numerically singular matrices with tiny pivots; reject
  // those by checking the diagonal of U.
  const double logdet = lu_.logAbsDeterminant();
  return std::isfinite(logdet);
}

// Solves B out = rhs. rhs is indexed by row and is used as scratch; out is
// cleared first.
void DualSimplex::ftran(SparseVec& rhs, SparseVec& out) {
  out.clear();
  const int k = static_cast<int>(m_rows_.size());
  if (k > 0) {
    Eigen::VectorXd& b = m_work_;
    b.setZero();
    bool any = false;
    for (int i : rhs.idx) {
      const int a = m_local_row_[i];
      if (a >= 0 && rhs.val[i] != 0.0) {
        b[a] = rhs.val[i];
        any = true;
      }
    }
    if (any) {
      m_sol_ = lu_.solve(b);
      for (int c = 0; c < k; ++c) {
        const double u = m_sol_[c];
        if (u == 0.0) continue;
        out.set(m_cols_pos_[c], u);
        const int j = head0_[m_cols_pos_[c]];
        for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
          const int i = col_row_[e];
          if (!in_m_rows_[i]) rhs.add(i, -col_val_[e] * u);
        }
      }
    }
  }
  // A basic logical r_i solves  (structural part)_i - r_i = rhs_i.
  for (int i : rhs.idx) {
    if (slack_pos_[i] >= 0 && rhs.val[i] != 0.0) out.set(slack_pos_[i], -rhs.val[i]);
  }
  for (const Eta& eta : etas_) {
    if (!out.mark[eta.pos]) continue;
    double& vp = out.val[eta.pos];
    if (vp == 0.0) continue;
    vp /= eta.pivot;
    const double v = vp;
    for (const auto& [i, a] : eta.entries) out.add(i, -a * v);
  }
}

// Solves y' B = v'. v is indexed by position and is used as scratch; y is
// cleared first.
void DualSimplex::btran(SparseVec& v, SparseVec& y) {
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = v.val[it->pos];
    for (const auto& [i, a] : it->entries) s -= a * v.val[i];
    if (s != 0.0 || v.mark[it->pos]) v.set(it->pos, s / it->pivot);
  }
  y.clear();
  for (int p : v.idx) {
    const int var = head0_[p];
    if (var >= n_ && v.val[p] != 0.0) y.set(var - n_, -v.val[p]);
  }
  const int k = static_cast<int>(m_rows_.size());
  if (k == 0) return;
  Eigen::VectorXd& b = m_work_;
  b.setZero();
  bool any = false;
  for (int p : v.idx) {
    const int var = head0_[p];
    if (var < n_ && v.val[p] != 0.0) {
      b[m_local_col_[var]] = v.val[p];
      any = true;
    }
  }
  // Move the logical part over: subtract y_i a_ij for rows outside M.
  for (int i : y.idx) {
    const double yi = y.val[i];
    for (int e = row_start_[i]; e < row_start_[i + 1]; ++e) {
      const int c = m_local_col_[row_col_[e]];
      if (c >= 0) {
        b[c] -= row_val_[e] * yi;
        any = true;
      }
    }
  }
  if (!any) return;
  m_sol_ = lu_.transpose().solve(b);
  for (int a = 0; a < k; ++a) {
    if (m_sol_[a] != 0.0) y.set(m_rows_[a], m_sol_[a]);
  }
}

void DualSimplex::compute_primal() {
  SparseVec& rhs = work_rows_;
  rhs.clear();
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == VarStatus::kBasic || x_[j] == 0.0) continue;
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      rhs.add(col_row_[e], -col_val_[e] * x_[j]);
    }
  }
  for (int i = 0; i < m_; ++i) {
    if (status_[n_ + i] != VarStatus::kBasic) rhs.add(i, x_[n_ + i]);
  }
  ftran(rhs, work_pos_);
  for (int p = 0; p < m_; ++p) x_[head_[p]] = work_pos_.val[p];
  infeasible_.clear();
  in_infeasible_.assign(m_, 0);
  for (int p = 0; p < m_; ++p) track_infeasible(p);
}

void DualSimplex::track_infeasible(int pos) {
  if (!in_infeasible_[pos] && infeasibility(head_[pos]) > 0.0) {
    in_infeasible_[pos] = 1;
    infeasible_.push_back(pos);
  }
}

void DualSimplex::compute_duals() {
  SparseVec& v = work_pos_;
  v.clear();
  for (int p = 0; p < m_; ++p) {
    if (cost_[head_[p]] != 0.0) v.set(p, cost_[head_[p]]);
  }
  SparseVec& y = work_rows_;
  btran(v, y);
  for (int j = 0; j < n_; ++j) {
    if (status_[j] == VarStatus::kBasic) {
      d_[j] = 0.0;
      continue;
    }
    double s = cost_[j];
    for (int e = col_start_[j]; e < col_start_[j + 1]; ++e) {
      s -= col_val_[e] * y.val[col_row_[e]];
    }
    d_[j] = s;
  }
  for (int i = 0; i < m_; ++i) {
    d_[n_ + i] = status_[n_ + i] == VarStatus::kBasic ? 0.0 : y.val[i];
  }
}

// Keeps steepest-edge weights positive and finite; a NaN falls back to 1.
double clamp_weight(double w) {
  if (!(w >= 1e-6)) return std::isnan(w) ? 1.0 : 1e-6;
  return std::min(w, 1e12);
}

double DualSimplex::infeasibility(int var) const {
  const double v = x_[var];
  if (v < lower_[var] - opt_.feasibility_tol) return lower_[var] - v;
  if (v > upper_[var] + opt_.feasibility_tol) return v - upper_[var];
  return 0.0;
}

int DualSimplex::choose_leaving() {
  int best = -1;
  double best_score = 0.0;
  std::size_t kept = 0;
  for (const int p : infeasible_) {
    const double inf = infeasibility(head_[p]);
    if (inf <= 0.0) {
      in_infeasible_[p] = 0;
      continue;
    }
    infeasible_[kept++] = p;
    if (bland_) {
      if (best < 0 || head_[p] < head_[best]) best = p;
    } else {
      const double score = inf * inf / weights_[p];
      if (best < 0 || score > best_score || (score == best_score && p < best)) {
        best_score = score;
        best = p;
      }
    }
  }
  infeasible_.resize(kept);
  return best;
}

DualSimplex::Step DualSimplex::iterate() {
  const int p = choose_leaving();
  if (p < 0) return Step::kOptimal;
  const int leaving = head_[p];
  const bool to_lower = x_[leaving] < lower_[leaving];
  const double target = to_lower ? lower_[leaving] : upper_[leaving];
  const double delta = x_[leaving] - target;

  // Pivot row: rho = e_p' B^-1, alpha_j = rho' a_j.
  work_pos_.clear();
  work_pos_.set(p, 1.0);
  btran(work_pos_, rho_);
  touched_.clear();
  rho_rows_.clear();
  for (int i : rho_.idx) {
    const double r = rho_.val[i];
    if (std::abs(r) <= kDropTol) {
      rho_.val[i] = 0.0;
      continue;
    }
    rho_rows_.push_back(i);
    for (int e = row_start_[i]; e < row_start_[i + 1]; ++e) {
      const int j = row_col_[e];
      if (!touched_flag_[j]) {
        touched_flag_[j] = 1;
        touched_.push_back(j);
        alpha_row_[j] = 0.0;
      }
      alpha_row_[j] += r * row_val_[e];
    }
  }
  for (int j : touched_) touched_flag_[j] = 0;
  std::sort(touched_.begin(), touched_.end());
  std::sort(rho_rows_.begin(), rho_rows_.end());

  // Candidates: nonbasic variables that may move in the direction that
  // reduces the leaving variable's infeasibility.
  const double sign = delta < 0.0 ? -1.0 : 1.0;
  const double dtol = opt_.optimality_tol;
  struct Candidate {
    int var;
    double alpha;
  };
  std::vector<Candidate> cands;
  auto consider = [&](int j, double a) {
    if (status_[j] == VarStatus::kBasic || lower_[j] == upper_[j]) return;
    const double at = sign * a;
    if (std::abs(at) <= opt_.pivot_tol) return;
    const bool ok = (status_[j] == VarStatus::kAtLower && at > 0.0) ||
                    (status_[j] == VarStatus::kAtUpper && at < 0.0) ||
                    status_[j] == VarStatus::kFree;
    if (ok) cands.push_back({j, a});
  };
  for (int j : touched_) consider(j, alpha_row_[j]);
  for (int i : rho_rows_) consider(n_ + i, -rho_.val[i]);
  if (cands.empty()) return etas_.empty() ? Step::kInfeasible : Step::kRefactor;

  int q = -1;
  double alpha_q = 0.0;
  if (bland_) {
    // Candidates arrive in increasing variable order, so the first minimal
    // ratio is the lowest index.
    double best_ratio = kInfinity;
    for (const Candidate& c : cands) {
      const double ratio = std::max(0.0, d_[c.var] / (sign * c.alpha));
      if (ratio < best_ratio - 1e-12) {
        best_ratio = ratio;
        q = c.var;
        alpha_q = c.alpha;
      }
    }
  } else {
    // Harris pass 1: largest step keeping every reduced cost within dtol.
    double bound = kInfinity;
    for (const Candidate& c : cands) {
      const double at = sign * c.alpha;
      double r;
      if (status_[c.var] == VarStatus::kFree) {
        r = (std::abs(d_[c.var]) + dtol) / std::abs(at);
      } else if (at > 0.0) {
        r = (d_[c.var] + dtol) / at;
      } else {
        r = (d_[c.var] - dtol) / at;
      }
      bound = std::min(bound, r);
    }
    // Pass 2: among ratios within the bound, the largest pivot.
    double best = 0.0;
    for (const Candidate& c : cands) {
      const double at = sign * c.alpha;
      const double r = status_[c.var] == VarStatus::kFree ? std::abs(d_[c.var] / at)
                                                           : d_[c.var] / at;
      if (r <= bound && std::abs(c.alpha) > best) {
        best = std::abs(c.alpha);
        q = c.var;
        alpha_q = c.alpha;
      }
    }
    if (q < 0) {
      q = cands.front().var;
      alpha_q = cands.front().alpha;
    }
  }

  // Entering column in position space.
  work_rows_.clear();
  if (q < n_) {
    for (int e = col_start_[q]; e < col_start_[q + 1]; ++e) {
      work_rows_.set(col_row_[e], col_val_[e]);
    }
  } else {
    work_rows_.set(q - n_, -1.0);
  }
  ftran(work_rows_, alpha_col_);
  const double pivot = alpha_col_.val[p];
  if (std::abs(pivot - alpha_q) > 1e-7 * std::max(1.0, std::abs(alpha_q)) ||
      std::abs(pivot) <= opt_.pivot_tol * 0.1) {
    if (!etas_.empty()) return Step::kRefactor;
  }

  // Steepest-edge update needs tau = B^-1 rho under the old basis.
  work_rows_.clear();
  for (int i : rho_rows_) work_rows_.set(i, rho_.val[i]);
  ftran(work_rows_, tau_);
  const double w_p = weights_[p];
  for (int i : alpha_col_.idx) {
    const double a = alpha_col_.val[i];
    if (i == p || a == 0.0) continue;
    const double ratio = a / pivot;
    weights_[i] = clamp_weight(weights_[i] + ratio * (ratio * w_p - 2.0 * tau_.val[i]));
  }
  weights_[p] = clamp_weight(w_p / (pivot * pivot));

  // Dual step.
  double theta_d = d_[q] / pivot;
  if ((delta < 0.0 && theta_d > 0.0) || (delta > 0.0 && theta_d < 0.0)) theta_d = 0.0;
  if (theta_d != 0.0) {
    for (int j : touched_) {
      if (status_[j] != VarStatus::kBasic) d_[j] -= theta_d * alpha_row_[j];
    }
    for (int i : rho_rows_) {
      if (status_[n_ + i] != VarStatus::kBasic) d_[n_ + i] += theta_d * rho_.val[i];
    }
  }
  d_[q] = 0.0;
  d_[leaving] = -theta_d;

  // Primal step.
  const double theta_p = delta / pivot;
  for (int i : alpha_col_.idx) x_[head_[i]] -= theta_p * alpha_col_.val[i];
  x_[q] += theta_p;
  x_[leaving] = target;

  status_[leaving] = to_lower ? VarStatus::kAtLower : VarStatus::kAtUpper;
  if (!std::isfinite(lower_[leaving]) && !std::isfinite(upper_[leaving])) {
    status_[leaving] = VarStatus::kFree;
  }
  status_[q] = VarStatus::kBasic;
  position_[leaving] = -1;
  position_[q] = p;
  head_[p] = q;
  for (int i : alpha_col_.idx) track_infeasible(i);
  track_infeasible(p);

  Eta eta;
  eta.pos = p;
  eta.pivot = pivot;
  for (int i : alpha_col_.idx) {
    const double a = alpha_col_.val[i];
    if (i != p && std::abs(a) > kDropTol) eta.entries.emplace_back(i, a);
  }
  eta_nnz_ += static_cast<long>(eta.entries.size()) + 1;
  etas_.push_back(std::move(eta));

  if (std::abs(theta_d) < 1e-12) {
    if (++degenerate_run_ >= opt_.bland_after) bland_ = true;
  } else {
    degenerate_run_ = 0;
    bland_ = false;
  }
  ++iterations_;
  if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) return Step::kRefactor;
  // Dense updates make every solve pay for the whole file; a refactor is
  // cheaper once the file outgrows the rows several times over.
  if (eta_nnz_ > opt_.eta_fill_limit * static_cast<double>(m_ + n_)) return Step::kRefactor;
  return Step::kContinue;
}

// Moves boxed nonbasic variables whose reduced cost has the wrong sign to the
// opposite bound. Returns true when anything moved.
bool DualSimplex::fix_dual_infeasibilities() {
  bool moved = false;
  for (int j = 0; j < n_ + m_; ++j) {
    if (status_[j] == VarStatus::kBasic || lower_[j] == upper_[j]) continue;
    if (status_[j] == VarStatus::kAtLower && d_[j] < -opt_.optimality_tol &&
        std::isfinite(upper_[j])) {
      status_[j] = VarStatus::kAtUpper;
      x_[j] = upper_[j];
      moved = true;
    } else if (status_[j] == VarStatus::kAtUpper && d_[j] > opt_.optimality_tol &&
               std::isfinite(lower_[j])) {
      status_[j] = VarStatus::kAtLower;
      x_[j] = lower_[j];
      moved = true;
    }
  }
  return moved;
}

SolveReport DualSimplex::finish(SolveStatus status) {
  SolveReport report;
  report.status = status;
  report.iterations = iterations_;
  report.node_var_count = node_vars_;
  if (status == SolveStatus::kOptimal || status == SolveStatus::kUnbounded) {
    report.solution.assign(x_.begin(), x_.begin() + n_);
    double value = 0.0;
    for (int j = 0; j < n_; ++j) value += max_cost_[j] * x_[j];
    report.objective_value = status == SolveStatus::kUnbounded ? kInfinity : value;
  }
  report.basis.assign(status_.begin(), status_.end());
  if (status == SolveStatus::kOptimal) {
    bool binary = true;
    for (int j = 0; j < node_vars_; ++j) {
      const double v = report.solution[j];
      if (std::abs(v - std::round(v)) > opt_.integrality_tol) {
        binary = false;
        break;
      }
    }
    report.is_binary = binary;
  }
  return report;
}

SolveReport DualSimplex::run() {
  auto restart = [&]() -> bool {
    if (++resets_ > 3) return false;
    slack_basis();
    bland_ = true;
    return refactor();
  };
  if (warm_ && !refactor()) {
    warm_ = false;
    slack_basis();
  }
  if (!warm_ && !refactor()) return finish(SolveStatus::kIterationLimit);
  compute_primal();
  compute_duals();
  fix_dual_infeasibilities();
  if (warm_ && !dual_feasible()) {
    // A warm basis the flips cannot repair; start from the slack basis.
    warm_ = false;
    slack_basis();
    if (!refactor()) return finish(SolveStatus::kIterationLimit);
    compute_primal();
    compute_duals();
    fix_dual_infeasibilities();
  }
  compute_primal();

  int final_checks = 0;
  while (true) {
    if (iterations_ >= opt_.max_iterations) return finish(SolveStatus::kIterationLimit);
    const Step step = iterate();
    if (step == Step::kContinue) continue;
    if (step == Step::kRefactor || step == Step::kOptimal || step == Step::kInfeasible) {
      const bool had_etas = !etas_.empty();
      if (!refactor() && !restart()) return finish(SolveStatus::kIterationLimit);
      compute_primal();
      compute_duals();
      if (step == Step::kRefactor) {
        if (fix_dual_infeasibilities()) compute_primal();
        continue;
      }
      if (step == Step::kInfeasible && !had_etas) return finish(SolveStatus::kInfeasible);
      if (step == Step::kInfeasible) continue;
      if (perturbed_) {
        // Restore the true costs; flips repair the dual and the dual
        // simplex continues from the resulting primal infeasibilities.
        perturbed_ = false;
        cost_ = original_cost_;
        compute_duals();
        if (fix_dual_infeasibilities()) compute_primal();
        continue;
      }
      // Candidate optimum: confirm on a fresh factorization.
      if (fix_dual_infeasibilities()) {
        compute_primal();
        if (++final_checks > 50) return finish(SolveStatus::kIterationLimit);
        continue;
      }
      if (choose_leaving() >= 0) {
        if (++final_checks > 50) return finish(SolveStatus::kIterationLimit);
        continue;
      }
      for (int j = 0; j < n_; ++j) {
        if (artificial_[j] && std::abs(x_[j]) >= 0.5 * kArtificialBound) {
          return finish(SolveStatus::kUnbounded);
        }
      }
      return finish(SolveStatus::kOptimal);
    }
  }
}

}  // namespace

namespace {

double row_violation(const Row& row, const std::vector<double>& x) {
  double a = 0.0;
  for (const Term& t : row.terms) a += t.coef * x[t.var];
  switch (row.rel) {
    case Relation::kLessEqual:
      return a - row.rhs;
    case Relation::kGreaterEqual:
      return row.rhs - a;
    case Relation::kEqual:
      return std::abs(a - row.rhs);
  }
  return 0.0;
}

// Solves over a growing subset of rows: each round adds every row the current
// optimum violates and warm-starts from the previous basis. Rows are never
// dropped, and the loop only stops when all rows hold, so the result is the
// optimum of the full LP.
SolveReport solve_by_row_generation(const LinearProgram& lp, const SimplexOptions& options,
                                    std::span<const VarStatus> start_basis) {
  const int n = lp.num_vars;
  const int m = static_cast<int>(lp.rows.size());
  std::vector<char> active(m, 0);
  std::vector<int> rows;
  if (start_basis.size() == static_cast<std::size_t>(n + m)) {
    for (int i = 0; i < m; ++i) {
      if (start_basis[n + i] != VarStatus::kBasic) active[i] = 1;
    }
  }
  // The starting point: every variable on the bound its cost prefers.
  std::vector<double> x(n, 0.0);
  {
    std::vector<double> c(n, 0.0);
    for (const Term& t : lp.objective) c[t.var] += t.coef;
    for (int j = 0; j < n; ++j) {
      const double want = c[j] > 0.0 ? lp.upper[j] : lp.lower[j];
      const double other = c[j] > 0.0 ? lp.lower[j] : lp.upper[j];
      x[j] = std::isfinite(want) ? want : std::isfinite(other) ? other : 0.0;
    }
  }
  std::vector<VarStatus> basis;
  if (start_basis.size() == static_cast<std::size_t>(n + m)) {
    basis.assign(start_basis.begin(), start_basis.begin() + n);
  }

  LinearProgram sub;
  sub.num_vars = n;
  sub.node_var_count = lp.node_var_count;
  sub.var_names = lp.var_names;
  sub.lower = lp.lower;
  sub.upper = lp.upper;
  sub.objective = lp.objective;
  SolveReport report;
  long iterations = 0;
  bool first = true;
  while (true) {
    int added = 0;
    if (!first) {
      for (int i = 0; i < m; ++i) {
        if (!active[i] && row_violation(lp.rows[i], x) > options.feasibility_tol) {
          active[i] = 1;
          ++added;
        }
      }
      if (added == 0) break;
    } else {
      for (int i = 0; i < m; ++i) {
        if (!active[i] && row_violation(lp.rows[i], x) > options.feasibility_tol) active[i] = 1;
      }
      first = false;
    }
    // Rebuild the subproblem in original row order; carried rows keep their
    // logical status, new rows start basic.
    std::vector<VarStatus> start;
    if (!basis.empty()) start.assign(basis.begin(), basis.begin() + n);
    std::vector<VarStatus> row_status(m, VarStatus::kBasic);
    if (!basis.empty()) {
      for (std::size_t k = 0; k < rows.size(); ++k) row_status[rows[k]] = basis[n + k];
      if (report.basis.empty() && start_basis.size() == static_cast<std::size_t>(n + m)) {
        for (int i = 0; i < m; ++i) row_status[i] = start_basis[n + i];
      }
    }
    rows.clear();
    sub.rows.clear();
    for (int i = 0; i < m; ++i) {
      if (!active[i]) continue;
      rows.push_back(i);
      sub.rows.push_back(lp.rows[i]);
      if (!start.empty()) start.push_back(row_status[i]);
    }
    report = DualSimplex(sub, options, start).run();
    iterations += report.iterations;
    if (report.status != SolveStatus::kOptimal && report.status != SolveStatus::kUnbounded) break;
    x = report.solution;
    basis = report.basis;
  }
  report.iterations = iterations;
  if (report.status == SolveStatus::kOptimal || report.status == SolveStatus::kUnbounded) {
    // Expand the basis to all rows: inactive logicals are basic.
    std::vector<VarStatus> full(basis.begin(), basis.begin() + n);
    full.resize(n + m, VarStatus::kBasic);
    for (std::size_t k = 0; k < rows.size(); ++k) full[n + rows[k]] = basis[n + k];
    report.basis = std::move(full);
  } else {
    report.basis.clear();
  }
  return report;
}

}  // namespace

SolveReport solve_lp(const LinearProgram& lp, const SimplexOptions& options,
                     std::span<const VarStatus> start_basis) {
  lp.validate();
  const auto start = std::chrono::steady_clock::now();
  const bool generate = options.row_generation_ratio > 0.0 &&
                        static_cast<double>(lp.rows.size()) >
                            options.row_generation_ratio * std::max(lp.num_vars, 1);
  SolveReport report = generate ? solve_by_row_generation(lp, options, start_basis)
                                : DualSimplex(lp, options, start_basis).run();
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::vector<VarStatus> transfer_basis(const LinearProgram& from,
                                      std::span<const VarStatus> basis,
                                      const LinearProgram& to) {
  const std::size_t n = from.num_vars;
  if (to.num_vars != from.num_vars || basis.size() != n + from.rows.size()) return {};
  auto key = [](const Row& row) {
    std::vector<std::pair<int, double>> terms;
    for (const Term& t : row.terms) terms.emplace_back(t.var, t.coef);
    std::sort(terms.begin(), terms.end());
    return std::tuple(std::move(terms), row.rel, row.rhs);
  };
  std::map<decltype(key(Row{})), VarStatus> tight;
  for (std::size_t i = 0; i < from.rows.size(); ++i) {
    if (basis[n + i] != VarStatus::kBasic) tight.emplace(key(from.rows[i]), basis[n + i]);
  }
  std::vector<VarStatus> out(basis.begin(), basis.begin() + n);
  out.reserve(n + to.rows.size());
  for (const Row& row : to.rows) {
    const auto it = tight.find(key(row));
    out.push_back(it == tight.end() ? VarStatus::kBasic : it->second);
  }
  if (static_cast<std::size_t>(std::count(out.begin(), out.end(), VarStatus::kBasic)) !=
      to.rows.size()) {
    return {};
  }
  return out;
}

}  // namespace mlpoly
