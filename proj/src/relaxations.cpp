#include "mlpoly/relaxations.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace mlpoly {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::kStandard:
      return "standard";
    case Family::kFlower:
      return "flower";
    case Family::kRunningIntersection:
      return "running_intersection";
    case Family::kCliqueRlt:
      return "clique_rlt";
    case Family::kLiftedOddCycle:
      return "lifted_odd_cycle";
    case Family::kParity:
      return "parity";
    case Family::kParityEquality:
      return "parity_equality";
  }
  return "?";
}

void CutRow::canonicalize() {
  std::sort(terms.begin(), terms.end());
  std::size_t w = 0;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    if (w > 0 && terms[w - 1].first == terms[k].first) {
      terms[w - 1].second += terms[k].second;
    } else {
      terms[w++] = terms[k];
    }
  }
  terms.resize(w);
  std::erase_if(terms, [](const auto& t) { return t.second == 0; });

  bool negate = rel == Relation::kGreaterEqual;
  if (rel == Relation::kEqual && !terms.empty() && terms.front().second < 0) {
    negate = true;
  }
  if (negate) {
    for (auto& t : terms) t.second = -t.second;
    rhs = -rhs;
    if (rel == Relation::kGreaterEqual) rel = Relation::kLessEqual;
  }
  std::int64_t g = 0;
  for (const auto& t : terms) g = std::gcd(g, t.second);
  if (g > 1 && rhs % g == 0) {
    for (auto& t : terms) t.second /= g;
    rhs /= g;
  }
}

std::int64_t CutRow::activity(std::span<const std::int64_t> slot_values) const {
  std::int64_t s = 0;
  for (const auto& [slot, coef] : terms) s += coef * slot_values[slot];
  return s;
}

bool CutRow::holds(std::span<const std::int64_t> slot_values) const {
  const std::int64_t a = activity(slot_values);
  switch (rel) {
    case Relation::kLessEqual:
      return a <= rhs;
    case Relation::kGreaterEqual:
      return a >= rhs;
    case Relation::kEqual:
      return a == rhs;
  }
  return false;
}

std::string CutRow::linear_form(const Hypergraph& h) const {
  std::string out;
  for (const auto& [slot, coef] : terms) {
    if (!out.empty()) out += ' ';
    out += coef >= 0 ? "+" : "-";
    out += std::to_string(coef >= 0 ? coef : -coef);
    out += ' ';
    out += h.slot_label(slot);
  }
  if (out.empty()) out = "0";
  out += ' ';
  out += to_string(rel);
  out += ' ';
  out += std::to_string(rhs);
  return out;
}

namespace {

std::string set_text(std::span<const NodeId> nodes) {
  std::string out = "{";
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(nodes[i]);
  }
  return out + "}";
}

// Subsets of one clique addressed by bit masks over its sorted node list.
class CliqueSlots {
 public:
  CliqueSlots(const Clique& c, const Hypergraph& h) : clique_(c) {
    if (c.size() > static_cast<std::size_t>(kMaxRank)) {
      throw std::invalid_argument("clique exceeds the rank cap");
    }
    full_ = (std::uint32_t{1} << c.size()) - 1;
    slot_.assign(full_ + 1, -1);
    for (std::uint32_t mask = 1; mask <= full_; ++mask) {
      slot_[mask] = h.require_slot(nodes(mask));
    }
  }

  std::uint32_t full() const { return full_; }
  int slot(std::uint32_t mask) const { return slot_[mask]; }

  NodeSet nodes(std::uint32_t mask) const {
    NodeSet out;
    for (std::size_t b = 0; b < clique_.size(); ++b) {
      if (mask >> b & 1u) out.push_back(clique_[b]);
    }
    return out;
  }
  std::string text(std::uint32_t mask) const { return set_text(nodes(mask)); }

  // Adds +coef z_v for every node in mask.
  void add_nodes(CutRow& row, std::uint32_t mask, std::int64_t coef) const {
    for (std::size_t b = 0; b < clique_.size(); ++b) {
      if (mask >> b & 1u) row.terms.emplace_back(slot_[1u << b], coef);
    }
  }

 private:
  const Clique& clique_;
  std::uint32_t full_ = 0;
  std::vector<int> slot_;
};

// Neighbour candidates for a center e0: edges of the clique other than e0
// that meet e0 in at least two nodes.
std::vector<std::uint32_t> neighbour_candidates(std::uint32_t full, std::uint32_t e0) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t ek = 1; ek <= full; ++ek) {
    if (ek == e0 || std::popcount(ek) < 2) continue;
    if (std::popcount(ek & e0) >= 2) out.push_back(ek);
  }
  return out;
}

bool flower_condition(std::uint32_t e0, std::span<const std::uint32_t> chosen) {
  for (std::size_t k = 0; k < chosen.size(); ++k) {
    std::uint32_t others = 0;
    for (std::size_t j = 0; j < chosen.size(); ++j) {
      if (j != k) others |= chosen[j] & e0;
    }
    if (std::popcount(chosen[k] & e0 & ~others) < 2) return false;
  }
  return true;
}

void clique_flowers(const CliqueSlots& cs, std::vector<CutRow>& out) {
  for (std::uint32_t e0 = 1; e0 <= cs.full(); ++e0) {
    if (std::popcount(e0) < 2) continue;
    const auto cand = neighbour_candidates(cs.full(), e0);
    std::vector<std::uint32_t> chosen;
    auto emit = [&]() {
      std::uint32_t cover = 0;
      for (auto ek : chosen) cover |= ek;
      const std::uint32_t outside = e0 & ~cover;
      CutRow row;
      row.family = Family::kFlower;
      cs.add_nodes(row, outside, 1);
      std::string prov = "e0=" + cs.text(e0) + " T=";
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        row.terms.emplace_back(cs.slot(chosen[k]), 1);
        if (k > 0) prov += ';';
        prov += cs.text(chosen[k]);
      }
      row.terms.emplace_back(cs.slot(e0), -1);
      row.rhs = std::popcount(outside) + static_cast<std::int64_t>(chosen.size()) - 1;
      row.provenance = std::move(prov);
      row.canonicalize();
      out.push_back(std::move(row));
    };
    // Adding a neighbour only shrinks the private parts, so a failing prefix
    // cannot be repaired by extending it.
    auto extend = [&](auto&& self, std::size_t start) -> void {
      for (std::size_t i = start; i < cand.size(); ++i) {
        chosen.push_back(cand[i]);
        if (flower_condition(e0, chosen)) {
          emit();
          self(self, i + 1);
        }
        chosen.pop_back();
      }
    };
    extend(extend, 0);
  }
}

void clique_running_intersections(const CliqueSlots& cs, std::vector<CutRow>& out) {
  for (std::uint32_t e0 = 1; e0 <= cs.full(); ++e0) {
    if (std::popcount(e0) < 2) continue;
    const auto cand = neighbour_candidates(cs.full(), e0);
    // Neighbours grouped by their intersection with e0.
    std::vector<std::uint32_t> meets;
    std::vector<std::vector<std::uint32_t>> groups;
    for (std::uint32_t ek : cand) {
      const std::uint32_t meet = ek & e0;
      auto it = std::find(meets.begin(), meets.end(), meet);
      if (it == meets.end()) {
        meets.push_back(meet);
        groups.push_back({ek});
      } else {
        groups[it - meets.begin()].push_back(ek);
      }
    }
    std::vector<int> order(meets.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return meets[a] < meets[b]; });

    std::vector<int> picked;  // indices into meets
    auto emit_family = [&]() {
      std::vector<std::uint32_t> family;
      for (int g : picked) family.push_back(meets[g]);
      const auto rip = running_intersection_ordering(
          std::span<const std::uint32_t>(family));
      if (!rip) return;
      const std::size_t t = picked.size();
      std::vector<std::uint32_t> sep(t, 0);
      for (std::size_t pos = 0; pos < t; ++pos) sep[rip->order[pos]] = rip->separators[pos];

      std::vector<std::size_t> ek_choice(t, 0);
      std::vector<std::uint32_t> w(t, 0);
      // Odometer over neighbour choices, then over w_k ⊆ N_k (sub-mask walk).
      while (true) {
        std::fill(w.begin(), w.end(), 0u);
        while (true) {
          std::uint32_t cover = 0;
          for (std::size_t k = 0; k < t; ++k) cover |= groups[picked[k]][ek_choice[k]];
          const std::uint32_t outside = e0 & ~cover;
          std::int64_t omega = std::popcount(outside);
          CutRow row;
          row.family = Family::kRunningIntersection;
          cs.add_nodes(row, outside, 1);
          std::int64_t constant = 0;
          std::string prov = "e0=" + cs.text(e0) + " T=";
          std::string wtext = " w=";
          for (std::size_t k = 0; k < t; ++k) {
            const std::uint32_t ek = groups[picked[k]][ek_choice[k]];
            row.terms.emplace_back(cs.slot(ek), 1);
            if (sep[k] == 0) {
              ++omega;
            } else if (w[k] == 0) {
              ++constant;
            } else {
              row.terms.emplace_back(cs.slot(w[k]), -1);
            }
            if (k > 0) {
              prov += ';';
              wtext += ';';
            }
            prov += cs.text(ek);
            wtext += cs.text(w[k]);
          }
          row.terms.emplace_back(cs.slot(e0), -1);
          row.rhs = omega - 1 + constant;
          row.provenance = prov + wtext;
          row.canonicalize();
          out.push_back(std::move(row));

          std::size_t k = 0;
          for (; k < t; ++k) {
            if (sep[k] == 0) continue;
            // Next sub-mask of sep[k] in increasing order; wraps to 0.
            w[k] = (w[k] - sep[k]) & sep[k];
            if (w[k] != 0) break;
          }
          if (k == t) break;
        }
        std::size_t k = 0;
        for (; k < t; ++k) {
          if (++ek_choice[k] < groups[picked[k]].size()) break;
          ek_choice[k] = 0;
        }
        if (k == t) break;
      }
    };
    auto extend = [&](auto&& self, std::size_t start) -> void {
      for (std::size_t i = start; i < order.size(); ++i) {
        const int g = order[i];
        bool nested = false;
        for (int p : picked) {
          const std::uint32_t a = meets[p], b = meets[g];
          if ((a & ~b) == 0 || (b & ~a) == 0) {
            nested = true;
            break;
          }
        }
        if (nested) continue;
        picked.push_back(g);
        emit_family();
        self(self, i + 1);
        picked.pop_back();
      }
    };
    extend(extend, 0);
  }
}

void append_key(std::string& key, std::int64_t v) {
  key.append(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

std::vector<CutRow> standard_linearization(const Hypergraph& h) {
  std::vector<CutRow> rows;
  for (int k = 0; k < h.edge_count(); ++k) {
    const Edge& e = h.edges()[k];
    const int ze = h.node_count() + k;
    const std::string prov = "e=" + set_text(e);

    CutRow nonneg;
    nonneg.terms = {{ze, -1}};
    nonneg.rhs = 0;
    nonneg.provenance = prov;
    rows.push_back(nonneg);

    CutRow lower;
    for (NodeId v : e) lower.terms.emplace_back(v, 1);
    lower.terms.emplace_back(ze, -1);
    lower.rhs = static_cast<std::int64_t>(e.size()) - 1;
    lower.provenance = prov;
    lower.canonicalize();
    rows.push_back(lower);

    for (NodeId v : e) {
      CutRow upper;
      upper.terms = {{v, -1}, {ze, 1}};
      upper.rhs = 0;
      upper.provenance = prov + " v=" + std::to_string(v);
      upper.canonicalize();
      rows.push_back(upper);
    }
  }
  return rows;
}

std::vector<CutRow> flower_inequalities(const Hypergraph& h) {
  std::vector<CutRow> rows;
  for (const Clique& c : h.cliques()) {
    CliqueSlots cs(c, h);
    clique_flowers(cs, rows);
  }
  deduplicate_rows(rows);
  return rows;
}

std::vector<CutRow> running_intersection_inequalities(const Hypergraph& h) {
  std::vector<CutRow> rows;
  for (const Clique& c : h.cliques()) {
    CliqueSlots cs(c, h);
    clique_running_intersections(cs, rows);
  }
  deduplicate_rows(rows);
  return rows;
}

std::vector<CutRow> clique_rlt_inequalities(const Clique& c, const Hypergraph& h) {
  CliqueSlots cs(c, h);
  std::vector<CutRow> rows;
  rows.reserve(cs.full() + 1);
  for (std::uint32_t u = 0; u <= cs.full(); ++u) {
    const std::uint32_t base = cs.full() & ~u;
    CutRow row;
    row.family = Family::kCliqueRlt;
    row.rel = Relation::kGreaterEqual;
    std::int64_t constant = 0;
    // Walk all W ⊆ U, including U itself and the empty set.
    std::uint32_t w = 0;
    do {
      const std::int64_t sign = std::popcount(w) % 2 == 0 ? 1 : -1;
      const std::uint32_t s = base | w;
      if (s == 0) {
        constant += sign;
      } else {
        row.terms.emplace_back(cs.slot(s), sign);
      }
      w = (w - u) & u;
    } while (w != 0);
    row.rhs = -constant;
    row.provenance = "C=" + set_text(c) + " U=" + cs.text(u);
    row.canonicalize();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CutRow> lifted_odd_cycle_inequalities(const LiftedCliqueCycle& cycle,
                                                  const Hypergraph& h) {
  const int m = static_cast<int>(cycle.link_nodes.size());
  if (m < 3 || static_cast<int>(cycle.cliques.size()) != m) {
    throw std::invalid_argument("lifted cycle needs at least three cliques");
  }
  const NodeId vbar = cycle.shared_node;
  const auto& v = cycle.link_nodes;
  auto slot = [&](std::vector<NodeId> nodes) {
    return h.require_slot(make_node_set(std::move(nodes)));
  };
  // Link edge i is {v_i, v_{i+1}}; it and its lift live in one clique.
  std::vector<int> pair_slot(m), pair_lift(m), node_lift(m);
  for (int i = 0; i < m; ++i) {
    const NodeId a = v[i], b = v[(i + 1) % m];
    pair_slot[i] = slot({a, b});
    pair_lift[i] = slot({a, b, vbar});
    node_lift[i] = slot({v[i], vbar});
  }
  std::string base = "cycle=";
  for (int i = 0; i < m; ++i) {
    base += (i == 0 ? "[" : ",") + std::to_string(cycle.cliques[i]);
  }
  base += "] vbar=" + std::to_string(vbar) + " D=";

  std::vector<CutRow> rows;
  for (std::uint32_t d = 1; d < (1u << m); ++d) {
    if (std::popcount(d) % 2 == 0) continue;
    const std::int64_t half = std::popcount(d) / 2;
    // Node i belongs to link edges i-1 and i.
    std::vector<int> node_sign(m, 0);
    for (int i = 0; i < m; ++i) {
      const bool in_prev = d >> ((i + m - 1) % m) & 1u;
      const bool in_next = d >> i & 1u;
      if (in_prev && in_next) node_sign[i] = 1;    // V1(D)
      if (!in_prev && !in_next) node_sign[i] = -1; // V2(D)
    }
    std::string dtext;
    for (int i = 0; i < m; ++i) {
      if (!(d >> i & 1u)) continue;
      if (!dtext.empty()) dtext += ';';
      dtext += set_text(make_node_set({v[i], v[(i + 1) % m]}));
    }

    CutRow lifted;
    lifted.family = Family::kLiftedOddCycle;
    CutRow rest;
    rest.family = Family::kLiftedOddCycle;
    for (int i = 0; i < m; ++i) {
      if (node_sign[i] != 0) {
        lifted.terms.emplace_back(node_lift[i], node_sign[i]);
        rest.terms.emplace_back(v[i], node_sign[i]);
        rest.terms.emplace_back(node_lift[i], -node_sign[i]);
      }
      const std::int64_t es = (d >> i & 1u) ? -1 : 1;
      lifted.terms.emplace_back(pair_lift[i], es);
      rest.terms.emplace_back(pair_slot[i], es);
      rest.terms.emplace_back(pair_lift[i], -es);
    }
    lifted.terms.emplace_back(vbar, -half);
    lifted.rhs = 0;
    lifted.provenance = base + dtext + " part=1";
    rest.terms.emplace_back(vbar, half);
    rest.rhs = half;
    rest.provenance = base + dtext + " part=2";
    lifted.canonicalize();
    rest.canonicalize();
    rows.push_back(std::move(lifted));
    rows.push_back(std::move(rest));
  }
  return rows;
}

std::string to_string(RelaxationKind kind) {
  switch (kind.kind) {
    case RelaxationKind::Kind::kStandard:
      return "Standard";
    case RelaxationKind::Kind::kFlower:
      return "Flower";
    case RelaxationKind::Kind::kRunningIntersection:
      return "RunningIntersection";
    case RelaxationKind::Kind::kClique:
      return "Clique";
    case RelaxationKind::Kind::kMultiClique:
      if (kind.max_cycle_len == 4) return "MultiClique";
      return "MultiClique(" + std::to_string(kind.max_cycle_len) + ")";
  }
  return "?";
}

std::optional<RelaxationKind> parse_relaxation_kind(std::string_view name) {
  if (name == "Standard") return RelaxationKind::standard();
  if (name == "Flower") return RelaxationKind::flower();
  if (name == "RunningIntersection") return RelaxationKind::running_intersection();
  if (name == "Clique") return RelaxationKind::clique();
  if (name == "MultiClique") return RelaxationKind::multi_clique();
  constexpr std::string_view prefix = "MultiClique(";
  if (name.starts_with(prefix) && name.ends_with(")")) {
    const std::string_view digits =
        name.substr(prefix.size(), name.size() - prefix.size() - 1);
    int m = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), m);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && m >= 3) {
      return RelaxationKind::multi_clique(m);
    }
  }
  return std::nullopt;
}

void deduplicate_rows(std::vector<CutRow>& rows) {
  std::unordered_set<std::string> seen;
  seen.reserve(rows.size() * 2);
  std::vector<CutRow> kept;
  kept.reserve(rows.size());
  for (CutRow& row : rows) {
    if (row.terms.empty() && row.rel == Relation::kLessEqual && row.rhs >= 0) continue;
    std::string key;
    key.reserve(row.terms.size() * 12 + 10);
    for (const auto& [slot, coef] : row.terms) {
      append_key(key, slot);
      append_key(key, coef);
    }
    key.push_back(static_cast<char>(row.rel));
    append_key(key, row.rhs);
    if (seen.insert(std::move(key)).second) kept.push_back(std::move(row));
  }
  rows = std::move(kept);
}

std::vector<CutRow> relaxation_rows(const Hypergraph& h, RelaxationKind kind) {
  std::vector<CutRow> rows;
  using K = RelaxationKind::Kind;
  switch (kind.kind) {
    case K::kStandard:
    case K::kFlower:
    case K::kRunningIntersection: {
      rows = standard_linearization(h);
      if (kind.kind != K::kStandard) {
        auto fl = flower_inequalities(h);
        rows.insert(rows.end(), std::make_move_iterator(fl.begin()),
                    std::make_move_iterator(fl.end()));
      }
      if (kind.kind == K::kRunningIntersection) {
        auto ri = running_intersection_inequalities(h);
        rows.insert(rows.end(), std::make_move_iterator(ri.begin()),
                    std::make_move_iterator(ri.end()));
      }
      break;
    }
    case K::kClique:
    case K::kMultiClique: {
      for (const Clique& c : h.cliques()) {
        auto r = clique_rlt_inequalities(c, h);
        rows.insert(rows.end(), std::make_move_iterator(r.begin()),
                    std::make_move_iterator(r.end()));
      }
      if (kind.kind == K::kMultiClique) {
        if (kind.max_cycle_len < 3) {
          throw std::invalid_argument("multi-clique relaxation needs M >= 3");
        }
        for (const auto& cycle :
             enumerate_lifted_clique_cycles(h.cliques(), kind.max_cycle_len)) {
          auto r = lifted_odd_cycle_inequalities(cycle, h);
          rows.insert(rows.end(), std::make_move_iterator(r.begin()),
                      std::make_move_iterator(r.end()));
        }
      }
      break;
    }
  }
  deduplicate_rows(rows);
  return rows;
}

LinearProgram lp_from_rows(const Hypergraph& h, std::span<const CutRow> rows,
                           const MultilinearObjective& obj) {
  obj.check_shape(h);
  LinearProgram lp;
  lp.num_vars = h.slot_count();
  lp.node_var_count = h.node_count();
  lp.lower.assign(lp.num_vars, 0.0);
  lp.upper.assign(lp.num_vars, 1.0);
  lp.var_names.reserve(lp.num_vars);
  for (int s = 0; s < lp.num_vars; ++s) {
    lp.var_names.push_back(h.slot_label(s));
    const double c = obj.slot_coeff(h, s);
    if (c != 0.0) lp.objective.push_back({s, c});
  }
  lp.rows.reserve(rows.size());
  for (const CutRow& r : rows) {
    Row row;
    row.terms.reserve(r.terms.size());
    for (const auto& [slot, coef] : r.terms) {
      row.terms.push_back({slot, static_cast<double>(coef)});
    }
    row.rel = r.rel;
    row.rhs = static_cast<double>(r.rhs);
    row.name = std::string(to_string(r.family)) + " " + r.provenance;
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

LinearProgram build_relaxation(const Hypergraph& h, RelaxationKind kind,
                               const MultilinearObjective& obj) {
  const auto rows = relaxation_rows(h, kind);
  return lp_from_rows(h, rows, obj);
}

SolveReport solve_relaxation(const Hypergraph& h, RelaxationKind kind,
                             const MultilinearObjective& obj, const SimplexOptions& options) {
  const LinearProgram lp = build_relaxation(h, kind, obj);
  if (kind.kind != RelaxationKind::Kind::kMultiClique) return solve_lp(lp, options);
  const LinearProgram base = build_relaxation(h, RelaxationKind::clique(), obj);
  const SolveReport first = solve_lp(base, options);
  if (first.status != SolveStatus::kOptimal) {
    // Infeasible or unbounded base: the full LP decides from scratch.
    SolveReport r = solve_lp(lp, options);
    r.iterations += first.iterations;
    r.wall_time += first.wall_time;
    return r;
  }
  SolveReport r = solve_lp(lp, options, transfer_basis(base, first.basis, lp));
  r.iterations += first.iterations;
  r.wall_time += first.wall_time;
  return r;
}

std::string dump_rows(const Hypergraph& h, std::span<const CutRow> rows) {
  std::string out;
  for (const CutRow& r : rows) {
    out += to_string(r.family);
    out += ' ';
    out += r.provenance;
    out += " : ";
    out += r.linear_form(h);
    out += '\n';
  }
  return out;
}

}  // namespace mlpoly
