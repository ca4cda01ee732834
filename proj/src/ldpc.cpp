#include "mlpoly/ldpc.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <chrono>
#include <istream>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mlpoly/rng.hpp"

namespace mlpoly {

bool LdpcCode::is_codeword(std::span<const std::uint8_t> x) const {
  for (const Clique& row : parity_rows) {
    int ones = 0;
    for (NodeId v : row) ones += x[v] ? 1 : 0;
    if (ones % 2 != 0) return false;
  }
  return true;
}

LdpcCode gallager_parity_check(int n, int beta, int gamma, std::uint64_t seed) {
  if (n <= 0 || beta <= 0 || gamma < 2 || beta <= gamma) {
    throw std::invalid_argument("code parameters need beta > gamma >= 2");
  }
  if (n % beta != 0) throw std::invalid_argument("beta must divide n");
  LdpcCode code;
  code.n = n;
  code.beta = beta;
  code.gamma = gamma;
  code.seed = seed;
  const int block_rows = n / beta;
  std::vector<Clique> base(block_rows);
  for (int i = 0; i < block_rows; ++i) {
    for (int c = 0; c < beta; ++c) base[i].push_back(i * beta + c);
  }
  std::set<Clique> seen(base.begin(), base.end());
  code.parity_rows = base;

  constexpr int kMaxRetries = 100;
  Rng rng(seed);
  std::vector<int> perm(n);
  for (int block = 1; block < gamma; ++block) {
    bool placed = false;
    for (int attempt = 0; attempt <= kMaxRetries && !placed; ++attempt) {
      std::iota(perm.begin(), perm.end(), 0);
      rng.shuffle(std::span<int>(perm));
      std::vector<Clique> rows;
      bool clash = false;
      for (const Clique& b : base) {
        Clique row;
        for (NodeId v : b) row.push_back(perm[v]);
        std::sort(row.begin(), row.end());
        if (seen.count(row)) {
          clash = true;
          break;
        }
        rows.push_back(std::move(row));
      }
      if (clash) continue;
      for (auto& row : rows) {
        seen.insert(row);
        code.parity_rows.push_back(std::move(row));
      }
      placed = true;
    }
    if (!placed) {
      throw std::runtime_error("could not draw a permutation without duplicate rows");
    }
  }
  return code;
}

void write_code(std::ostream& os, const LdpcCode& code) {
  os << code.n << ' ' << code.beta << ' ' << code.gamma << ' ' << code.m() << ' '
     << code.seed << '\n';
  for (const Clique& row : code.parity_rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) os << ' ';
      os << row[i];
    }
    os << '\n';
  }
}

LdpcCode read_code(std::istream& is) {
  LdpcCode code;
  int m = 0;
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("missing code header");
  std::istringstream hs(header);
  if (!(hs >> code.n >> code.beta >> code.gamma >> m >> code.seed)) {
    throw std::runtime_error("malformed code header");
  }
  if (code.n <= 0 || code.beta <= 0 || code.gamma <= 0 || m <= 0) {
    throw std::runtime_error("non-positive code parameters");
  }
  if (static_cast<long>(m) * code.beta != static_cast<long>(code.n) * code.gamma) {
    throw std::runtime_error("row count does not match n*gamma/beta");
  }
  std::vector<int> degree(code.n, 0);
  std::string line;
  while (static_cast<int>(code.parity_rows.size()) < m && std::getline(is, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    Clique row;
    int v;
    while (ls >> v) {
      if (v < 0 || v >= code.n) throw std::runtime_error("column index out of range");
      row.push_back(v);
    }
    if (!ls.eof()) throw std::runtime_error("malformed parity row");
    std::sort(row.begin(), row.end());
    if (static_cast<int>(row.size()) != code.beta ||
        std::adjacent_find(row.begin(), row.end()) != row.end()) {
      throw std::runtime_error("parity row does not have beta distinct columns");
    }
    for (NodeId c : row) ++degree[c];
    code.parity_rows.push_back(std::move(row));
  }
  if (code.m() != m) throw std::runtime_error("fewer parity rows than declared");
  for (int d : degree) {
    if (d != code.gamma) throw std::runtime_error("column degree differs from gamma");
  }
  return code;
}

std::vector<CutRow> parity_lp_constraints(const Clique& c) {
  if (c.size() < 2 || c.size() > 30) {
    throw std::invalid_argument("parity row size out of range");
  }
  const std::uint32_t full = (std::uint32_t{1} << c.size()) - 1;
  std::vector<CutRow> rows;
  for (std::uint32_t s = 1; s <= full; ++s) {
    if (std::popcount(s) % 2 == 0) continue;
    CutRow row;
    row.family = Family::kParity;
    std::string prov = "C={";
    std::string stext = " S={";
    for (std::size_t b = 0; b < c.size(); ++b) {
      const bool in = s >> b & 1u;
      row.terms.emplace_back(c[b], in ? 1 : -1);
      prov += (b ? "," : "") + std::to_string(c[b]);
      if (in) stext += (stext.size() > 4 ? "," : "") + std::to_string(c[b]);
    }
    row.rhs = std::popcount(s) - 1;
    row.provenance = prov + "}" + stext + "}";
    row.canonicalize();
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CutRow> clique_decode_constraints(const Clique& c, const Hypergraph& h) {
  std::vector<CutRow> rows = clique_rlt_inequalities(c, h);
  const std::uint32_t full = (std::uint32_t{1} << c.size()) - 1;
  CutRow eq;
  eq.family = Family::kParityEquality;
  eq.rel = Relation::kEqual;
  std::string prov = "C={";
  for (std::size_t b = 0; b < c.size(); ++b) {
    prov += (b ? "," : "") + std::to_string(c[b]);
  }
  eq.provenance = prov + "}";
  for (std::uint32_t p = 1; p <= full; ++p) {
    NodeSet nodes;
    for (std::size_t b = 0; b < c.size(); ++b) {
      if (p >> b & 1u) nodes.push_back(c[b]);
    }
    const int k = std::popcount(p);
    std::int64_t coef = 1;
    for (int i = 1; i < k; ++i) coef *= -2;
    eq.terms.emplace_back(h.require_slot(nodes), coef);
  }
  eq.rhs = 0;
  eq.canonicalize();
  rows.push_back(std::move(eq));
  return rows;
}

std::string to_string(DecodeMethodSpec method) {
  switch (method.method) {
    case DecodeMethod::kParity:
      return "Parity";
    case DecodeMethod::kStandard:
      return "Standard";
    case DecodeMethod::kFlower:
      return "Flower";
    case DecodeMethod::kRunningIntersection:
      return "RunningIntersection";
    case DecodeMethod::kClique:
      return "Clique";
    case DecodeMethod::kMultiClique:
      if (method.max_cycle_len == 4) return "MultiClique";
      return "MultiClique(" + std::to_string(method.max_cycle_len) + ")";
    case DecodeMethod::kIp:
      return "IP";
  }
  return "?";
}

std::optional<DecodeMethodSpec> parse_decode_method(std::string_view name) {
  if (name == "Parity" || name == "ParityLP") return DecodeMethodSpec{DecodeMethod::kParity};
  if (name == "IP") return DecodeMethodSpec{DecodeMethod::kIp};
  if (auto kind = parse_relaxation_kind(name)) {
    using K = RelaxationKind::Kind;
    switch (kind->kind) {
      case K::kStandard:
        return DecodeMethodSpec{DecodeMethod::kStandard};
      case K::kFlower:
        return DecodeMethodSpec{DecodeMethod::kFlower};
      case K::kRunningIntersection:
        return DecodeMethodSpec{DecodeMethod::kRunningIntersection};
      case K::kClique:
        return DecodeMethodSpec{DecodeMethod::kClique};
      case K::kMultiClique:
        return DecodeMethodSpec{DecodeMethod::kMultiClique, kind->max_cycle_len};
    }
  }
  return std::nullopt;
}

DecoderModel build_decoder(const LdpcCode& code, std::span<const std::uint8_t> y,
                           DecodeMethodSpec method) {
  if (static_cast<int>(y.size()) != code.n) {
    throw std::invalid_argument("received word length differs from n");
  }
  DecoderModel model;
  model.hypergraph = build_ugm_hypergraph(code.parity_rows, code.n);
  const Hypergraph& h = model.hypergraph;
  MultilinearObjective obj = MultilinearObjective::zero(h);
  for (int v = 0; v < code.n; ++v) obj.node_coeffs[v] = y[v] ? 1.0 : -1.0;

  if (method.method == DecodeMethod::kParity) {
    LinearProgram lp = LinearProgram::with_unit_box(code.n);
    for (int v = 0; v < code.n; ++v) {
      lp.var_names[v] = h.slot_label(v);
      lp.objective.push_back({v, obj.node_coeffs[v]});
    }
    std::vector<CutRow> rows;
    for (const Clique& c : code.parity_rows) {
      auto r = parity_lp_constraints(c);
      rows.insert(rows.end(), r.begin(), r.end());
    }
    deduplicate_rows(rows);
    for (const CutRow& r : rows) {
      Row row;
      for (const auto& [slot, coef] : r.terms) row.terms.push_back({slot, double(coef)});
      row.rel = r.rel;
      row.rhs = double(r.rhs);
      row.name = std::string(to_string(r.family)) + " " + r.provenance;
      lp.rows.push_back(std::move(row));
    }
    model.lp = std::move(lp);
    return model;
  }

  RelaxationKind kind = RelaxationKind::clique();
  switch (method.method) {
    case DecodeMethod::kStandard:
      kind = RelaxationKind::standard();
      break;
    case DecodeMethod::kFlower:
      kind = RelaxationKind::flower();
      break;
    case DecodeMethod::kRunningIntersection:
      kind = RelaxationKind::running_intersection();
      break;
    case DecodeMethod::kMultiClique:
      kind = RelaxationKind::multi_clique(method.max_cycle_len);
      break;
    default:
      break;
  }
  std::vector<CutRow> rows = relaxation_rows(h, kind);
  for (const Clique& c : code.parity_rows) {
    auto all = clique_decode_constraints(c, h);
    rows.push_back(std::move(all.back()));
  }
  deduplicate_rows(rows);
  model.lp = lp_from_rows(h, rows, obj);
  return model;
}

std::vector<std::uint8_t> bit_flip_channel(int n, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::uint8_t> y(n, 0);
  for (int v = 0; v < n; ++v) y[v] = rng.uniform01() < p ? 1 : 0;
  return y;
}

DecodeReport decode(const LdpcCode& code, std::span<const std::uint8_t> y,
                    DecodeMethodSpec method, const BranchAndBoundOptions& options) {
  DecoderModel model = build_decoder(code, y, method);
  DecodeReport out;
  out.method = method;
  const auto start = std::chrono::steady_clock::now();
  SolveReport report;
  if (method.method == DecodeMethod::kIp) {
    std::vector<int> binary(code.n);
    std::iota(binary.begin(), binary.end(), 0);
    report = solve_binary_ip(model.lp, binary, options);
  } else {
    report = solve_lp(model.lp, options.lp);
  }
  out.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.status = report.status;
  out.iterations = report.iterations;
  if (report.status != SolveStatus::kOptimal) return out;
  out.lp_value = report.objective_value;
  out.solution.assign(report.solution.begin(), report.solution.begin() + code.n);
  const Rounding rounding = classify_and_round(report, options.lp.integrality_tol);
  out.is_binary = rounding.is_binary;
  out.decoded.resize(code.n);
  int correct = 0;
  for (int v = 0; v < code.n; ++v) {
    out.decoded[v] = rounding.rounded[v] > 0.5 ? 1 : 0;
    if (out.decoded[v] == 0) ++correct;
  }
  out.partial_recovery = static_cast<double>(correct) / code.n;
  return out;
}

}  // namespace mlpoly
