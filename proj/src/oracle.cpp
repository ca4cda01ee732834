#include "mlpoly/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace mlpoly {
namespace {

std::uint64_t node_mask(std::span<const NodeId> nodes) {
  std::uint64_t m = 0;
  for (NodeId v : nodes) m |= std::uint64_t{1} << v;
  return m;
}

// Keeps the running optimum and the assignments within tie_tol of it.
class Tracker {
 public:
  explicit Tracker(double tie_tol) : tie_tol_(tie_tol) {}

  void offer(std::uint64_t x, double value) {
    ++result_.enumerated;
    if (result_.optima.empty() || value > result_.optimum + tie_tol_) {
      result_.optimum = value;
      result_.optima.assign(1, x);
    } else if (value >= result_.optimum - tie_tol_) {
      result_.optima.push_back(x);
      result_.optimum = std::max(result_.optimum, value);
    }
  }

  OracleResult finish() {
    std::erase_if(result_.optima, [&](std::uint64_t x) {
      return values_at(x) < result_.optimum - tie_tol_;
    });
    std::sort(result_.optima.begin(), result_.optima.end());
    return std::move(result_);
  }

  std::function<double(std::uint64_t)> values_at;

 private:
  double tie_tol_;
  OracleResult result_;
};

}  // namespace

std::vector<std::uint8_t> OracleResult::assignment(std::size_t k, int node_count) const {
  std::vector<std::uint8_t> x(node_count, 0);
  for (int v = 0; v < node_count; ++v) x[v] = optima.at(k) >> v & 1u;
  return x;
}

OracleResult brute_force_map(const Hypergraph& h, const MultilinearObjective& obj,
                             double tie_tol) {
  obj.check_shape(h);
  const int n = h.node_count();
  if (n > kOracleMaxNodes) throw std::invalid_argument("too many nodes to enumerate");
  std::vector<std::pair<std::uint64_t, double>> edges;
  for (int e = 0; e < h.edge_count(); ++e) {
    if (obj.edge_coeffs[e] != 0.0) {
      edges.emplace_back(node_mask(h.edges()[e]), obj.edge_coeffs[e]);
    }
  }
  auto value = [&](std::uint64_t x) {
    double s = 0.0;
    for (int v = 0; v < n; ++v) {
      if (x >> v & 1u) s += obj.node_coeffs[v];
    }
    for (const auto& [m, c] : edges) {
      if ((x & m) == m) s += c;
    }
    return s;
  };
  Tracker tracker(tie_tol);
  tracker.values_at = value;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t x = 0; x < count; ++x) tracker.offer(x, value(x));
  return tracker.finish();
}

OracleResult brute_force_decode(const LdpcCode& code, std::span<const std::uint8_t> y,
                                double tie_tol) {
  const int n = code.n;
  if (n > 64) throw std::invalid_argument("code too long for the decoding oracle");
  if (static_cast<int>(y.size()) != n) {
    throw std::invalid_argument("received word length differs from n");
  }
  // Reduced row echelon form of H over GF(2).
  std::vector<std::uint64_t> rows;
  for (const Clique& r : code.parity_rows) rows.push_back(node_mask(r));
  std::vector<int> pivot_cols;
  std::size_t rank = 0;
  for (int col = 0; col < n && rank < rows.size(); ++col) {
    const std::uint64_t bit = std::uint64_t{1} << col;
    std::size_t p = rank;
    while (p < rows.size() && !(rows[p] & bit)) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[rank]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != rank && (rows[i] & bit)) rows[i] ^= rows[rank];
    }
    pivot_cols.push_back(col);
    ++rank;
  }
  std::uint64_t pivots = 0;
  for (int c : pivot_cols) pivots |= std::uint64_t{1} << c;
  // One nullspace vector per free column.
  std::vector<std::uint64_t> basis;
  for (int f = 0; f < n; ++f) {
    if (pivots >> f & 1u) continue;
    std::uint64_t vec = std::uint64_t{1} << f;
    for (std::size_t i = 0; i < rank; ++i) {
      if (rows[i] >> f & 1u) vec |= std::uint64_t{1} << pivot_cols[i];
    }
    basis.push_back(vec);
  }
  if (static_cast<int>(basis.size()) > kOracleMaxNodes) {
    throw std::invalid_argument("too many codewords to enumerate");
  }
  std::uint64_t ones = 0;
  for (int v = 0; v < n; ++v) {
    if (y[v]) ones |= std::uint64_t{1} << v;
  }
  const std::uint64_t all = n == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  auto value = [&](std::uint64_t x) {
    return double(std::popcount(x & ones)) - double(std::popcount(x & ~ones & all));
  };
  Tracker tracker(tie_tol);
  tracker.values_at = value;
  // Gray code walk over the span of the basis.
  std::uint64_t x = 0;
  const std::uint64_t count = std::uint64_t{1} << basis.size();
  tracker.offer(x, value(x));
  for (std::uint64_t k = 1; k < count; ++k) {
    x ^= basis[std::countr_zero(k)];
    tracker.offer(x, value(x));
  }
  return tracker.finish();
}

bool validate_cut(const CutRow& row, const Hypergraph& h) {
  NodeSet support;
  for (const auto& [slot, coef] : row.terms) {
    if (slot < 0 || slot >= h.slot_count()) throw std::out_of_range("slot out of range");
    for (NodeId v : h.slot_nodes(slot)) support.push_back(v);
  }
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  if (static_cast<int>(support.size()) > kOracleMaxCutSupport) {
    throw std::invalid_argument("cut support too large to enumerate");
  }
  // Slot masks in local support coordinates.
  std::vector<std::uint32_t> masks;
  for (const auto& [slot, coef] : row.terms) {
    std::uint32_t m = 0;
    for (NodeId v : h.slot_nodes(slot)) {
      const auto it = std::lower_bound(support.begin(), support.end(), v);
      m |= std::uint32_t{1} << (it - support.begin());
    }
    masks.push_back(m);
  }
  std::vector<std::int64_t> values(h.slot_count(), 0);
  const std::uint32_t count = std::uint32_t{1} << support.size();
  for (std::uint32_t x = 0; x < count; ++x) {
    for (std::size_t t = 0; t < masks.size(); ++t) {
      values[row.terms[t].first] = (x & masks[t]) == masks[t] ? 1 : 0;
    }
    if (!row.holds(values)) return false;
  }
  return true;
}

GridMapResult grid_map_oracle(const BitImage& noisy, double alpha,
                              const PatternPotentials& phi) {
  if (noisy.width < 2 || noisy.height < 2) throw std::invalid_argument("image below 2 x 2");
  // Patch groups are invariant under transposition, so scan along the
  // shorter side.
  const bool transpose = noisy.width > noisy.height;
  const int w = transpose ? noisy.height : noisy.width;
  const int h = transpose ? noisy.width : noisy.height;
  if (w > kGridOracleMaxSide) throw std::invalid_argument("grid oracle side too large");
  auto observed = [&](int r, int c) { return transpose ? noisy.at(c, r) : noisy.at(r, c); };

  // After pixel t is placed, state bit j holds pixel t - w + j (j = 0..w).
  const std::uint32_t states = 1u << (w + 1);
  const double kUnreached = -std::numeric_limits<double>::infinity();
  std::vector<double> value(states, kUnreached), next(states);
  value[0] = 0.0;
  const std::size_t pixels = static_cast<std::size_t>(w) * h;
  std::vector<std::uint8_t> dropped(pixels * states);
  for (std::size_t t = 0; t < pixels; ++t) {
    const int r = static_cast<int>(t) / w;
    const int c = static_cast<int>(t) % w;
    const double data = observed(r, c) ? alpha : -alpha;
    std::fill(next.begin(), next.end(), kUnreached);
    std::uint8_t* back = &dropped[t * states];
    for (std::uint32_t s = 0; s < states; ++s) {
      if (value[s] == kUnreached) continue;
      for (std::uint32_t x = 0; x <= 1; ++x) {
        double v = value[s] + (x ? data : 0.0);
        if (r >= 1 && c >= 1) {
          // s holds pixels t - w - 1 .. t - 1: up-left is bit 0, up bit 1,
          // left bit w.
          const std::uint32_t patch = (s & 1u) | (s >> 1 & 1u) << 1 | (s >> w & 1u) << 2 | x << 3;
          v += phi[pattern_group(patch) - 1];
        }
        const std::uint32_t ns = (s >> 1) | x << w;
        if (v > next[ns]) {
          next[ns] = v;
          back[ns] = static_cast<std::uint8_t>(s & 1u);
        }
      }
    }
    value.swap(next);
  }
  std::uint32_t best = 0;
  for (std::uint32_t s = 1; s < states; ++s) {
    if (value[s] > value[best]) best = s;
  }
  GridMapResult out;
  out.energy = value[best];
  out.argmax = BitImage::zeros(noisy.width, noisy.height);
  std::uint32_t s = best;
  for (std::size_t t = pixels; t-- > 0;) {
    const int r = static_cast<int>(t) / w;
    const int c = static_cast<int>(t) % w;
    const std::uint8_t x = static_cast<std::uint8_t>(s >> w & 1u);
    if (transpose) {
      out.argmax.at(c, r) = x;
    } else {
      out.argmax.at(r, c) = x;
    }
    s = ((s << 1) & (states - 1)) | dropped[t * states + s];
  }
  return out;
}

}  // namespace mlpoly
