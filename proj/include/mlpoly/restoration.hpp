#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mlpoly/branch_and_bound.hpp"
#include "mlpoly/hypergraph.hpp"
#include "mlpoly/linear_program.hpp"
#include "mlpoly/objective.hpp"
#include "mlpoly/relaxations.hpp"

namespace mlpoly {

// Binary image, row-major; pixel (r, c) is node r * width + c.
struct BitImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  static BitImage zeros(int width, int height);
  std::uint8_t at(int r, int c) const { return pixels[r * width + c]; }
  std::uint8_t& at(int r, int c) { return pixels[r * width + c]; }
  int size() const { return width * height; }

  friend bool operator==(const BitImage&, const BitImage&) = default;
};

// Plain PBM (P1). read_pbm accepts comments and digits with or without
// separating whitespace; throws std::runtime_error on malformed input.
void write_pbm(std::ostream& os, const BitImage& img);
BitImage read_pbm(std::istream& is);

// 2x2 patches in row-major order. Each clique lists (r,c), (r,c+1),
// (r+1,c), (r+1,c+1), which is also ascending node order. Throws
// std::invalid_argument unless width, height >= 2.
std::vector<Clique> grid_cliques(int width, int height);

// Group 1..4 of a patch given as a mask, bit k set when patch position k is
// 1 (positions in the order above): 1 uniform, 2 a single differing pixel,
// 3 two equal edge-adjacent halves, 4 a diagonal pair.
int pattern_group(std::uint32_t patch);

using PatternPotentials = std::array<double, 4>;  // phi_1..phi_4

// Coefficients c_S of the multilinear interpolant of phi over one patch,
// indexed by subset mask S: c_S = sum_{T subset S} (-1)^{|S \ T|} phi_{group(T)}.
template <typename T>
std::array<T, 16> potentials_to_coefficients(const std::array<T, 4>& phi) {
  std::array<T, 16> c{};
  for (std::uint32_t s = 0; s < 16; ++s) {
    T sum = T(0);
    // Iterate all submasks of s, including s and 0.
    for (std::uint32_t t = s;; t = (t - 1) & s) {
      const int gap = std::popcount(s & ~t);
      const T& value = phi[pattern_group(t) - 1];
      if (gap % 2 == 0) {
        sum += value;
      } else {
        sum -= value;
      }
      if (t == 0) break;
    }
    c[s] = sum;
  }
  return c;
}

struct RestorationModel {
  Hypergraph hypergraph;
  MultilinearObjective objective;
};

// alpha (x_v if y_v = 1, -x_v if y_v = 0) per pixel plus the interpolated
// patch potentials summed over every 2x2 patch. The c_empty terms go to
// objective.constant. Throws std::invalid_argument unless alpha > 0.
RestorationModel build_restoration_objective(const BitImage& noisy, double alpha,
                                             const PatternPotentials& phi);

// Objective of the model above evaluated directly from its definition:
// data term plus phi_{group} of every patch, constant included.
double restoration_energy(const BitImage& noisy, double alpha,
                          const PatternPotentials& phi, const BitImage& x);

// Flips each pixel independently when a uniform draw is below p, using
// Rng(seed). Throws std::invalid_argument unless 0 <= p <= 0.5.
BitImage apply_bit_flip_noise(const BitImage& img, double p, std::uint64_t seed);

enum class SyntheticKind : std::uint8_t { kTopLeft, kCenter, kCross };

std::string_view to_string(SyntheticKind kind);  // "TL", "CEN", "CROSS"
std::optional<SyntheticKind> parse_synthetic_kind(std::string_view name);

// TL: ones on the top-left floor(w/2) x floor(h/2) block. CEN: a block of the
// same size offset by floor((side - block)/2). CROSS: a horizontal bar of
// ceil(h/5) rows and a vertical bar of ceil(w/5) columns, each offset by
// floor((side - thickness)/2). Throws std::invalid_argument below 4 x 4.
BitImage generate_synthetic_image(SyntheticKind kind, int width, int height);

// Fraction of equal pixels; throws std::invalid_argument on a size mismatch.
double partial_recovery(const BitImage& truth, const BitImage& restored);

struct RelativeGap {
  double signed_percent = 0.0;    // (f - g) / f * 100
  double absolute_percent = 0.0;  // |g - f| / |f| * 100
};

// Throws std::invalid_argument when f_star is zero.
RelativeGap relative_gap(double f_star, double g_star);

// phi_i = -f_i where f_i is the mean fraction of patches in group i.
// Throws std::invalid_argument on an empty list or images below 2 x 2.
PatternPotentials learn_phi_from_frequencies(const std::vector<BitImage>& images);

// A relaxation, or the exact problem solved by branch and bound on the
// node variables over `kind`. The clique LP is the default base: over the
// standard LP the search does not close the gap on 8 x 8 images within
// thousands of nodes.
struct RestoreMethod {
  bool ip = false;
  RelaxationKind kind = RelaxationKind::clique();

  static RestoreMethod relaxation(RelaxationKind k) { return {false, k}; }
  static RestoreMethod exact(RelaxationKind base = RelaxationKind::clique()) {
    return {true, base};
  }
  friend bool operator==(const RestoreMethod&, const RestoreMethod&) = default;
};

// Relaxation names, or "IP" for the exact problem over the clique LP and
// "IP/<relaxation>" for another base relaxation.
std::string to_string(const RestoreMethod& method);
std::optional<RestoreMethod> parse_restore_method(std::string_view name);

struct RestoreResult {
  BitImage restored;
  SolveStatus status = SolveStatus::kIterationLimit;
  double value = 0.0;     // LP or IP optimum, constant excluded
  double constant = 0.0;  // objective.constant of the model
  bool is_binary = false;
  long iterations = 0;
  long nodes = 0;          // branch-and-bound nodes, 0 for relaxations
  double wall_time = 0.0;  // solve only
};

RestoreResult restore(const BitImage& noisy, double alpha, const PatternPotentials& phi,
                      const RestoreMethod& method,
                      const BranchAndBoundOptions& options = {});

}  // namespace mlpoly
