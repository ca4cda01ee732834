#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mlpoly/branch_and_bound.hpp"
#include "mlpoly/hypergraph.hpp"
#include "mlpoly/linear_program.hpp"
#include "mlpoly/relaxations.hpp"

namespace mlpoly {

// A regular LDPC code: every row checks beta bits, every bit is in gamma
// rows. Parity rows are sorted node lists.
struct LdpcCode {
  int n = 0;
  int beta = 0;
  int gamma = 0;
  std::uint64_t seed = 0;
  std::vector<Clique> parity_rows;

  int m() const { return static_cast<int>(parity_rows.size()); }
  // A word satisfies the code when each row has an even number of ones.
  bool is_codeword(std::span<const std::uint8_t> x) const;
};

// Gallager's construction: block 0 has row i on columns i*beta..i*beta+beta-1,
// then gamma-1 blocks, each the image of block 0 under a seeded random column
// permutation. A block whose permutation repeats an existing row is redrawn,
// up to 100 times. Throws std::invalid_argument unless beta | n and
// beta > gamma >= 2, std::runtime_error when the retries run out.
LdpcCode gallager_parity_check(int n, int beta, int gamma, std::uint64_t seed);

// Text format: header "n beta gamma m seed", then one row of 0-based column
// indices per line. read_code validates regularity and throws
// std::runtime_error on malformed input.
void write_code(std::ostream& os, const LdpcCode& code);
LdpcCode read_code(std::istream& is);

// Rows sum_{i in S} z_i - sum_{i in C\S} z_i <= |S| - 1 for every odd S ⊆ C
// over node slots; together they cut off exactly the odd-parity words.
std::vector<CutRow> parity_lp_constraints(const Clique& c);

// The RLT rows of C plus sum_{p ⊆ C, p nonempty} (-2)^{|p|-1} z_p = 0, the
// linearized even-parity condition. Throws std::out_of_range for a missing
// slot.
std::vector<CutRow> clique_decode_constraints(const Clique& c, const Hypergraph& h);

enum class DecodeMethod : std::uint8_t {
  kParity,
  kStandard,
  kFlower,
  kRunningIntersection,
  kClique,
  kMultiClique,
  kIp,
};

struct DecodeMethodSpec {
  DecodeMethod method = DecodeMethod::kClique;
  int max_cycle_len = 4;

  friend bool operator==(const DecodeMethodSpec&, const DecodeMethodSpec&) = default;
};

// "Parity", "Standard", "Flower", "RunningIntersection", "Clique",
// "MultiClique", "MultiClique(M)", "IP".
std::string to_string(DecodeMethodSpec method);
std::optional<DecodeMethodSpec> parse_decode_method(std::string_view name);

struct DecoderModel {
  Hypergraph hypergraph;
  LinearProgram lp;
};

// Objective sum_{y_v=1} z_v - sum_{y_v=0} z_v. The parity LP has the n node
// variables only; every other method works over the code hypergraph: the
// relaxation rows (clique rows for Clique, MultiClique and IP) plus the
// parity equality of each row. Throws std::invalid_argument when |y| != n.
DecoderModel build_decoder(const LdpcCode& code, std::span<const std::uint8_t> y,
                           DecodeMethodSpec method);

// Flips each bit of the all-zero codeword independently with probability p
// (draw u < p) using Rng(seed).
std::vector<std::uint8_t> bit_flip_channel(int n, double p, std::uint64_t seed);

struct DecodeReport {
  DecodeMethodSpec method;
  SolveStatus status = SolveStatus::kIterationLimit;
  double lp_value = 0.0;
  std::vector<double> solution;  // node variables
  bool is_binary = false;
  std::vector<std::uint8_t> decoded;
  double partial_recovery = 0.0;  // against the all-zero codeword
  long iterations = 0;
  double wall_time = 0.0;         // solve only
};

DecodeReport decode(const LdpcCode& code, std::span<const std::uint8_t> y,
                    DecodeMethodSpec method, const BranchAndBoundOptions& options = {});

}  // namespace mlpoly
