#pragma once

#include <iosfwd>
#include <span>

#include "mlpoly/linear_program.hpp"

namespace mlpoly {

// CPLEX-style LP text: "Maximize", "Subject To", "Bounds", an optional
// "Binaries" section and "End". Columns are labelled by var_names (x<j> when
// a name is empty or not a valid LP identifier) and all of them are listed in
// the objective in column order. Rows are c0, c1, ... in row order. Numbers
// use the shortest round-trip decimal form, so the output is byte-stable and
// re-reads to the same doubles.
void write_lp(std::ostream& os, const LinearProgram& lp,
              std::span<const int> binary_vars = {});

// Reads the subset of the LP format written above: Maximize/Minimize (a
// minimization is negated into a maximization), Subject To, Bounds,
// Binaries/Generals (bounds only, integrality is not kept) and End, with
// "\" comments. Variables are numbered in order of first appearance and all
// of them count as node variables; zero objective terms are dropped.
// Undeclared bounds default to [0, +inf).
// Throws std::runtime_error on malformed input.
LinearProgram read_lp(std::istream& is);

}  // namespace mlpoly
