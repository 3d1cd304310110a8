#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "multirank/dataset.hpp"

namespace multirank {

enum class CodingScheme { binary, ternary_upper, ternary_lower, lpc };

std::string coding_scheme_name(CodingScheme s);
CodingScheme coding_scheme_from_name(const std::string& name);  // UsageError on unknown

// L x k matrix over {-1, 0, +1}: per column, rows with +1 form the positive
// side of the bipartite subproblem, 0 the negative side, -1 is excluded.
struct CodingMatrix {
  CodingScheme scheme = CodingScheme::binary;
  int num_ratings = 2;  // L
  int columns = 1;      // k
  std::vector<std::int8_t> entries;           // row-major L x k
  std::vector<std::pair<int, int>> pairs;     // lpc only: (low, high) per column

  std::int8_t at(int rating, int column) const {
    return entries[static_cast<std::size_t>(rating) * columns + column];
  }
};

// binary:        k = L-1, column c has +1 for ratings > c, 0 otherwise.
// ternary_upper: k = L-1, column c pivots on rating c+1 (+1), ratings below
//                are 0, above are excluded.
// ternary_lower: k = L-1, column c pivots on rating c (0), ratings above are
//                +1, below are excluded (mirror of ternary_upper).
// lpc:           k = L(L-1)/2, one column per rating pair (a, b), a < b,
//                lexicographic; row b is +1, row a is 0, the rest excluded.
CodingMatrix build_coding_matrix(int num_ratings, CodingScheme scheme);

struct ColumnSplit {
  std::vector<const Instance*> pos;
  std::vector<const Instance*> neg;

  bool degenerate() const { return pos.empty() || neg.empty(); }
};

// Materializes one column's bipartite subproblem, preserving dataset order
// within each side. An empty side signals a degenerate column; the ensemble
// skips it with zero weight.
ColumnSplit column_dataset(const Dataset& d, const CodingMatrix& m, int column);

// One row per rating, entries space-separated from {-1, 0, 1}.
void print_coding_matrix(const CodingMatrix& m, std::ostream& out);

}  // namespace multirank
