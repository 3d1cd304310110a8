#include "multirank/coding.hpp"

#include <ostream>

#include "multirank/errors.hpp"

namespace multirank {

std::string coding_scheme_name(CodingScheme s) {
  switch (s) {
    case CodingScheme::binary: return "binary";
    case CodingScheme::ternary_upper: return "ternary-upper";
    case CodingScheme::ternary_lower: return "ternary-lower";
    case CodingScheme::lpc: return "lpc";
  }
  throw InternalError("unreachable coding scheme");
}

CodingScheme coding_scheme_from_name(const std::string& name) {
  if (name == "binary") return CodingScheme::binary;
  if (name == "ternary-upper") return CodingScheme::ternary_upper;
  if (name == "ternary-lower") return CodingScheme::ternary_lower;
  if (name == "lpc") return CodingScheme::lpc;
  throw UsageError("unknown coding scheme '" + name + "'");
}

namespace {

void verify_matrix(const CodingMatrix& m) {
  for (int c = 0; c < m.columns; ++c) {
    bool has_pos = false, has_neg = false;
    for (int l = 0; l < m.num_ratings; ++l) {
      std::int8_t e = m.at(l, c);
      if (e == 1) has_pos = true;
      if (e == 0) has_neg = true;
      if (e == -1 && m.scheme == CodingScheme::binary) {
        throw InternalError("binary coding produced a -1 entry");
      }
    }
    if (!has_pos || !has_neg) {
      throw InternalError("coding column " + std::to_string(c) + " lacks a positive or negative row");
    }
  }
}

}  // namespace

CodingMatrix build_coding_matrix(int num_ratings, CodingScheme scheme) {
  if (num_ratings < 2) throw UsageError("coding needs at least 2 ratings");

  CodingMatrix m;
  m.scheme = scheme;
  m.num_ratings = num_ratings;
  const int L = num_ratings;

  if (scheme == CodingScheme::lpc) {
    m.columns = L * (L - 1) / 2;
    m.entries.assign(static_cast<std::size_t>(L) * m.columns, -1);
    for (int a = 0; a < L; ++a) {
      for (int b = a + 1; b < L; ++b) {
        int c = static_cast<int>(m.pairs.size());
        m.pairs.emplace_back(a, b);
        m.entries[static_cast<std::size_t>(b) * m.columns + c] = 1;
        m.entries[static_cast<std::size_t>(a) * m.columns + c] = 0;
      }
    }
  } else {
    m.columns = L - 1;
    m.entries.assign(static_cast<std::size_t>(L) * m.columns, 0);
    for (int l = 0; l < L; ++l) {
      for (int c = 0; c < m.columns; ++c) {
        std::int8_t e = 0;
        switch (scheme) {
          case CodingScheme::binary:
            // u_lj = 1 iff j <= l with columns j = 1..L-1
            e = (c + 1 <= l) ? 1 : 0;
            break;
          case CodingScheme::ternary_upper: {
            int pivot = c + 1;
            e = (l < pivot) ? 0 : (l == pivot ? 1 : -1);
            break;
          }
          case CodingScheme::ternary_lower: {
            int pivot = c;
            e = (l < pivot) ? -1 : (l == pivot ? 0 : 1);
            break;
          }
          case CodingScheme::lpc:
            break;  // handled above
        }
        m.entries[static_cast<std::size_t>(l) * m.columns + c] = e;
      }
    }
  }

  verify_matrix(m);
  return m;
}

ColumnSplit column_dataset(const Dataset& d, const CodingMatrix& m, int column) {
  if (column < 0 || column >= m.columns) {
    throw UsageError("column " + std::to_string(column) + " outside [0, " +
                     std::to_string(m.columns) + ")");
  }
  ColumnSplit split;
  for (const Instance& inst : d.instances) {
    if (inst.rating < 0 || inst.rating >= m.num_ratings) {
      throw DataError("instance rating " + std::to_string(inst.rating) +
                      " outside the coding matrix's range");
    }
    std::int8_t e = m.at(inst.rating, column);
    if (e == 1) {
      split.pos.push_back(&inst);
    } else if (e == 0) {
      split.neg.push_back(&inst);
    }
  }
  return split;
}

void print_coding_matrix(const CodingMatrix& m, std::ostream& out) {
  for (int l = 0; l < m.num_ratings; ++l) {
    for (int c = 0; c < m.columns; ++c) {
      if (c > 0) out << ' ';
      out << static_cast<int>(m.at(l, c));
    }
    out << '\n';
  }
}

}  // namespace multirank
