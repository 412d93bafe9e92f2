#pragma once

#include "dgc/common.hpp"

#include <vector>

namespace dgc::detail {

// Appends scale * M (or its transpose) at offset (r0, c0).
inline void add_block(std::vector<Triplet>& out, const SparseMatrix& m, Eigen::Index r0, Eigen::Index c0,
                      bool transpose = false, double scale = 1.0) {
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      if (transpose) {
        out.emplace_back(r0 + it.col(), c0 + it.row(), scale * it.value());
      } else {
        out.emplace_back(r0 + it.row(), c0 + it.col(), scale * it.value());
      }
    }
  }
}

inline SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace dgc::detail
