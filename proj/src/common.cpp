#include "dgc/common.hpp"

#include <string>

namespace dgc {

void require_dimension(const Vector& x, Eigen::Index d, const char* what) {
  if (x.size() != d) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(d) + ", got " +
                         std::to_string(x.size()));
  }
}

void require_finite(const Vector& x, const char* what) {
  if (!x.allFinite()) throw InvalidArgument(std::string(what) + ": non-finite entries");
}

DenseMatrix to_dense(const SparseMatrix& m) { return DenseMatrix(m); }

}  // namespace dgc
