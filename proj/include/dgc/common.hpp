#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <stdexcept>
#include <string>

namespace dgc {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

// A point of the shape space in chart coordinates (or stacked vertex positions).
using Point = Vector;
// A tangent vector; its base point is implied by the call site.
using Tangent = Vector;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A point left the region where the energy model is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Invalid arguments (bad step sizes, degenerate planes, malformed meshes, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

void require_dimension(const Vector& x, Eigen::Index d, const char* what);
void require_finite(const Vector& x, const char* what);

/// Dense copy of a sparse matrix.
DenseMatrix to_dense(const SparseMatrix& m);

}  // namespace dgc
