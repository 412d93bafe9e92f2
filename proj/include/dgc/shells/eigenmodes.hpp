#pragma once

#include "dgc/shells/shell_model.hpp"

#include <vector>

namespace dgc {

struct Eigenmode {
  double eigenvalue = 0.0;
  Tangent vector;  // Euclidean length sqrt(n), n = vertex count
};

/// The k smallest eigenpairs of hess22(s, s) restricted to the complement of
/// the model's gauge basis at s, in ascending order. Dense solve; intended
/// for meshes up to a few thousand vertices.
std::vector<Eigenmode> hessian_eigenmodes(const ShellModel& model, const Point& s, int k);

std::vector<Eigenmode> hessian_eigenmodes(const ShellMesh& s, const ShellParams& params, const GaugeSpec& gauge,
                                          int k);

}  // namespace dgc
