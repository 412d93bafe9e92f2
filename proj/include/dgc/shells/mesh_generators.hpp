#pragma once

#include "dgc/shells/mesh.hpp"

#include <vector>

namespace dgc {

/// Subdivided icosahedron with all vertices on the unit sphere:
/// 10 * 4^level + 2 vertices, outward orientation.
ShellMesh make_sphere_shell(int level);

/// Plate [-1, 1] x [-1/2, 1/2] on a (2 resolution) x resolution grid whose
/// cells are all split along the same diagonal (the triangulation is
/// invariant under the half-turn about the z axis). Bumps of height zeta and
/// eta sit at x = -1/2 and x = +1/2.
ShellMesh make_bump_plate(int resolution, double zeta, double eta);

/// d positions / d zeta (which = 0) or d eta (which = 1) for make_bump_plate.
Vector bump_direction(int resolution, int which);

/// Radial bump profile (1 - (rho/rho0)^2)^2 for rho < rho0, rho0 = 0.35.
double bump_profile(double rho);

/// Flat square [0, 1]^2 sheet with n x n cells in the z = 0 plane.
ShellMesh make_flat_sheet(int n);

/// Procedural stand-in for a branched organic shape: an icosphere of the given
/// level pushed out radially into a body with three upward arms.
ShellMesh make_three_branch_shape(int level);

/// Vertices of make_three_branch_shape forming the foot (lowest cap).
std::vector<int> three_branch_foot(const ShellMesh& mesh);

/// Per-vertex displacement (a x, 0, 0) or (0, a y, 0) of a stretch by 1 + a
/// along axis 0 or 1.
Vector stretch_direction(const ShellMesh& mesh, int axis, double a = 0.5);

}  // namespace dgc
