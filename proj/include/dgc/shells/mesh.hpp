#pragma once

#include "dgc/common.hpp"

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace dgc {

/// Triangle t = (i, j, k) contains the directed edge i -> j with opposite
/// vertex k; its neighbor t_opp = (j, i, l) has opposite vertex l.
struct InteriorEdge {
  int i = 0, j = 0, k = 0, l = 0;
  int t = 0, t_opp = 0;
};

class MeshTopology {
 public:
  /// Throws InvalidArgument for out-of-range indices, repeated vertices in a
  /// triangle, non-manifold edges or inconsistent orientation.
  MeshTopology(int vertex_count, std::vector<std::array<int, 3>> triangles);

  int vertex_count() const { return n_; }
  const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
  const std::vector<InteriorEdge>& interior_edges() const { return interior_; }
  const std::vector<std::array<int, 2>>& boundary_edges() const { return boundary_; }
  std::vector<int> boundary_vertices() const;

  /// Relabels vertex v as perm[v].
  MeshTopology permuted(const std::vector<int>& perm) const;

 private:
  int n_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<InteriorEdge> interior_;
  std::vector<std::array<int, 2>> boundary_;
};

/// A deformed (or reference) triangle whose area fell below the threshold.
class DegenerateTriangleError : public DomainError {
 public:
  DegenerateTriangleError(int triangle, double area);
  int triangle() const { return triangle_; }

 private:
  int triangle_;
};

/// Signed dihedral angle at edge (xi, xj) between triangles (i,j,k) and (j,i,l).
double dihedral_angle(const Eigen::Vector3d& xi, const Eigen::Vector3d& xj, const Eigen::Vector3d& xk,
                      const Eigen::Vector3d& xl);

struct ReferenceGeometry {
  Vector areas;                              // a_t
  std::vector<Eigen::Matrix2d> first_forms;  // g_t in the edge basis (x_j - x_i, x_k - x_i)
  Vector edge_lengths;                       // l_e, interior edges
  Vector dihedral_angles;                    // theta_e
  Vector edge_weights;                       // d_e = (a_t + a_t') / 3
};

ReferenceGeometry compute_reference_geometry(const MeshTopology& topology, const Vector& positions);

class ShellMesh {
 public:
  ShellMesh(std::shared_ptr<const MeshTopology> topology, Vector positions);

  const MeshTopology& topology() const { return *topology_; }
  std::shared_ptr<const MeshTopology> topology_ptr() const { return topology_; }
  const Vector& positions() const { return positions_; }
  int vertex_count() const { return topology_->vertex_count(); }
  Eigen::Vector3d vertex(int v) const { return positions_.segment<3>(3 * v); }
  const ReferenceGeometry& reference() const { return reference_; }

 private:
  std::shared_ptr<const MeshTopology> topology_;
  Vector positions_;
  ReferenceGeometry reference_;
};

ShellMesh read_obj(const std::string& path);
std::string to_obj(const MeshTopology& topology, const Vector& positions);
void write_obj(const std::string& path, const MeshTopology& topology, const Vector& positions);

}  // namespace dgc
