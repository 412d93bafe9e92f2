#include "dgc/shells/mesh_generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dgc {

ShellMesh make_sphere_shell(int level) {
  if (level < 0) throw InvalidArgument("subdivision level must be non-negative");
  const double p = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::Vector3d> v = {{-1, p, 0}, {1, p, 0},  {-1, -p, 0}, {1, -p, 0}, {0, -1, p},  {0, 1, p},
                                    {0, -1, -p}, {0, 1, -p}, {p, 0, -1},  {p, 0, 1},  {-p, 0, -1}, {-p, 0, 1}};
  std::vector<std::array<int, 3>> f = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                                       {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                                       {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                                       {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (auto& x : v) x.normalize();
  for (int s = 0; s < level; ++s) {
    std::map<std::pair<int, int>, int> mid;
    auto midpoint = [&](int a, int b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      v.push_back((v[static_cast<size_t>(a)] + v[static_cast<size_t>(b)]).normalized());
      const int id = static_cast<int>(v.size()) - 1;
      mid.emplace(key, id);
      return id;
    };
    std::vector<std::array<int, 3>> g;
    g.reserve(4 * f.size());
    for (const auto& t : f) {
      const int a = midpoint(t[0], t[1]), b = midpoint(t[1], t[2]), c = midpoint(t[2], t[0]);
      g.push_back({t[0], a, c});
      g.push_back({t[1], b, a});
      g.push_back({t[2], c, b});
      g.push_back({a, b, c});
    }
    f = std::move(g);
  }
  Vector x(3 * static_cast<Eigen::Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) x.segment<3>(3 * static_cast<Eigen::Index>(i)) = v[i];
  return ShellMesh(std::make_shared<const MeshTopology>(static_cast<int>(v.size()), std::move(f)), x);
}

namespace {

// Grid of (nx + 1) x (ny + 1) vertices, x fastest, each cell split along (i,j)-(i+1,j+1).
std::shared_ptr<const MeshTopology> grid_topology(int nx, int ny) {
  std::vector<std::array<int, 3>> f;
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return std::make_shared<const MeshTopology>((nx + 1) * (ny + 1), std::move(f));
}

constexpr double kBumpRadius = 0.35;

}  // namespace

double bump_profile(double rho) {
  if (rho >= kBumpRadius) return 0.0;
  const double s = 1.0 - (rho / kBumpRadius) * (rho / kBumpRadius);
  return s * s;
}

Vector bump_direction(int resolution, int which) {
  if (resolution < 4) throw InvalidArgument("plate resolution must be at least 4");
  if (which != 0 && which != 1) throw InvalidArgument("bump index must be 0 or 1");
  const int ny = resolution, nx = 2 * resolution;
  const double cx = which == 0 ? -0.5 : 0.5;
  Vector d = Vector::Zero(3 * (nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const double x = -1.0 + 2.0 * i / nx, y = -0.5 + static_cast<double>(j) / ny;
      d[3 * (j * (nx + 1) + i) + 2] = bump_profile(std::hypot(x - cx, y));
    }
  }
  return d;
}

ShellMesh make_bump_plate(int resolution, double zeta, double eta) {
  if (resolution < 4) throw InvalidArgument("plate resolution must be at least 4");
  const int ny = resolution, nx = 2 * resolution;
  Vector x(3 * (nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const int v = j * (nx + 1) + i;
      x[3 * v] = -1.0 + 2.0 * i / nx;
      x[3 * v + 1] = -0.5 + static_cast<double>(j) / ny;
      x[3 * v + 2] = 0.0;
    }
  }
  x += zeta * bump_direction(resolution, 0) + eta * bump_direction(resolution, 1);
  return ShellMesh(grid_topology(nx, ny), x);
}

ShellMesh make_flat_sheet(int n) {
  if (n < 1) throw InvalidArgument("sheet resolution must be positive");
  Vector x(3 * (n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      const int v = j * (n + 1) + i;
      x.segment<3>(3 * v) << static_cast<double>(i) / n, static_cast<double>(j) / n, 0.0;
    }
  }
  return ShellMesh(grid_topology(n, n), x);
}

namespace {

const std::array<Eigen::Vector3d, 3>& arm_directions() {
  static const std::array<Eigen::Vector3d, 3> d = {Eigen::Vector3d(0.0, 0.0, 1.0),
                                                   Eigen::Vector3d(-0.85, 0.0, 0.53).normalized(),
                                                   Eigen::Vector3d(0.85, 0.0, 0.53).normalized()};
  return d;
}

}  // namespace

ShellMesh make_three_branch_shape(int level) {
  const ShellMesh sphere = make_sphere_shell(level);
  Vector x = sphere.positions();
  for (int v = 0; v < sphere.vertex_count(); ++v) {
    const Eigen::Vector3d u = x.segment<3>(3 * v);
    double r = 0.7;
    const double lengths[3] = {1.3, 0.9, 0.9};
    for (int b = 0; b < 3; ++b) {
      const double angle = std::acos(std::clamp(u.dot(arm_directions()[static_cast<size_t>(b)]), -1.0, 1.0));
      r += lengths[b] * std::exp(-angle * angle / (2.0 * 0.3 * 0.3));
    }
    x.segment<3>(3 * v) = r * u;
  }
  return ShellMesh(sphere.topology_ptr(), x);
}

std::vector<int> three_branch_foot(const ShellMesh& mesh) {
  std::vector<int> out;
  double zmin = mesh.positions()[2];
  for (int v = 0; v < mesh.vertex_count(); ++v) zmin = std::min(zmin, mesh.positions()[3 * v + 2]);
  for (int v = 0; v < mesh.vertex_count(); ++v) {
    if (mesh.positions()[3 * v + 2] < zmin + 0.12) out.push_back(v);
  }
  return out;
}

Vector stretch_direction(const ShellMesh& mesh, int axis, double a) {
  if (axis < 0 || axis > 2) throw InvalidArgument("axis must be 0, 1 or 2");
  Vector d = Vector::Zero(mesh.positions().size());
  for (int v = 0; v < mesh.vertex_count(); ++v) d[3 * v + axis] = a * mesh.positions()[3 * v + axis];
  return d;
}

}  // namespace dgc
