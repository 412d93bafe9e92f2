#include "dgc/shells/mesh.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dgc {

MeshTopology::MeshTopology(int vertex_count, std::vector<std::array<int, 3>> triangles)
    : n_(vertex_count), triangles_(std::move(triangles)) {
  if (n_ < 3) throw InvalidArgument("a mesh needs at least three vertices");
  if (triangles_.empty()) throw InvalidArgument("a mesh needs at least one triangle");
  // directed edge -> (triangle, opposite vertex)
  std::map<std::pair<int, int>, std::pair<int, int>> directed;
  for (size_t t = 0; t < triangles_.size(); ++t) {
    const auto& tri = triangles_[t];
    for (int a = 0; a < 3; ++a) {
      if (tri[a] < 0 || tri[a] >= n_) {
        throw InvalidArgument("triangle " + std::to_string(t) + " has vertex index " + std::to_string(tri[a]) +
                              " outside [0, " + std::to_string(n_) + ")");
      }
    }
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
      throw InvalidArgument("triangle " + std::to_string(t) + " repeats a vertex");
    }
    for (int a = 0; a < 3; ++a) {
      const std::pair<int, int> e{tri[a], tri[(a + 1) % 3]};
      if (!directed.emplace(e, std::make_pair(static_cast<int>(t), tri[(a + 2) % 3])).second) {
        throw InvalidArgument("edge (" + std::to_string(e.first) + ", " + std::to_string(e.second) +
                              ") is used twice in the same direction: non-manifold or inconsistently oriented");
      }
    }
  }
  for (const auto& [e, info] : directed) {
    const auto twin = directed.find({e.second, e.first});
    if (twin == directed.end()) {
      boundary_.push_back({e.first, e.second});
    } else if (e.first < e.second) {
      InteriorEdge ie;
      ie.i = e.first;
      ie.j = e.second;
      ie.t = info.first;
      ie.k = info.second;
      ie.t_opp = twin->second.first;
      ie.l = twin->second.second;
      interior_.push_back(ie);
    }
  }
}

std::vector<int> MeshTopology::boundary_vertices() const {
  std::set<int> s;
  for (const auto& e : boundary_) {
    s.insert(e[0]);
    s.insert(e[1]);
  }
  return {s.begin(), s.end()};
}

MeshTopology MeshTopology::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_) throw InvalidArgument("permutation has the wrong length");
  auto tris = triangles_;
  for (auto& t : tris) {
    for (int& v : t) v = perm[static_cast<size_t>(v)];
  }
  return MeshTopology(n_, std::move(tris));
}

DegenerateTriangleError::DegenerateTriangleError(int triangle, double area)
    : DomainError("triangle " + std::to_string(triangle) + " is degenerate (area " + std::to_string(area) + ")"),
      triangle_(triangle) {}

double dihedral_angle(const Eigen::Vector3d& xi, const Eigen::Vector3d& xj, const Eigen::Vector3d& xk,
                      const Eigen::Vector3d& xl) {
  const Eigen::Vector3d e = xj - xi;
  const Eigen::Vector3d n1 = e.cross(xk - xi);
  const Eigen::Vector3d n2 = (xi - xj).cross(xl - xj);
  return std::atan2(n1.cross(n2).dot(e) / e.norm(), n1.dot(n2));
}

ReferenceGeometry compute_reference_geometry(const MeshTopology& topology, const Vector& x) {
  require_dimension(x, 3 * topology.vertex_count(), "mesh positions");
  require_finite(x, "mesh positions");
  const auto& tris = topology.triangles();
  ReferenceGeometry r;
  r.areas.resize(static_cast<Eigen::Index>(tris.size()));
  r.first_forms.resize(tris.size());
  for (size_t t = 0; t < tris.size(); ++t) {
    const Eigen::Vector3d a = x.segment<3>(3 * tris[t][0]);
    const Eigen::Vector3d e1 = x.segment<3>(3 * tris[t][1]) - a;
    const Eigen::Vector3d e2 = x.segment<3>(3 * tris[t][2]) - a;
    Eigen::Matrix2d g;
    g << e1.dot(e1), e1.dot(e2), e1.dot(e2), e2.dot(e2);
    r.first_forms[t] = g;
    r.areas[static_cast<Eigen::Index>(t)] = 0.5 * e1.cross(e2).norm();
  }
  const double mean = r.areas.mean();
  for (Eigen::Index t = 0; t < r.areas.size(); ++t) {
    if (!(r.areas[t] > 1e-12 * mean) || !(mean > 0.0)) throw DegenerateTriangleError(static_cast<int>(t), r.areas[t]);
  }
  const auto& edges = topology.interior_edges();
  const Eigen::Index m = static_cast<Eigen::Index>(edges.size());
  r.edge_lengths.resize(m);
  r.dihedral_angles.resize(m);
  r.edge_weights.resize(m);
  for (Eigen::Index e = 0; e < m; ++e) {
    const auto& ie = edges[static_cast<size_t>(e)];
    const Eigen::Vector3d xi = x.segment<3>(3 * ie.i), xj = x.segment<3>(3 * ie.j);
    r.edge_lengths[e] = (xj - xi).norm();
    r.dihedral_angles[e] = dihedral_angle(xi, xj, x.segment<3>(3 * ie.k), x.segment<3>(3 * ie.l));
    r.edge_weights[e] = (r.areas[ie.t] + r.areas[ie.t_opp]) / 3.0;
  }
  return r;
}

ShellMesh::ShellMesh(std::shared_ptr<const MeshTopology> topology, Vector positions)
    : topology_(std::move(topology)), positions_(std::move(positions)) {
  if (!topology_) throw InvalidArgument("null mesh topology");
  reference_ = compute_reference_geometry(*topology_, positions_);
}

ShellMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open OBJ file '" + path + "'");
  std::vector<double> coords;
  std::vector<std::array<int, 3>> tris;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      double a, b, c;
      if (!(ls >> a >> b >> c)) throw InvalidArgument(path + ":" + std::to_string(lineno) + ": malformed vertex");
      coords.insert(coords.end(), {a, b, c});
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ls >> tok) idx.push_back(std::stoi(tok.substr(0, tok.find('/'))) - 1);
      if (idx.size() != 3) {
        throw InvalidArgument(path + ":" + std::to_string(lineno) + ": only triangular faces are supported");
      }
      tris.push_back({idx[0], idx[1], idx[2]});
    }
  }
  auto topo = std::make_shared<const MeshTopology>(static_cast<int>(coords.size() / 3), std::move(tris));
  return ShellMesh(topo, Eigen::Map<const Vector>(coords.data(), static_cast<Eigen::Index>(coords.size())));
}

std::string to_obj(const MeshTopology& topology, const Vector& x) {
  require_dimension(x, 3 * topology.vertex_count(), "mesh positions");
  std::string out;
  char buf[128];
  for (int v = 0; v < topology.vertex_count(); ++v) {
    std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", x[3 * v], x[3 * v + 1], x[3 * v + 2]);
    out += buf;
  }
  for (const auto& t : topology.triangles()) {
    std::snprintf(buf, sizeof buf, "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out += buf;
  }
  return out;
}

void write_obj(const std::string& path, const MeshTopology& topology, const Vector& positions) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write OBJ file '" + path + "'");
  out << to_obj(topology, positions);
}

}  // namespace dgc
