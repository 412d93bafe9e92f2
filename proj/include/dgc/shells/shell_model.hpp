#pragma once

#include "dgc/energy_model.hpp"
#include "dgc/shells/mesh.hpp"

#include <memory>
#include <vector>

namespace dgc {

struct ShellParams {
  double mu_mem = 1.0;
  double lambda_mem = 1.0;
  double bending_weight = 1e-3;  // squared thickness

  void validate() const;
};

struct GaugeSpec {
  enum class Mode { none, fixed_vertices, project_rigid };
  Mode mode = Mode::project_rigid;
  std::vector<int> fixed;

  static GaugeSpec unconstrained() { return {Mode::none, {}}; }
  static GaugeSpec rigid() { return {Mode::project_rigid, {}}; }
  static GaugeSpec fixed_vertices(std::vector<int> v) { return {Mode::fixed_vertices, std::move(v)}; }
};

/// Membrane density (mu/2) tr A + (lambda/4) det A - (mu/2 + lambda/4) log det A - mu - lambda/4.
double membrane_density(const Eigen::Matrix2d& A, const ShellParams& params);

struct ShellEnergyParts {
  double membrane = 0.0;
  double bending = 0.0;  // already multiplied by the bending weight
  double total() const { return membrane + bending; }
};

/// Energy of the deformation reference -> deformed. Deformed triangles with
/// area below 1e-12 * (mean reference area) raise DegenerateTriangleError.
ShellEnergyParts shell_energy_parts(const ShellMesh& reference, const Vector& deformed, const ShellParams& params);
double shell_energy(const ShellMesh& reference, const Vector& deformed, const ShellParams& params);

/// Orthonormal basis (3n x 6) of the infinitesimal rigid motions of `positions`.
DenseMatrix rigid_modes(const Vector& positions);

/// W[s, s~] = E_s[s -> s~] over stacked vertex positions; both arguments are
/// free shapes sharing the topology of `base`. `base` fixes the metric scale
/// and the degeneracy threshold.
class ShellModel final : public EnergyModel {
 public:
  /// calibrate = false skips the Hessian evaluation behind metric_scale() (which then stays 1).
  ShellModel(const ShellMesh& base, ShellParams params, GaugeSpec gauge, bool calibrate = true);

  Eigen::Index dimension() const override { return 3 * static_cast<Eigen::Index>(topology_->vertex_count()); }
  std::string name() const override { return "shells"; }

  double energy(const Point& y, const Point& y_tilde) const override;
  ShellEnergyParts energy_parts(const Point& y, const Point& y_tilde) const;
  Vector grad1(const Point& y, const Point& y_tilde) const override;
  Vector grad2(const Point& y, const Point& y_tilde) const override;
  SparseMatrix hess11(const Point& y, const Point& y_tilde) const override;
  SparseMatrix hess12(const Point& y, const Point& y_tilde) const override;
  SparseMatrix hess22(const Point& y, const Point& y_tilde) const override;

  void check_domain(const Point& p) const override;
  SparseMatrix gauge_basis(const Point& p) const override;

  const MeshTopology& topology() const { return *topology_; }
  const ShellParams& params() const { return params_; }
  const GaugeSpec& gauge() const { return gauge_; }
  double area_floor() const { return area_floor_; }

  struct Result;

 private:
  Result evaluate(const Point& y, const Point& y_tilde, unsigned what) const;

  std::shared_ptr<const MeshTopology> topology_;
  ShellParams params_;
  GaugeSpec gauge_;
  double area_floor_;
};

std::shared_ptr<const ShellModel> make_shell_model(const ShellMesh& base, ShellParams params = {},
                                                   GaugeSpec gauge = GaugeSpec::rigid());

}  // namespace dgc
