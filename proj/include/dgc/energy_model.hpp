#pragma once

#include "dgc/common.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace dgc {

/// Deformation energy W : M x M -> R together with its partial derivatives.
///
/// W approximates the squared Riemannian distance to third order. Argument 1 is
/// the reference point y, argument 2 the deformed point y~. Hessian blocks use
/// the convention hess12(y, y~)(i, j) = d^2 W / dy_i dy~_j, so that
/// W_{,21} is the transpose of hess12.
///
/// Implementations must be pure functions of their arguments after
/// construction; instances may be shared between threads.
class EnergyModel {
 public:
  virtual ~EnergyModel() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual std::string name() const = 0;

  virtual double energy(const Point& y, const Point& y_tilde) const = 0;
  virtual Vector grad1(const Point& y, const Point& y_tilde) const = 0;
  virtual Vector grad2(const Point& y, const Point& y_tilde) const = 0;

  // Defaults use central differences of the analytic gradients.
  virtual SparseMatrix hess11(const Point& y, const Point& y_tilde) const;
  virtual SparseMatrix hess12(const Point& y, const Point& y_tilde) const;
  virtual SparseMatrix hess22(const Point& y, const Point& y_tilde) const;

  /// Throws DomainError if p lies outside the validity region.
  virtual void check_domain(const Point& p) const;

  /// Columns span the directions along which an unknown point near p is pinned
  /// (rigid modes, fixed vertices). Zero columns for models without a gauge.
  virtual SparseMatrix gauge_basis(const Point& p) const;

  /// Characteristic energy magnitude used to make tolerances dimensionless.
  double metric_scale() const { return metric_scale_; }

 protected:
  /// metric_scale := trace(hess22(base, base)) / d.
  void calibrate_metric_scale(const Point& base);

  /// Coordinate scale used for finite-difference Hessian fallbacks.
  double fd_coordinate_scale_ = 1.0;

 private:
  double metric_scale_ = 1.0;
};

/// Riemannian metric at a base point, g_y(v, w) = 1/2 v^T W_{,22}[y, y] w.
struct MetricOperator {
  SparseMatrix matrix;  // already includes the factor 1/2

  double operator()(const Tangent& v, const Tangent& w) const { return v.dot(matrix * w); }
};

MetricOperator metric_operator(const EnergyModel& model, const Point& y);

double metric_eval(const EnergyModel& model, const Point& y, const Tangent& v, const Tangent& w);

struct IdentityReport {
  double energy_on_diagonal = 0.0;       // |W(y,y)| / scale
  double grad1_on_diagonal = 0.0;        // |W_{,1}(y,y)| / scale
  double grad2_on_diagonal = 0.0;        // |W_{,2}(y,y)| / scale
  double hess11_plus_hess12 = 0.0;       // max |W_{,11}+W_{,12}|(v,w) / (scale |v||w|)
  double hess11_minus_hess22 = 0.0;      // max |W_{,11}-W_{,22}|(v,w) / (scale |v||w|)
  double hess12_symmetry = 0.0;          // max |W_{,12}(v,w) - W_{,21}(v,w)| / (scale |v||w|)
  double third_order = 0.0;              // spread of the four diagonal derivatives of the Hessians

  double max_deviation() const;
};

struct TangentPair {
  Tangent v;
  Tangent w;
};

/// Evaluates the consistency identities W(y,y)=0, W_{,1}=W_{,2}=0 and
/// W_{,11} = -W_{,12} = -W_{,21} = W_{,22} on the diagonal, plus their
/// derivative along the diagonal (central differences of the Hessians, step fd_step).
IdentityReport check_consistency_identities(const EnergyModel& model, const Point& y,
                                            const std::vector<TangentPair>& samples,
                                            double fd_step = 1e-5);

/// W(y, y~) = |y - y~|^2 on R^d with exact derivatives.
std::shared_ptr<const EnergyModel> make_flat_model(Eigen::Index d);

/// Parameterization Phi : R^2 -> R^3 with analytic first and second derivatives.
struct Chart {
  struct Eval {
    Eigen::Vector3d x;
    Eigen::Matrix<double, 3, 2> jacobian;
    // second[k] = d^2 Phi_k / du_a du_b
    std::array<Eigen::Matrix2d, 3> second;
  };

  std::string name;
  std::function<Eval(const Eigen::Vector2d&)> evaluate;
  Eigen::Vector2d lower;  // validity box
  Eigen::Vector2d upper;
};

/// Torus of center-line radius R and tube radius r, coordinates (u, v) =
/// (toroidal, poloidal): Phi = ((R + r cos v) cos u, (R + r cos v) sin u, r sin v).
Chart torus_chart(double R, double r);

/// Unit sphere in coordinates (theta, phi) = (colatitude, longitude); the box
/// keeps theta at least pole_margin away from the poles.
Chart sphere_chart(double pole_margin = 1e-2);

/// W(y, y~) = |Phi(y) - Phi(y~)|^2 in the embedding space.
std::shared_ptr<const EnergyModel> make_embedded_model(Chart chart);

}  // namespace dgc
