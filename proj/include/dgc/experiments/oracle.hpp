#pragma once

#include <Eigen/Dense>

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace dgc {

/// Closed-form geometry of a parameterized surface, used as ground truth.
///
/// Christoffel symbols follow from the metric and its coordinate derivatives:
/// gamma[k](i, j) = Gamma^k_ij.
class AnalyticOracle {
 public:
  using Vec2 = Eigen::Vector2d;
  using Mat2 = Eigen::Matrix2d;

  AnalyticOracle(std::string surface, std::function<Mat2(const Vec2&)> metric,
                 std::function<std::array<Mat2, 2>(const Vec2&)> metric_derivative,
                 std::function<double(const Vec2&)> gaussian_curvature);

  const std::string& surface() const { return surface_; }
  Mat2 metric(const Vec2& p) const { return metric_(p); }
  double gaussian_curvature(const Vec2& p) const { return curvature_(p); }
  std::array<Mat2, 2> christoffel(const Vec2& p) const;

  /// Gamma(v, z)^k = Gamma^k_ij v^i z^j.
  Vec2 gamma(const Vec2& p, const Vec2& v, const Vec2& z) const;

  /// Covariant derivative of a field Z along v at p, given its coordinate derivative dZ(v).
  Vec2 covariant_derivative(const Vec2& p, const Vec2& v, const Vec2& z, const Vec2& dz_v) const;

  /// R(v,w)w = K (g(w,w) v - g(v,w) w) for a surface.
  Vec2 curvature_vector(const Vec2& p, const Vec2& v, const Vec2& w) const;

  /// Parallel transport of w0 along the straight chart segments of `polygon`,
  /// classical RK4 with `steps_per_leg` steps on each segment.
  Vec2 transport(const std::vector<Vec2>& polygon, const Vec2& w0, int steps_per_leg) const;

  /// Compares Christoffel symbols against finite differences of the metric and
  /// checks a surface-specific closed form. Returns an empty string on success.
  std::string self_test() const;

 private:
  std::string surface_;
  std::function<Mat2(const Vec2&)> metric_;
  std::function<std::array<Mat2, 2>(const Vec2&)> dmetric_;
  std::function<double(const Vec2&)> curvature_;
};

/// Torus with Phi = ((R + r cos v) cos u, (R + r cos v) sin u, r sin v).
AnalyticOracle torus_oracle(double R, double r);

/// Unit sphere in (colatitude, longitude).
AnalyticOracle sphere_oracle();

}  // namespace dgc
