#include "dgc/experiments/oracle.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dgc {

AnalyticOracle::AnalyticOracle(std::string surface, std::function<Mat2(const Vec2&)> metric,
                               std::function<std::array<Mat2, 2>(const Vec2&)> metric_derivative,
                               std::function<double(const Vec2&)> gaussian_curvature)
    : surface_(std::move(surface)),
      metric_(std::move(metric)),
      dmetric_(std::move(metric_derivative)),
      curvature_(std::move(gaussian_curvature)) {}

std::array<AnalyticOracle::Mat2, 2> AnalyticOracle::christoffel(const Vec2& p) const {
  const Mat2 ginv = metric_(p).inverse();
  const auto dg = dmetric_(p);  // dg[l](i, j) = d_l g_ij
  std::array<Mat2, 2> out;
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l) s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        out[k](i, j) = 0.5 * s;
      }
    }
  }
  return out;
}

AnalyticOracle::Vec2 AnalyticOracle::gamma(const Vec2& p, const Vec2& v, const Vec2& z) const {
  const auto g = christoffel(p);
  return Vec2(v.dot(g[0] * z), v.dot(g[1] * z));
}

AnalyticOracle::Vec2 AnalyticOracle::covariant_derivative(const Vec2& p, const Vec2& v, const Vec2& z,
                                                          const Vec2& dz_v) const {
  return dz_v + gamma(p, v, z);
}

AnalyticOracle::Vec2 AnalyticOracle::curvature_vector(const Vec2& p, const Vec2& v, const Vec2& w) const {
  const Mat2 g = metric_(p);
  return curvature_(p) * (w.dot(g * w) * v - v.dot(g * w) * w);
}

AnalyticOracle::Vec2 AnalyticOracle::transport(const std::vector<Vec2>& polygon, const Vec2& w0,
                                               int steps_per_leg) const {
  Vec2 w = w0;
  for (size_t leg = 0; leg + 1 < polygon.size(); ++leg) {
    const Vec2 a = polygon[leg];
    const Vec2 dx = polygon[leg + 1] - a;
    const double h = 1.0 / steps_per_leg;
    // dw/dt = -Gamma(x', w) along x(t) = a + t dx.
    auto rhs = [&](double t, const Vec2& ww) -> Vec2 { return -gamma(Vec2(a + t * dx), dx, ww); };
    for (int s = 0; s < steps_per_leg; ++s) {
      const double t = s * h;
      const Vec2 k1 = rhs(t, w);
      const Vec2 k2 = rhs(t + 0.5 * h, w + 0.5 * h * k1);
      const Vec2 k3 = rhs(t + 0.5 * h, w + 0.5 * h * k2);
      const Vec2 k4 = rhs(t + h, w + h * k3);
      w += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
  }
  return w;
}

std::string AnalyticOracle::self_test() const {
  std::ostringstream msg;
  const Vec2 samples[] = {Vec2(0.3, 0.7), Vec2(1.1, -0.4), Vec2(2.0, 2.5)};
  const double h = 1e-5;
  for (const Vec2& p : samples) {
    const auto dg = dmetric_(p);
    for (int l = 0; l < 2; ++l) {
      Vec2 e = Vec2::Zero();
      e[l] = h;
      const Mat2 fd = (metric_(p + e) - metric_(p - e)) / (2.0 * h);
      if ((fd - dg[l]).norm() > 1e-6 * (1.0 + dg[l].norm())) {
        msg << surface_ << ": metric derivative mismatch at (" << p.transpose() << ")";
        return msg.str();
      }
    }
    // Orthogonal-metric curvature formula from finite differences of the metric.
    const double hk = 1e-4;
    auto EG = [&](const Vec2& q) { return metric_(q); };
    auto term = [&](int dir) {
      // d_dir( d_dir(g_other) / sqrt(E G) ), other = index not equal to dir
      const int other = 1 - dir;
      Vec2 e = Vec2::Zero();
      e[dir] = hk;
      auto inner = [&](const Vec2& q) {
        const double dgo = (EG(q + e)(other, other) - EG(q - e)(other, other)) / (2.0 * hk);
        const Mat2 g = EG(q);
        return dgo / std::sqrt(g(0, 0) * g(1, 1));
      };
      return (inner(p + e) - inner(p - e)) / (2.0 * hk);
    };
    const Mat2 g = EG(p);
    const double k_fd = -(term(0) + term(1)) / (2.0 * std::sqrt(g(0, 0) * g(1, 1)));
    if (std::abs(k_fd - curvature_(p)) > 1e-5 * (1.0 + std::abs(k_fd))) {
      msg << surface_ << ": Gaussian curvature " << curvature_(p) << " disagrees with metric-derived " << k_fd;
      return msg.str();
    }
  }
  return {};
}

AnalyticOracle torus_oracle(double R, double r) {
  auto metric = [R, r](const AnalyticOracle::Vec2& p) {
    const double rho = R + r * std::cos(p[1]);
    AnalyticOracle::Mat2 g;
    g << rho * rho, 0.0, 0.0, r * r;
    return g;
  };
  auto dmetric = [R, r](const AnalyticOracle::Vec2& p) {
    const double rho = R + r * std::cos(p[1]);
    std::array<AnalyticOracle::Mat2, 2> d;
    d[0].setZero();
    d[1] << -2.0 * r * std::sin(p[1]) * rho, 0.0, 0.0, 0.0;
    return d;
  };
  auto K = [R, r](const AnalyticOracle::Vec2& p) {
    const double cv = std::cos(p[1]);
    return cv / (r * (R + r * cv));
  };
  AnalyticOracle o("torus", metric, dmetric, K);
  if (std::abs(o.gaussian_curvature(AnalyticOracle::Vec2(0.0, 0.0)) - 1.0 / (r * (R + r))) > 1e-14) {
    throw std::logic_error("torus oracle: outer-equator curvature");
  }
  return o;
}

AnalyticOracle sphere_oracle() {
  auto metric = [](const AnalyticOracle::Vec2& p) {
    const double s = std::sin(p[0]);
    AnalyticOracle::Mat2 g;
    g << 1.0, 0.0, 0.0, s * s;
    return g;
  };
  auto dmetric = [](const AnalyticOracle::Vec2& p) {
    std::array<AnalyticOracle::Mat2, 2> d;
    d[0] << 0.0, 0.0, 0.0, 2.0 * std::sin(p[0]) * std::cos(p[0]);
    d[1].setZero();
    return d;
  };
  auto K = [](const AnalyticOracle::Vec2&) { return 1.0; };
  return AnalyticOracle("sphere", metric, dmetric, K);
}

}  // namespace dgc
