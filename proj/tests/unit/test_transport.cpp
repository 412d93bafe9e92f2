#include "dgc/experiments/oracle.hpp"
#include "dgc/transport.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dgc;

namespace {

Vector vec(double a, double b) { return (Vector(2) << a, b).finished(); }
Eigen::Vector2d v2(const Vector& x) { return Eigen::Vector2d(x[0], x[1]); }

std::shared_ptr<const EnergyModel> torus() { return make_embedded_model(torus_chart(std::sqrt(2.0), 1.0)); }

// Slope of log(err) against log(tau).
double slope(const std::vector<double>& tau, const std::vector<double>& err) {
  const double n = static_cast<double>(tau.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < tau.size(); ++i) {
    const double x = std::log10(tau[i]), y = std::log10(err[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("flat transport is the identity") {
  auto flat = make_flat_model(2);
  const Point y = vec(0.3, -0.2);
  const Tangent v = vec(0.5, 1.0), w = vec(-0.7, 0.2);
  CHECK((transport_step(*flat, y, v, w) - w).norm() < 1e-14);
  CHECK(transport_step(*flat, y, v, Tangent::Zero(2)).norm() < 1e-14);
  CHECK((inverse_transport(*flat, y, v, w) - w).norm() < 1e-14);
  CHECK((transport_polygonal(*flat, {y, vec(1, 1), vec(-1, 2)}, w, 3) - w).norm() < 1e-13);
  const DenseMatrix A = (DenseMatrix(2, 2) << 1, 2, -0.5, 3).finished();
  VectorField lin = [&](const Point& p) { return Tangent(A * p); };
  VectorField cst = [](const Point&) { return vec(1, -1); };
  CHECK((cov_quotient_one_sided(*flat, y, v, lin, 0.01) - A * v).norm() < 1e-10);
  CHECK((cov_quotient_one_sided(*flat, y, v, lin, -0.01) - A * v).norm() < 1e-10);
  CHECK((cov_quotient_central(*flat, y, v, lin, 0.01) - A * v).norm() < 1e-10);
  CHECK(cov_quotient_central(*flat, y, v, cst, 0.01).norm() < 1e-10);
  CHECK_THROWS_AS(cov_quotient_central(*flat, y, v, cst, -0.01), InvalidArgument);
  CHECK_THROWS_AS(cov_quotient_one_sided(*flat, y, v, cst, 1e-5), InvalidArgument);
  QuotientOptions no_floor;
  no_floor.tau_floor = 0.0;
  CHECK_NOTHROW(cov_quotient_one_sided(*flat, y, v, cst, 1e-5, no_floor));
}

TEST_CASE("forward and inverse transport round trip") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> U(-1, 1);
  auto m = torus();
  auto s = make_embedded_model(sphere_chart());
  for (int i = 0; i < 20; ++i) {
    const Point y = vec(1.5 + U(rng), U(rng));
    const Tangent v = 0.05 * vec(U(rng), U(rng)), w = 0.05 * vec(U(rng), U(rng));
    for (const auto* model : {m.get(), s.get()}) {
      const Tangent pw = transport_step(*model, y, v, w);
      CHECK((inverse_transport(*model, y, v, pw) - w).norm() < 1e-11);
    }
  }
  const auto step = schild_step(*m, vec(0.2, 0.3), vec(0.05, 0.0), vec(0.0, 0.04));
  CHECK(step.midpoint_report.converged);
  CHECK(step.extension_report.converged);
  CHECK((step.opposite - (step.base + step.direction) - step.result).norm() == 0.0);
}

TEST_CASE("transport is nonlinear only at second order") {
  auto m = torus();
  const Point y = vec(0.1, 0.7);
  const Tangent v = vec(0.05, 0.02);
  double prev = 0.0;
  for (double s : {1e-1, 5e-2}) {
    const Tangent w1 = s * vec(1, 0.3), w2 = s * vec(-0.4, 1);
    const double defect = (transport_step(*m, y, v, w1 + w2) - transport_step(*m, y, v, w1) -
                           transport_step(*m, y, v, w2) + transport_step(*m, y, v, Tangent::Zero(2)))
                              .norm();
    if (prev > 0.0) CHECK(prev / defect == doctest::Approx(4.0).epsilon(0.15));
    prev = defect;
  }
}

TEST_CASE("torus transport agrees with the transport ODE") {
  auto m = torus();
  const AnalyticOracle o = torus_oracle(std::sqrt(2.0), 1.0);
  CHECK(o.self_test().empty());
  const Point y = vec(0.0, 0.5);
  std::vector<double> taus, errs;
  for (double h : {4e-2, 2e-2, 1e-2}) {
    const Tangent v = vec(h, 0.0), w = vec(0.0, h);
    const Tangent pw = transport_step(*m, y, v, w);
    const Eigen::Vector2d exact = o.transport({v2(y), v2(y + v)}, v2(w), 200);
    const double err = (v2(pw) - exact).norm();
    // O(|v|^2) relative to |w|: absolute error O(h^3).
    CHECK(err < 10.0 * h * h * h);
    taus.push_back(h);
    errs.push_back(err);
  }
  CHECK(slope(taus, errs) > 2.7);
}

TEST_CASE("latitude loop holonomy on the sphere") {
  auto m = make_embedded_model(sphere_chart());
  const AnalyticOracle o = sphere_oracle();
  const double alpha = 1.2;
  const std::vector<Point> loop{vec(alpha, 0.0), vec(alpha, 2 * M_PI)};
  const Tangent w0 = vec(1.0, 0.0);
  // Orthonormal frame (e_theta, e_phi / sin theta).
  auto angle = [&](const Tangent& w) { return std::atan2(w[1] * std::sin(alpha), w[0]); };
  const double expected = std::remainder(-2 * M_PI * std::cos(alpha), 2 * M_PI);
  const Eigen::Vector2d ode = o.transport({v2(loop[0]), v2(loop[1])}, v2(w0), 4000);
  CHECK(std::abs(std::remainder(angle(vec(ode[0], ode[1])) - expected, 2 * M_PI)) < 1e-8);
  double prev = 0.0;
  for (int n : {32, 64, 128}) {
    const Tangent w = transport_polygonal(*m, loop, w0, n);
    const double err = std::abs(std::remainder(angle(w) - expected, 2 * M_PI));
    CHECK(err < 2.0 / n);
    if (prev > 0.0) CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("polygonal transport matches the ODE along a chart triangle") {
  auto m = make_embedded_model(sphere_chart());
  const AnalyticOracle o = sphere_oracle();
  const std::vector<Point> tri{vec(1.0, 0.0), vec(1.4, 0.3), vec(1.1, 0.6), vec(1.0, 0.0)};
  const Tangent w0 = vec(0.3, 0.8);
  const Eigen::Vector2d exact = o.transport({v2(tri[0]), v2(tri[1]), v2(tri[2]), v2(tri[3])}, v2(w0), 400);
  const double e1 = (v2(transport_polygonal(*m, tri, w0, 16)) - exact).norm();
  const double e2 = (v2(transport_polygonal(*m, tri, w0, 32)) - exact).norm();
  CHECK(e2 < e1);
  CHECK(e2 < 0.02);
  // A single leg with one substep is one ladder step.
  CHECK((transport_polygonal(*m, {tri[0], tri[1]}, w0, 1) - transport_step(*m, tri[0], tri[1] - tri[0], w0)).norm() ==
        0.0);
}

TEST_CASE("covariant quotients converge to the Christoffel oracle") {
  auto m = torus();
  const AnalyticOracle o = torus_oracle(std::sqrt(2.0), 1.0);
  const Point y = vec(0.3, 0.8);
  const Tangent v = vec(1.0, 0.5), z = vec(-0.2, 1.0);
  VectorField cst = [&](const Point&) { return z; };
  const Eigen::Vector2d exact = o.gamma(v2(y), v2(v), v2(z));
  std::vector<double> taus, e1, e2;
  for (double tau : {1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3}) {
    taus.push_back(tau);
    e1.push_back((v2(cov_quotient_one_sided(*m, y, v, cst, tau)) - exact).norm());
    e2.push_back((v2(cov_quotient_central(*m, y, v, cst, tau)) - exact).norm());
  }
  CHECK(slope(taus, e1) == doctest::Approx(1.0).epsilon(0.2));
  CHECK(slope(taus, e2) == doctest::Approx(2.0).epsilon(0.1));
}
