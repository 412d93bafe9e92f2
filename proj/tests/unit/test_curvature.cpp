#include "dgc/curvature.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dgc;

namespace {

Vector vec(double a, double b) { return (Vector(2) << a, b).finished(); }

CurvatureQuery query(const Point& y, const Tangent& v, const Tangent& w, QuotientVariant var, double tau = 1e-2) {
  CurvatureQuery q;
  q.y = y;
  q.v = v;
  q.w = w;
  q.tau = tau;
  q.variant = var;
  return q;
}

}  // namespace

TEST_CASE("flat space has zero curvature") {
  std::mt19937 rng(5);
  std::normal_distribution<double> N(0, 1);
  auto flat = make_flat_model(3);
  for (int i = 0; i < 20; ++i) {
    Vector y(3), v(3), w(3);
    for (int k = 0; k < 3; ++k) { y[k] = N(rng); v[k] = N(rng); w[k] = N(rng); }
    v.normalize();
    w.normalize();
    const auto rep = sectional_curvature(*flat, query(y, v, w, QuotientVariant::central));
    CHECK(std::abs(rep.sectional) < 1e-8);
    // The one-sided inner step is tau^2 = 1e-4, so rounding is amplified by 1e8 more.
    const auto one = sectional_curvature(*flat, query(y, v, w, QuotientVariant::one_sided));
    CHECK(std::abs(one.sectional) < 1e-5);
  }
}

TEST_CASE("unit sphere: R(v,w)w = v and kappa = 1") {
  auto s = make_embedded_model(sphere_chart());
  const Point y = vec(M_PI / 2, 0.2);
  const auto q = query(y, vec(1, 0), vec(0, 1), QuotientVariant::central);
  CHECK((curvature_tensor(*s, q) - vec(1, 0)).norm() < 2e-3);
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int i = 0; i < 5; ++i) {
    const Point p = vec(1.5 + 0.8 * U(rng), 2 * U(rng));
    const auto rep = sectional_curvature(*s, query(p, vec(U(rng), U(rng)), vec(U(rng), U(rng)), QuotientVariant::central));
    CHECK(std::abs(rep.sectional - 1.0) < 5e-3);
    CHECK(rep.sectional == doctest::Approx(rep.numerator / rep.denominator));
  }
}

TEST_CASE("tensor is antisymmetric by construction") {
  auto t = make_embedded_model(torus_chart(std::sqrt(2.0), 1.0));
  auto q = query(vec(0.3, 0.4), vec(1, 0.2), vec(-0.3, 1), QuotientVariant::one_sided);
  q.z = vec(0.5, 0.5);
  auto r = q;
  std::swap(r.v, r.w);
  CHECK((curvature_tensor(*t, q) + curvature_tensor(*t, r)).norm() == 0.0);
}

TEST_CASE("torus sectional curvature at the outer equator") {
  auto t = make_embedded_model(torus_chart(std::sqrt(2.0), 1.0));
  const auto rep = sectional_curvature(*t, query(vec(0, 0), vec(1, 0), vec(0, 1), QuotientVariant::central));
  CHECK(std::abs(rep.sectional - 1.0 / (std::sqrt(2.0) + 1.0)) < 1e-3);
  CHECK(*rep.query.beta == 1.5);
  CHECK(rep.inverse_transports == 12);
}

TEST_CASE("query validation") {
  auto flat = make_flat_model(2);
  CHECK_THROWS_AS(sectional_curvature(*flat, query(vec(0, 0), vec(1, 0), vec(2, 0), QuotientVariant::central)),
                  DegeneratePlaneError);
  CHECK_THROWS_AS(sectional_curvature(*flat, query(vec(0, 0), vec(1, 0), vec(0, 1), QuotientVariant::central, 1e-5)),
                  InvalidArgument);
  auto q = query(vec(0, 0), vec(1, 0), vec(0, 1), QuotientVariant::one_sided);
  q.beta = 1.5;
  CHECK_THROWS_AS(curvature_tensor(*flat, q), InvalidArgument);
  CHECK(parse_variant("one-sided") == QuotientVariant::one_sided);
  CHECK_THROWS_AS(parse_variant("sideways"), InvalidArgument);
}

TEST_CASE("curvature matrix layout") {
  auto flat = make_flat_model(3);
  std::vector<Tangent> basis;
  for (int i = 0; i < 3; ++i) basis.push_back(Vector::Unit(3, i));
  basis.push_back(Vector::Unit(3, 0));  // collinear with the first: invalid entries
  const auto m = curvature_matrix(*flat, Vector::Zero(3), basis, 1e-2, std::nullopt, QuotientVariant::central);
  for (int i = 0; i < 4; ++i) {
    CHECK(std::isnan(m.values(i, i)));
    for (int j = 0; j < 4; ++j) {
      CHECK(m.valid(i, j) == m.valid(j, i));
      if (m.valid(i, j)) CHECK(std::abs(m.values(i, j)) < 1e-8);
    }
  }
  CHECK(!m.valid(0, 3));
  CHECK(m.errors.size() == 1);

  auto s = make_embedded_model(sphere_chart());
  const auto ms = curvature_matrix(*s, vec(1.3, 0), {vec(1, 0), vec(0, 1)}, 1e-2, std::nullopt, QuotientVariant::central);
  CHECK(ms.values(0, 1) == doctest::Approx(1.0).epsilon(5e-3));
  CHECK(ms.values(1, 0) == ms.values(0, 1));
}

TEST_CASE("percentile") {
  CHECK(percentile({1, 2, 3, 4, 5}, 90) == doctest::Approx(4.6));
  CHECK(percentile({7}, 90) == 7.0);
}
