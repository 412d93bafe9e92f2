#include "dgc/energy_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dgc {

namespace {

SparseMatrix dense_to_sparse(const DenseMatrix& m) { return m.sparseView(0.0, 0.0); }

// Column j of the result is d/dx_j of grad(x), by central differences.
DenseMatrix fd_jacobian(const std::function<Vector(const Vector&)>& grad, const Vector& x, double step) {
  const Eigen::Index d = x.size();
  DenseMatrix jac(d, d);
  Vector xp = x;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double xj = x[j];
    xp[j] = xj + step;
    Vector gp = grad(xp);
    xp[j] = xj - step;
    Vector gm = grad(xp);
    xp[j] = xj;
    jac.col(j) = (gp - gm) / (2.0 * step);
  }
  return jac;
}

double fd_step_for(double scale) { return std::cbrt(std::numeric_limits<double>::epsilon()) * scale; }

}  // namespace

SparseMatrix EnergyModel::hess11(const Point& y, const Point& y_tilde) const {
  const double h = fd_step_for(fd_coordinate_scale_);
  DenseMatrix jac = fd_jacobian([&](const Vector& x) { return grad1(x, y_tilde); }, y, h);
  return dense_to_sparse(0.5 * (jac + jac.transpose()));
}

SparseMatrix EnergyModel::hess12(const Point& y, const Point& y_tilde) const {
  const double h = fd_step_for(fd_coordinate_scale_);
  return dense_to_sparse(fd_jacobian([&](const Vector& x) { return grad1(y, x); }, y_tilde, h));
}

SparseMatrix EnergyModel::hess22(const Point& y, const Point& y_tilde) const {
  const double h = fd_step_for(fd_coordinate_scale_);
  DenseMatrix jac = fd_jacobian([&](const Vector& x) { return grad2(y, x); }, y_tilde, h);
  return dense_to_sparse(0.5 * (jac + jac.transpose()));
}

void EnergyModel::check_domain(const Point& p) const { require_dimension(p, dimension(), "point"); }

SparseMatrix EnergyModel::gauge_basis(const Point&) const { return SparseMatrix(dimension(), 0); }

void EnergyModel::calibrate_metric_scale(const Point& base) {
  const SparseMatrix h = hess22(base, base);
  double trace = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i) trace += h.coeff(i, i);
  const double scale = trace / static_cast<double>(dimension());
  metric_scale_ = (std::isfinite(scale) && scale > 0.0) ? scale : 1.0;
}

MetricOperator metric_operator(const EnergyModel& model, const Point& y) {
  model.check_domain(y);
  return MetricOperator{0.5 * model.hess22(y, y)};
}

double metric_eval(const EnergyModel& model, const Point& y, const Tangent& v, const Tangent& w) {
  require_dimension(v, model.dimension(), "metric_eval v");
  require_dimension(w, model.dimension(), "metric_eval w");
  return metric_operator(model, y)(v, w);
}

double IdentityReport::max_deviation() const {
  return std::max({energy_on_diagonal, grad1_on_diagonal, grad2_on_diagonal, hess11_plus_hess12,
                   hess11_minus_hess22, hess12_symmetry, third_order});
}

IdentityReport check_consistency_identities(const EnergyModel& model, const Point& y,
                                            const std::vector<TangentPair>& samples, double fd_step) {
  model.check_domain(y);
  const double scale = model.metric_scale();
  IdentityReport rep;
  rep.energy_on_diagonal = std::abs(model.energy(y, y)) / scale;
  rep.grad1_on_diagonal = model.grad1(y, y).norm() / scale;
  rep.grad2_on_diagonal = model.grad2(y, y).norm() / scale;

  const SparseMatrix h11 = model.hess11(y, y);
  const SparseMatrix h12 = model.hess12(y, y);
  const SparseMatrix h22 = model.hess22(y, y);

  for (const auto& [v, w] : samples) {
    require_dimension(v, model.dimension(), "sample v");
    require_dimension(w, model.dimension(), "sample w");
    const double norm = scale * std::max(v.norm() * w.norm(), std::numeric_limits<double>::min());
    const double b11 = v.dot(h11 * w);
    const double b12 = v.dot(h12 * w);
    const double b21 = w.dot(h12 * v);
    const double b22 = v.dot(h22 * w);
    rep.hess11_plus_hess12 = std::max(rep.hess11_plus_hess12, std::abs(b11 + b12) / norm);
    rep.hess11_minus_hess22 = std::max(rep.hess11_minus_hess22, std::abs(b11 - b22) / norm);
    rep.hess12_symmetry = std::max(rep.hess12_symmetry, std::abs(b12 - b21) / norm);

    // Derivatives of the four Hessian forms along the diagonal in direction v.
    const Point yp = y + fd_step * v;
    const Point ym = y - fd_step * v;
    const double inv = 1.0 / (2.0 * fd_step);
    const double d22 = (v.dot(model.hess22(yp, yp) * w) - v.dot(model.hess22(ym, ym) * w)) * inv;
    const double d11 = (v.dot(model.hess11(yp, yp) * w) - v.dot(model.hess11(ym, ym) * w)) * inv;
    const double d12 = -(v.dot(model.hess12(yp, yp) * w) - v.dot(model.hess12(ym, ym) * w)) * inv;
    const double d21 = -(w.dot(model.hess12(yp, yp) * v) - w.dot(model.hess12(ym, ym) * v)) * inv;
    const double lo = std::min({d22, d11, d12, d21});
    const double hi = std::max({d22, d11, d12, d21});
    rep.third_order = std::max(rep.third_order, (hi - lo) / (norm * std::max(v.norm(), 1e-300)));
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

class FlatModel final : public EnergyModel {
 public:
  explicit FlatModel(Eigen::Index d) : d_(d) {
    if (d < 1) throw InvalidArgument("flat model dimension must be positive");
    calibrate_metric_scale(Point::Zero(d));
  }

  Eigen::Index dimension() const override { return d_; }
  std::string name() const override { return "flat" + std::to_string(d_); }

  double energy(const Point& y, const Point& yt) const override {
    check(y, yt);
    return (y - yt).squaredNorm();
  }
  Vector grad1(const Point& y, const Point& yt) const override {
    check(y, yt);
    return 2.0 * (y - yt);
  }
  Vector grad2(const Point& y, const Point& yt) const override {
    check(y, yt);
    return 2.0 * (yt - y);
  }
  SparseMatrix hess11(const Point& y, const Point& yt) const override {
    check(y, yt);
    return scaled_identity(2.0);
  }
  SparseMatrix hess12(const Point& y, const Point& yt) const override {
    check(y, yt);
    return scaled_identity(-2.0);
  }
  SparseMatrix hess22(const Point& y, const Point& yt) const override {
    check(y, yt);
    return scaled_identity(2.0);
  }

 private:
  void check(const Point& y, const Point& yt) const {
    require_dimension(y, d_, "flat model point");
    require_dimension(yt, d_, "flat model point");
  }
  SparseMatrix scaled_identity(double s) const {
    SparseMatrix m(d_, d_);
    m.setIdentity();
    return s * m;
  }

  Eigen::Index d_;
};

class EmbeddedModel final : public EnergyModel {
 public:
  explicit EmbeddedModel(Chart chart) : chart_(std::move(chart)) {
    fd_coordinate_scale_ = 1.0;
    calibrate_metric_scale(0.5 * (chart_.lower + chart_.upper));
  }

  Eigen::Index dimension() const override { return 2; }
  std::string name() const override { return chart_.name; }

  void check_domain(const Point& p) const override {
    require_dimension(p, 2, "chart point");
    if (!p.allFinite()) throw DomainError(chart_.name + ": non-finite chart coordinates");
    for (int a = 0; a < 2; ++a) {
      if (p[a] < chart_.lower[a] || p[a] > chart_.upper[a]) {
        throw DomainError(chart_.name + ": point (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                          ") outside the chart's validity box");
      }
    }
  }

  double energy(const Point& y, const Point& yt) const override {
    return (eval(y).x - eval(yt).x).squaredNorm();
  }
  Vector grad1(const Point& y, const Point& yt) const override {
    const auto a = eval(y);
    const auto b = eval(yt);
    return 2.0 * a.jacobian.transpose() * (a.x - b.x);
  }
  Vector grad2(const Point& y, const Point& yt) const override {
    const auto a = eval(y);
    const auto b = eval(yt);
    return -2.0 * b.jacobian.transpose() * (a.x - b.x);
  }
  SparseMatrix hess11(const Point& y, const Point& yt) const override {
    const auto a = eval(y);
    const auto b = eval(yt);
    const Eigen::Vector3d diff = a.x - b.x;
    Eigen::Matrix2d h = 2.0 * a.jacobian.transpose() * a.jacobian;
    for (int k = 0; k < 3; ++k) h += 2.0 * diff[k] * a.second[k];
    return DenseMatrix(h).sparseView(0.0, 0.0);
  }
  SparseMatrix hess12(const Point& y, const Point& yt) const override {
    const auto a = eval(y);
    const auto b = eval(yt);
    const Eigen::Matrix2d h = -2.0 * a.jacobian.transpose() * b.jacobian;
    return DenseMatrix(h).sparseView(0.0, 0.0);
  }
  SparseMatrix hess22(const Point& y, const Point& yt) const override {
    const auto a = eval(y);
    const auto b = eval(yt);
    const Eigen::Vector3d diff = a.x - b.x;
    Eigen::Matrix2d h = 2.0 * b.jacobian.transpose() * b.jacobian;
    for (int k = 0; k < 3; ++k) h -= 2.0 * diff[k] * b.second[k];
    return DenseMatrix(h).sparseView(0.0, 0.0);
  }

 private:
  Chart::Eval eval(const Point& p) const {
    check_domain(p);
    Chart::Eval e = chart_.evaluate(Eigen::Vector2d(p[0], p[1]));
    const double area = e.jacobian.col(0).cross(e.jacobian.col(1)).norm();
    if (!(area > 1e-12)) throw DomainError(chart_.name + ": chart is degenerate at the evaluation point");
    return e;
  }

  Chart chart_;
};

}  // namespace

std::shared_ptr<const EnergyModel> make_flat_model(Eigen::Index d) { return std::make_shared<FlatModel>(d); }

std::shared_ptr<const EnergyModel> make_embedded_model(Chart chart) {
  return std::make_shared<EmbeddedModel>(std::move(chart));
}

Chart torus_chart(double R, double r) {
  if (!(r > 0.0) || !(R > r)) throw InvalidArgument("torus chart requires R > r > 0");
  Chart c;
  c.name = "torus(R=" + std::to_string(R) + ",r=" + std::to_string(r) + ")";
  c.lower = Eigen::Vector2d(-4.0 * M_PI, -4.0 * M_PI);
  c.upper = Eigen::Vector2d(4.0 * M_PI, 4.0 * M_PI);
  c.evaluate = [R, r](const Eigen::Vector2d& p) {
    const double cu = std::cos(p[0]), su = std::sin(p[0]);
    const double cv = std::cos(p[1]), sv = std::sin(p[1]);
    const double rho = R + r * cv;
    Chart::Eval e;
    e.x << rho * cu, rho * su, r * sv;
    e.jacobian << -rho * su, -r * sv * cu,
                   rho * cu, -r * sv * su,
                   0.0,       r * cv;
    e.second[0] << -rho * cu, r * sv * su,
                    r * sv * su, -r * cv * cu;
    e.second[1] << -rho * su, -r * sv * cu,
                   -r * sv * cu, -r * cv * su;
    e.second[2] << 0.0, 0.0,
                   0.0, -r * sv;
    return e;
  };
  return c;
}

Chart sphere_chart(double pole_margin) {
  if (!(pole_margin > 0.0) || pole_margin >= 0.5 * M_PI) throw InvalidArgument("sphere chart pole margin out of range");
  Chart c;
  c.name = "sphere";
  c.lower = Eigen::Vector2d(pole_margin, -4.0 * M_PI);
  c.upper = Eigen::Vector2d(M_PI - pole_margin, 4.0 * M_PI);
  c.evaluate = [](const Eigen::Vector2d& p) {
    const double ct = std::cos(p[0]), st = std::sin(p[0]);
    const double cp = std::cos(p[1]), sp = std::sin(p[1]);
    Chart::Eval e;
    e.x << st * cp, st * sp, ct;
    e.jacobian << ct * cp, -st * sp,
                  ct * sp,  st * cp,
                  -st,      0.0;
    e.second[0] << -st * cp, -ct * sp,
                   -ct * sp, -st * cp;
    e.second[1] << -st * sp, ct * cp,
                    ct * cp, -st * sp;
    e.second[2] << -ct, 0.0,
                    0.0, 0.0;
    return e;
  };
  return c;
}

}  // namespace dgc
