#include "dgc/geodesic.hpp"

#include "detail/sparse_blocks.hpp"

#include <cmath>

namespace dgc {

namespace {

NewtonConfig resolve(const EnergyModel& model, const std::optional<NewtonConfig>& config, size_t blocks) {
  if (config) return *config;
  NewtonConfig c = default_newton_config(model);
  c.residual_tol_abs *= std::sqrt(static_cast<double>(std::max<size_t>(blocks, 1)));
  return c;
}

Vector stack(const std::vector<Point>& pts, size_t first, size_t last) {
  const Eigen::Index d = pts.front().size();
  Vector x(static_cast<Eigen::Index>(last - first) * d);
  for (size_t k = first; k < last; ++k) x.segment(static_cast<Eigen::Index>(k - first) * d, d) = pts[k];
  return x;
}

Vector remove_gauge(const EnergyModel& model, const Point& p, const Vector& r) {
  const SparseMatrix c = model.gauge_basis(p);
  if (c.cols() == 0) return r;
  Eigen::HouseholderQR<DenseMatrix> qr{DenseMatrix(c)};
  const DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(c.rows(), c.cols());
  return r - q * (q.transpose() * r);
}

void validate_endpoints(const EnergyModel& model, const Point& a, const Point& b) {
  require_dimension(a, model.dimension(), "path start");
  require_dimension(b, model.dimension(), "path end");
  require_finite(a, "path start");
  require_finite(b, "path end");
}

DiscretePath solve_bvp(const EnergyModel& model, const Point& y_A, const Point& y_B, int K,
                       std::vector<Point> pts, const std::optional<NewtonConfig>& config) {
  const Eigen::Index d = model.dimension();
  const size_t m = static_cast<size_t>(K - 1);
  const NewtonConfig cfg = resolve(model, config, m);

  auto unpack = [&](const Vector& x) {
    std::vector<Point> p(static_cast<size_t>(K) + 1);
    p.front() = y_A;
    p.back() = y_B;
    for (size_t k = 1; k <= m; ++k) p[k] = x.segment(static_cast<Eigen::Index>(k - 1) * d, d);
    return p;
  };

  NonlinearSystem sys;
  sys.residual = [&](const Vector& x) {
    const auto p = unpack(x);
    for (const auto& q : p) model.check_domain(q);
    Vector r(x.size());
    for (size_t k = 1; k <= m; ++k) {
      r.segment(static_cast<Eigen::Index>(k - 1) * d, d) = model.grad2(p[k - 1], p[k]) + model.grad1(p[k], p[k + 1]);
    }
    return r;
  };
  sys.jacobian = [&](const Vector& x) {
    const auto p = unpack(x);
    std::vector<Triplet> t;
    for (size_t k = 1; k <= m; ++k) {
      const Eigen::Index o = static_cast<Eigen::Index>(k - 1) * d;
      detail::add_block(t, model.hess22(p[k - 1], p[k]), o, o);
      detail::add_block(t, model.hess11(p[k], p[k + 1]), o, o);
      if (k < m) {
        const SparseMatrix h12 = model.hess12(p[k], p[k + 1]);
        detail::add_block(t, h12, o, o + d);
        detail::add_block(t, h12, o + d, o, true);
      }
    }
    return detail::from_triplets(x.size(), x.size(), t);
  };
  sys.objective = [&](const Vector& x) {
    const auto p = unpack(x);
    double e = 0.0;
    for (size_t k = 1; k < p.size(); ++k) e += model.energy(p[k - 1], p[k]);
    return e;
  };

  const Vector x0 = stack(pts, 1, m + 1);
  const SparseMatrix gauge = stacked_gauge_basis(model, std::vector<Point>(pts.begin() + 1, pts.end() - 1));
  DiscretePath out;
  out.K = K;
  try {
    auto [x, report] = solve_system(sys, x0, &gauge, cfg);
    out.points = unpack(x);
    out.report = std::move(report);
  } catch (const SolverError& e) {
    DiscretePath best;
    best.K = K;
    best.points = unpack(e.best_iterate());
    best.energy = path_energy(model, best.points);
    best.report = e.report();
    throw PathSolveError(e, std::move(best));
  }
  out.energy = path_energy(model, out.points);
  return out;
}

}  // namespace

NewtonConfig default_newton_config(const EnergyModel& model) {
  NewtonConfig c;
  c.residual_tol_abs = 1e-12 * model.metric_scale() * std::sqrt(static_cast<double>(model.dimension()));
  return c;
}

double path_energy(const EnergyModel& model, const std::vector<Point>& points) {
  if (points.size() < 2) throw InvalidArgument("a discrete path needs at least two points");
  const double K = static_cast<double>(points.size() - 1);
  double e = 0.0;
  for (size_t k = 1; k < points.size(); ++k) e += model.energy(points[k - 1], points[k]);
  return K * e;
}

double el_residual(const EnergyModel& model, const std::vector<Point>& points) {
  double worst = 0.0;
  for (size_t k = 1; k + 1 < points.size(); ++k) {
    const Vector r = model.grad2(points[k - 1], points[k]) + model.grad1(points[k], points[k + 1]);
    worst = std::max(worst, remove_gauge(model, points[k], r).norm());
  }
  return worst;
}

SparseMatrix stacked_gauge_basis(const EnergyModel& model, const std::vector<Point>& blocks) {
  const Eigen::Index d = model.dimension();
  std::vector<Triplet> t;
  Eigen::Index cols = 0;
  for (size_t k = 0; k < blocks.size(); ++k) {
    const SparseMatrix c = model.gauge_basis(blocks[k]);
    detail::add_block(t, c, static_cast<Eigen::Index>(k) * d, cols);
    cols += c.cols();
  }
  return detail::from_triplets(static_cast<Eigen::Index>(blocks.size()) * d, cols, t);
}

DiscretePath geodesic_bvp(const EnergyModel& model, const Point& y_A, const Point& y_B, int K,
                          const std::optional<DiscretePath>& init, const BvpOptions& options) {
  validate_endpoints(model, y_A, y_B);
  if (K < 1) throw InvalidArgument("K must be at least 1");
  if (K == 1) {
    DiscretePath p;
    p.K = 1;
    p.points = {y_A, y_B};
    p.energy = path_energy(model, p.points);
    p.report.converged = true;
    p.initialization = "trivial";
    return p;
  }

  std::vector<Point> pts;
  std::string how;
  if (init) {
    if (static_cast<int>(init->points.size()) != K + 1) throw DimensionError("initial path must have K + 1 points");
    pts = init->points;
    pts.front() = y_A;
    pts.back() = y_B;
    how = "user";
  } else {
    for (int k = 0; k <= K; ++k) {
      const double s = static_cast<double>(k) / K;
      pts.push_back((1.0 - s) * y_A + s * y_B);
    }
    how = "linear";
  }

  try {
    DiscretePath out = solve_bvp(model, y_A, y_B, K, pts, options.newton);
    out.initialization = how;
    return out;
  } catch (const PathSolveError& first) {
    if (!options.allow_upsampling || K < 4 || K % 2 != 0) throw;
    BvpOptions coarse_opts = options;
    DiscretePath coarse;
    try {
      coarse = geodesic_bvp(model, y_A, y_B, K / 2, std::nullopt, coarse_opts);
    } catch (const SolverError&) {
      throw first;
    }
    std::vector<Point> fine(static_cast<size_t>(K) + 1);
    for (int j = 0; j <= K / 2; ++j) fine[2 * static_cast<size_t>(j)] = coarse.points[static_cast<size_t>(j)];
    for (int j = 0; j < K / 2; ++j) {
      const size_t i = 2 * static_cast<size_t>(j);
      fine[i + 1] = 0.5 * (fine[i] + fine[i + 2]);
    }
    DiscretePath out = solve_bvp(model, y_A, y_B, K, fine, options.newton);
    out.initialization = "upsampled";
    return out;
  }
}

Point midpoint(const EnergyModel& model, const Point& a, const Point& b, const std::optional<Point>& init,
               const std::optional<NewtonConfig>& config, SolveReport* report) {
  validate_endpoints(model, a, b);
  const Point c0 = init ? *init : Point(0.5 * (a + b));
  require_dimension(c0, model.dimension(), "midpoint initialization");
  NonlinearSystem sys;
  sys.residual = [&](const Vector& c) {
    model.check_domain(c);
    return Vector(model.grad2(a, c) + model.grad1(c, b));
  };
  sys.jacobian = [&](const Vector& c) { return SparseMatrix(model.hess22(a, c) + model.hess11(c, b)); };
  sys.objective = [&](const Vector& c) { return model.energy(a, c) + model.energy(c, b); };
  const SparseMatrix gauge = model.gauge_basis(c0);
  auto [c, rep] = solve_system(sys, c0, &gauge, resolve(model, config, 1));
  if (report) *report = std::move(rep);
  return c;
}

Point extend(const EnergyModel& model, const Point& y0, const Point& c, const std::optional<Point>& init,
             const std::optional<NewtonConfig>& config, SolveReport* report) {
  validate_endpoints(model, y0, c);
  const Point z0 = init ? *init : Point(2.0 * c - y0);
  require_dimension(z0, model.dimension(), "extension initialization");
  const Vector g2 = model.grad2(y0, c);
  NonlinearSystem sys;
  sys.residual = [&](const Vector& z) {
    model.check_domain(z);
    return Vector(g2 + model.grad1(c, z));
  };
  sys.jacobian = [&](const Vector& z) { return model.hess12(c, z); };
  const SparseMatrix gauge = model.gauge_basis(z0);
  auto [z, rep] = solve_system(sys, z0, &gauge, resolve(model, config, 1));
  if (report) *report = std::move(rep);
  return z;
}

Tangent discrete_log(const EnergyModel& model, const Point& y_A, const Point& y_B, int K,
                     const BvpOptions& options) {
  const DiscretePath p = geodesic_bvp(model, y_A, y_B, K, std::nullopt, options);
  return static_cast<double>(K) * (p.points[1] - p.points[0]);
}

std::vector<Point> discrete_exp_path(const EnergyModel& model, const Point& y0, const Tangent& v, int K,
                                     const std::optional<NewtonConfig>& config) {
  require_dimension(y0, model.dimension(), "exp base point");
  require_dimension(v, model.dimension(), "exp tangent");
  if (K < 1) throw InvalidArgument("K must be at least 1");
  std::vector<Point> pts{y0, Point(y0 + v / static_cast<double>(K))};
  model.check_domain(pts[1]);
  for (int k = 1; k < K; ++k) {
    const Point& prev = pts[static_cast<size_t>(k) - 1];
    const Point& cur = pts[static_cast<size_t>(k)];
    try {
      pts.push_back(extend(model, prev, cur, Point(2.0 * cur - prev), config));
    } catch (const SolverError& e) {
      rethrow_tagged(e, "exponential step " + std::to_string(k));
    }
  }
  return pts;
}

Point discrete_exp(const EnergyModel& model, const Point& y0, const Tangent& v, int K,
                   const std::optional<NewtonConfig>& config) {
  return discrete_exp_path(model, y0, v, K, config).back();
}

}  // namespace dgc
