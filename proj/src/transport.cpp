#include "dgc/transport.hpp"

#include "dgc/geodesic.hpp"
#include "detail/sparse_blocks.hpp"

#include <cmath>
#include <string>

namespace dgc {

namespace {

void check_args(const EnergyModel& model, const Point& y, const Tangent& v, const Tangent& w) {
  const Eigen::Index d = model.dimension();
  require_dimension(y, d, "transport base point");
  require_dimension(v, d, "transport direction");
  require_dimension(w, d, "transport payload");
  require_finite(y, "transport base point");
  require_finite(v, "transport direction");
  require_finite(w, "transport payload");
}

void check_tau(double tau, double floor, bool positive) {
  if (!std::isfinite(tau) || tau == 0.0) throw InvalidArgument("tau must be finite and nonzero");
  if (positive && tau < 0.0) throw InvalidArgument("central quotient needs tau > 0");
  if (std::abs(tau) < floor) {
    throw InvalidArgument("|tau| = " + std::to_string(std::abs(tau)) + " is below the floor " + std::to_string(floor));
  }
}

}  // namespace

LadderStep schild_step(const EnergyModel& model, const Point& y, const Tangent& v, const Tangent& w,
                       const std::optional<NewtonConfig>& config) {
  check_args(model, y, v, w);
  LadderStep s;
  s.base = y;
  s.direction = v;
  s.payload = w;
  const Point far = y + v;
  try {
    s.midpoint = midpoint(model, y + w, far, std::nullopt, config, &s.midpoint_report);
  } catch (const SolverError& e) {
    rethrow_tagged(e, "midpoint");
  }
  try {
    s.opposite = extend(model, y, s.midpoint, Point(far + w), config, &s.extension_report);
  } catch (const SolverError& e) {
    rethrow_tagged(e, "extension");
  }
  s.result = s.opposite - far;
  return s;
}

Tangent transport_step(const EnergyModel& model, const Point& y, const Tangent& v, const Tangent& w,
                       const std::optional<NewtonConfig>& config) {
  return schild_step(model, y, v, w, config).result;
}

InverseTransport inverse_transport_full(const EnergyModel& model, const Point& y, const Tangent& v,
                                        const Tangent& w_at_far, const std::optional<NewtonConfig>& config) {
  check_args(model, y, v, w_at_far);
  const Eigen::Index d = model.dimension();
  const Point far = y + v;
  const Point corner = far + w_at_far;
  model.check_domain(far);
  model.check_domain(corner);

  NewtonConfig cfg;
  if (config) {
    cfg = *config;
  } else {
    cfg = default_newton_config(model);
    cfg.residual_tol_abs *= std::sqrt(2.0);
  }

  // Unknown x = (z, c).
  NonlinearSystem sys;
  sys.residual = [&](const Vector& x) {
    const Point z = x.head(d), c = x.tail(d);
    model.check_domain(z);
    model.check_domain(c);
    Vector r(2 * d);
    r.head(d) = model.grad2(z, c) + model.grad1(c, far);
    r.tail(d) = model.grad2(y, c) + model.grad1(c, corner);
    return r;
  };
  sys.jacobian = [&](const Vector& x) {
    const Point z = x.head(d), c = x.tail(d);
    std::vector<Triplet> t;
    detail::add_block(t, model.hess12(z, c), 0, 0, true);
    detail::add_block(t, model.hess22(z, c), 0, d);
    detail::add_block(t, model.hess11(c, far), 0, d);
    detail::add_block(t, model.hess22(y, c), d, d);
    detail::add_block(t, model.hess11(c, corner), d, d);
    return detail::from_triplets(2 * d, 2 * d, t);
  };

  Vector x0(2 * d);
  x0.head(d) = y + w_at_far;
  x0.tail(d) = y + 0.5 * (v + w_at_far);
  const SparseMatrix gauge = stacked_gauge_basis(model, {Point(x0.head(d)), Point(x0.tail(d))});
  auto [x, report] = solve_system(sys, x0, &gauge, cfg);
  InverseTransport out;
  out.opposite = x.head(d);
  out.midpoint = x.tail(d);
  out.result = out.opposite - y;
  out.report = std::move(report);
  return out;
}

Tangent inverse_transport(const EnergyModel& model, const Point& y, const Tangent& v, const Tangent& w_at_far,
                          const std::optional<NewtonConfig>& config) {
  return inverse_transport_full(model, y, v, w_at_far, config).result;
}

Tangent transport_polygonal(const EnergyModel& model, const std::vector<Point>& waypoints, const Tangent& w0,
                            int substeps, const std::optional<NewtonConfig>& config) {
  if (waypoints.size() < 2) throw InvalidArgument("polygon needs at least two waypoints");
  if (substeps < 1) throw InvalidArgument("substeps must be at least 1");
  require_dimension(w0, model.dimension(), "transported vector");
  const double tau = 1.0 / substeps;
  Tangent w = tau * w0;
  for (size_t leg = 0; leg + 1 < waypoints.size(); ++leg) {
    const Tangent delta = tau * (waypoints[leg + 1] - waypoints[leg]);
    for (int s = 0; s < substeps; ++s) {
      const Point y = waypoints[leg] + static_cast<double>(s) * delta;
      try {
        w = transport_step(model, y, delta, w, config);
      } catch (const SolverError& e) {
        rethrow_tagged(e, "leg " + std::to_string(leg) + " step " + std::to_string(s));
      }
    }
  }
  return w / tau;
}

Tangent cov_quotient_one_sided(const EnergyModel& model, const Point& y, const Tangent& v, const VectorField& field,
                               double tau, const QuotientOptions& options) {
  check_tau(tau, options.tau_floor, false);
  const Tangent step = tau * v;
  const Tangent back = inverse_transport(model, y, step, Tangent(tau * field(y + step)), options.newton);
  return (back - tau * field(y)) / (tau * tau);
}

Tangent cov_quotient_central(const EnergyModel& model, const Point& y, const Tangent& v, const VectorField& field,
                             double tau, const QuotientOptions& options) {
  check_tau(tau, options.tau_floor, true);
  const Tangent step = tau * v;
  Tangent forward, backward;
  try {
    forward = inverse_transport(model, y, step, Tangent(tau * field(y + step)), options.newton);
  } catch (const SolverError& e) {
    rethrow_tagged(e, "forward inverse transport");
  }
  try {
    backward = inverse_transport(model, y, Tangent(-step), Tangent(-tau * field(y - step)), options.newton);
  } catch (const SolverError& e) {
    rethrow_tagged(e, "reflected inverse transport");
  }
  return (forward + backward) / (2.0 * tau * tau);
}

}  // namespace dgc
