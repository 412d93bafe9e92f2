#pragma once

#include "dgc/energy_model.hpp"
#include "dgc/newton.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace dgc {

/// One rung of Schild's ladder: the geodesic parallelogram (y, y+v, z, y+w)
/// with diagonal midpoint c.
struct LadderStep {
  Point base;
  Tangent direction;
  Tangent payload;
  Point midpoint;
  Point opposite;
  SolveReport midpoint_report;
  SolveReport extension_report;
  Tangent result;  // opposite - (base + direction)
};

LadderStep schild_step(const EnergyModel& model, const Point& y, const Tangent& v, const Tangent& w,
                       const std::optional<NewtonConfig>& config = std::nullopt);

/// Discrete transport of w from y to y + v.
Tangent transport_step(const EnergyModel& model, const Point& y, const Tangent& v, const Tangent& w,
                       const std::optional<NewtonConfig>& config = std::nullopt);

struct InverseTransport {
  Tangent result;  // z - y
  Point midpoint;
  Point opposite;
  SolveReport report;
};

/// Transport of w_at_far (based at y + v) back to y. Solves for (z, c) jointly:
///   W_{,2}[z,c] + W_{,1}[c,y+v] = 0,  W_{,2}[y,c] + W_{,1}[c,y+v+w] = 0.
InverseTransport inverse_transport_full(const EnergyModel& model, const Point& y, const Tangent& v,
                                        const Tangent& w_at_far,
                                        const std::optional<NewtonConfig>& config = std::nullopt);

Tangent inverse_transport(const EnergyModel& model, const Point& y, const Tangent& v, const Tangent& w_at_far,
                          const std::optional<NewtonConfig>& config = std::nullopt);

/// Iterated transport along the polygon through `waypoints`; each leg is split
/// into `substeps` ladder steps and the payload is scaled by 1/substeps.
Tangent transport_polygonal(const EnergyModel& model, const std::vector<Point>& waypoints, const Tangent& w0,
                            int substeps, const std::optional<NewtonConfig>& config = std::nullopt);

using VectorField = std::function<Tangent(const Point&)>;

struct QuotientOptions {
  std::optional<NewtonConfig> newton;
  double tau_floor = 1e-4;  // |tau| below this is refused; 0 disables the check
};

/// (P^{-1}(tau w(y + tau v)) - tau w(y)) / tau^2; tau may be negative.
Tangent cov_quotient_one_sided(const EnergyModel& model, const Point& y, const Tangent& v, const VectorField& field,
                               double tau, const QuotientOptions& options = {});

/// [P^{-1}_{+tau}(tau w(y + tau v)) + P^{-1}_{-tau}(-tau w(y - tau v))] / (2 tau^2), tau > 0.
Tangent cov_quotient_central(const EnergyModel& model, const Point& y, const Tangent& v, const VectorField& field,
                             double tau, const QuotientOptions& options = {});

}  // namespace dgc
