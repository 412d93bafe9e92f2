#pragma once

#include "dgc/energy_model.hpp"
#include "dgc/newton.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dgc {

struct DiscretePath {
  std::vector<Point> points;  // K + 1 points
  int K = 0;
  double energy = 0.0;
  SolveReport report;
  std::string initialization;  // "linear", "user", "upsampled" or "trivial"
};

/// Newton defaults for a model: residual_tol_abs = 1e-12 * metric_scale * sqrt(d).
NewtonConfig default_newton_config(const EnergyModel& model);

/// K * sum_k W(y_{k-1}, y_k).
double path_energy(const EnergyModel& model, const std::vector<Point>& points);

/// Largest Euler-Lagrange residual W_{,2}[y_{k-1},y_k] + W_{,1}[y_k,y_{k+1}]
/// over the interior points, after removing gauge components.
double el_residual(const EnergyModel& model, const std::vector<Point>& points);

/// Gauge basis of a stacked unknown (p_1, ..., p_m): block diagonal with the
/// model's per-point gauge in each block.
SparseMatrix stacked_gauge_basis(const EnergyModel& model, const std::vector<Point>& blocks);

/// Raised when a path solve fails; carries the best path seen.
class PathSolveError : public SolverError {
 public:
  PathSolveError(const SolverError& cause, DiscretePath best)
      : SolverError(cause.what(), cause.best_iterate(), cause.report()), best_(std::move(best)) {}
  const DiscretePath& best_path() const { return best_; }

 private:
  DiscretePath best_;
};

struct BvpOptions {
  std::optional<NewtonConfig> newton;  // default_newton_config(model) if unset
  /// On failure at K (even, >= 4), solve at K/2 first and start from the
  /// refined coarse path.
  bool allow_upsampling = true;
};

/// Discrete K-geodesic from y_A to y_B. Block Newton on all interior points,
/// minimizing the path energy. `init` must have K + 1 points when given.
DiscretePath geodesic_bvp(const EnergyModel& model, const Point& y_A, const Point& y_B, int K,
                          const std::optional<DiscretePath>& init = std::nullopt,
                          const BvpOptions& options = {});

/// c with W_{,2}[a,c] + W_{,1}[c,b] = 0.
Point midpoint(const EnergyModel& model, const Point& a, const Point& b,
               const std::optional<Point>& init = std::nullopt,
               const std::optional<NewtonConfig>& config = std::nullopt, SolveReport* report = nullptr);

/// z with W_{,2}[y0,c] + W_{,1}[c,z] = 0.
Point extend(const EnergyModel& model, const Point& y0, const Point& c,
             const std::optional<Point>& init = std::nullopt,
             const std::optional<NewtonConfig>& config = std::nullopt, SolveReport* report = nullptr);

/// K * (y_1 - y_0) of the connecting K-geodesic.
Tangent discrete_log(const EnergyModel& model, const Point& y_A, const Point& y_B, int K,
                     const BvpOptions& options = {});

/// All K + 1 points of the discrete exponential shooting path.
std::vector<Point> discrete_exp_path(const EnergyModel& model, const Point& y0, const Tangent& v, int K,
                                     const std::optional<NewtonConfig>& config = std::nullopt);

/// Endpoint y_K of discrete_exp_path.
Point discrete_exp(const EnergyModel& model, const Point& y0, const Tangent& v, int K,
                   const std::optional<NewtonConfig>& config = std::nullopt);

}  // namespace dgc
