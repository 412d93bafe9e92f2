#pragma once

#include "dgc/common.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dgc {

enum class LinearSolverKind { dense_direct, sparse_direct };

struct NewtonConfig {
  double residual_tol_abs = 1e-12;  // in residual (gradient) units
  double residual_tol_rel = 1e-14;
  int max_iterations = 50;
  double shrink = 0.5;              // backtracking factor
  double sufficient_decrease = 1e-4;
  int max_backtracks = 40;
  /// Extra Newton steps taken after the tolerance is met; each is kept only if
  /// it does not increase the residual. Downstream difference quotients divide
  /// solver output by tau^2, so the last digits matter.
  int polish_steps = 2;
  LinearSolverKind linear_solver = LinearSolverKind::sparse_direct;

  void validate() const;
};

struct SolveReport {
  bool converged = false;
  double initial_residual = 0.0;
  double final_residual = 0.0;
  double tolerance = 0.0;
  int iterations = 0;
  int damping_events = 0;
  int polish_steps_taken = 0;
  int regularizations = 0;
  std::vector<double> residual_history;
  std::string note;
};

/// Nonlinear system r(x) = 0 with Jacobian J(x) = dr/dx.
///
/// If `objective` is set, r must be its gradient; the line search then enforces
/// descent of the objective (local minimization) instead of the residual norm.
struct NonlinearSystem {
  std::function<Vector(const Vector&)> residual;
  std::function<SparseMatrix(const Vector&)> jacobian;
  std::function<double(const Vector&)> objective;
};

/// Raised when Newton fails; carries the best iterate seen.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, Vector best_iterate, SolveReport report)
      : Error(what), best_iterate_(std::move(best_iterate)), report_(std::move(report)) {}

  const Vector& best_iterate() const { return best_iterate_; }
  const SolveReport& report() const { return report_; }

 private:
  Vector best_iterate_;
  SolveReport report_;
};

/// The linearized system was singular.
class RankDeficiencyError : public SolverError {
 public:
  using SolverError::SolverError;
};

/// Rethrows e (keeping RankDeficiencyError distinct) with `tag: ` prefixed to the message.
[[noreturn]] void rethrow_tagged(const SolverError& e, const std::string& tag);

/// Damped Newton iteration.
///
/// With a gauge basis C (d x m) the iteration solves r(x) + C lambda = 0,
/// C^T (x - init) = 0 through the bordered system [J C; C^T 0], so every
/// increment satisfies C^T dx = 0. The residual norm is measured after
/// removing the components along C.
std::pair<Vector, SolveReport> solve_system(const NonlinearSystem& system, const Vector& init,
                                            const SparseMatrix* gauge, const NewtonConfig& config);

}  // namespace dgc
