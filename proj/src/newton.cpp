#include "dgc/newton.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>

namespace dgc {

void NewtonConfig::validate() const {
  if (!(residual_tol_abs > 0.0) || !(residual_tol_rel > 0.0)) throw InvalidArgument("Newton tolerances must be positive");
  if (max_iterations < 1) throw InvalidArgument("Newton max_iterations must be at least 1");
  if (!(shrink > 0.0 && shrink < 1.0)) throw InvalidArgument("Newton shrink factor must lie in (0, 1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 0.5)) {
    throw InvalidArgument("Newton sufficient-decrease constant must lie in (0, 1/2)");
  }
  if (max_backtracks < 0 || polish_steps < 0) throw InvalidArgument("Newton counts must be non-negative");
}

void rethrow_tagged(const SolverError& e, const std::string& tag) {
  const std::string msg = tag + ": " + e.what();
  if (dynamic_cast<const RankDeficiencyError*>(&e)) throw RankDeficiencyError(msg, e.best_iterate(), e.report());
  throw SolverError(msg, e.best_iterate(), e.report());
}

namespace {

class GaugeProjector {
 public:
  GaugeProjector() = default;
  explicit GaugeProjector(const SparseMatrix& basis) {
    if (basis.cols() == 0) return;
    Eigen::HouseholderQR<DenseMatrix> qr{DenseMatrix(basis)};
    q_ = qr.householderQ() * DenseMatrix::Identity(basis.rows(), basis.cols());
  }
  Vector apply(const Vector& r) const {
    if (q_.cols() == 0) return r;
    return r - q_ * (q_.transpose() * r);
  }

 private:
  DenseMatrix q_;
};

SparseMatrix bordered(const SparseMatrix& jac, const SparseMatrix* gauge, double shift) {
  const Eigen::Index d = jac.rows();
  const Eigen::Index m = gauge ? gauge->cols() : 0;
  if (m == 0 && shift == 0.0) return jac;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<size_t>(jac.nonZeros() + 2 * (gauge ? gauge->nonZeros() : 0) + d));
  for (Eigen::Index k = 0; k < jac.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(jac, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
  }
  if (shift != 0.0) {
    for (Eigen::Index i = 0; i < d; ++i) trip.emplace_back(i, i, shift);
  }
  if (m > 0) {
    for (Eigen::Index k = 0; k < gauge->outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(*gauge, k); it; ++it) {
        trip.emplace_back(it.row(), d + it.col(), it.value());
        trip.emplace_back(d + it.col(), it.row(), it.value());
      }
    }
  }
  SparseMatrix k(d + m, d + m);
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

// Solves K s = rhs; returns std::nullopt when the system is numerically singular.
std::optional<Vector> linear_solve(const SparseMatrix& k, const Vector& rhs, LinearSolverKind kind) {
  Vector s;
  if (kind == LinearSolverKind::dense_direct) {
    Eigen::FullPivLU<DenseMatrix> lu{DenseMatrix(k)};
    if (!lu.isInvertible()) return std::nullopt;
    s = lu.solve(rhs);
  } else {
    SparseMatrix kc = k;
    kc.makeCompressed();
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
    lu.analyzePattern(kc);
    lu.factorize(kc);
    if (lu.info() != Eigen::Success) return std::nullopt;
    s = lu.solve(rhs);
    if (lu.info() != Eigen::Success) return std::nullopt;
  }
  if (!s.allFinite()) return std::nullopt;
  const double bn = rhs.norm();
  if (bn > 0.0 && (k * s - rhs).norm() > 1e-6 * bn) return std::nullopt;
  return s;
}

struct Trial {
  bool ok = false;
  Vector r;
  double rnorm = 0.0;
  double objective = 0.0;
};

}  // namespace

std::pair<Vector, SolveReport> solve_system(const NonlinearSystem& system, const Vector& init,
                                            const SparseMatrix* gauge, const NewtonConfig& config) {
  config.validate();
  if (!init.allFinite()) throw InvalidArgument("Newton initialization has non-finite entries");
  const Eigen::Index d = init.size();
  if (gauge && gauge->rows() != d) throw DimensionError("gauge basis row count does not match the unknown");
  if (gauge && gauge->cols() == 0) gauge = nullptr;
  const GaugeProjector projector = gauge ? GaugeProjector(*gauge) : GaugeProjector();
  const bool minimizing = static_cast<bool>(system.objective);

  auto evaluate = [&](const Vector& x) {
    Trial t;
    try {
      t.r = system.residual(x);
      if (t.r.size() != d || !t.r.allFinite()) return t;
      t.rnorm = projector.apply(t.r).norm();
      if (minimizing) {
        t.objective = system.objective(x);
        if (!std::isfinite(t.objective)) return t;
      }
      t.ok = true;
    } catch (const DomainError&) {
      t.ok = false;
    }
    return t;
  };

  SolveReport report;
  Vector x = init;
  Trial cur = evaluate(x);
  if (!cur.ok) throw DomainError("Newton initialization is outside the domain of the residual");
  report.initial_residual = cur.rnorm;
  report.tolerance = std::max(config.residual_tol_abs, config.residual_tol_rel * cur.rnorm);
  report.residual_history.push_back(cur.rnorm);

  auto newton_direction = [&](const Vector& xk, const Vector& rk, double shift) -> std::optional<Vector> {
    const SparseMatrix jac = system.jacobian(xk);
    if (jac.rows() != d || jac.cols() != d) throw DimensionError("Jacobian has the wrong shape");
    const SparseMatrix k = bordered(jac, gauge, shift);
    Vector rhs = Vector::Zero(k.rows());
    rhs.head(d) = -rk;
    auto s = linear_solve(k, rhs, config.linear_solver);
    if (!s) return std::nullopt;
    return Vector(s->head(d));
  };

  auto fail = [&](const std::string& msg, bool singular) {
    report.converged = false;
    report.final_residual = cur.rnorm;
    report.note = msg;
    if (singular) throw RankDeficiencyError(msg, x, report);
    throw SolverError(msg, x, report);
  };

  while (cur.rnorm > report.tolerance) {
    if (report.iterations >= config.max_iterations) {
      fail("Newton did not converge within " + std::to_string(config.max_iterations) + " iterations (residual " +
               std::to_string(cur.rnorm) + ")",
           false);
    }
    const int iteration = report.iterations;
    auto dx = newton_direction(x, cur.r, 0.0);
    if (!dx) fail("singular linear system at Newton iteration " + std::to_string(iteration), true);

    if (minimizing && cur.r.dot(*dx) >= 0.0) {
      // Not a descent direction for the objective: shift the Jacobian.
      const SparseMatrix jac = system.jacobian(x);
      double diag = 0.0;
      for (Eigen::Index i = 0; i < d; ++i) diag += std::abs(jac.coeff(i, i));
      double sigma = std::max(1e-8 * diag / static_cast<double>(d), 1e-300);
      bool found = false;
      for (int attempt = 0; attempt < 20 && !found; ++attempt, sigma *= 10.0) {
        auto shifted = newton_direction(x, cur.r, sigma);
        ++report.regularizations;
        if (shifted && cur.r.dot(*shifted) < 0.0) {
          dx = shifted;
          found = true;
        }
      }
      if (!found) fail("no descent direction at Newton iteration " + std::to_string(iteration), false);
    }

    const double slope = cur.r.dot(*dx);
    double alpha = 1.0;
    bool accepted = false;
    Trial next;
    for (int bt = 0; bt <= config.max_backtracks; ++bt) {
      Vector xt = x + alpha * (*dx);
      next = evaluate(xt);
      if (next.ok) {
        bool good;
        if (minimizing) {
          const double slack = 1e-12 * std::abs(cur.objective);
          good = next.objective <= cur.objective + config.sufficient_decrease * alpha * slope + slack;
        } else {
          good = next.rnorm * next.rnorm <=
                 (1.0 - 2.0 * config.sufficient_decrease * alpha) * cur.rnorm * cur.rnorm;
        }
        if (good) {
          x = std::move(xt);
          accepted = true;
          break;
        }
      }
      alpha *= config.shrink;
      ++report.damping_events;
    }
    if (!accepted) fail("line search failed at Newton iteration " + std::to_string(iteration), false);
    cur = std::move(next);
    ++report.iterations;
    report.residual_history.push_back(cur.rnorm);
  }

  for (int p = 0; p < config.polish_steps && cur.rnorm > 0.0; ++p) {
    std::optional<Vector> dx;
    try {
      dx = newton_direction(x, cur.r, 0.0);
    } catch (const DomainError&) {
      break;
    }
    if (!dx) break;
    Vector xt = x + *dx;
    Trial next = evaluate(xt);
    if (!next.ok || next.rnorm > cur.rnorm) break;
    x = std::move(xt);
    cur = std::move(next);
    report.residual_history.push_back(cur.rnorm);
    ++report.polish_steps_taken;
  }

  report.converged = true;
  report.final_residual = cur.rnorm;
  return {x, report};
}

}  // namespace dgc
