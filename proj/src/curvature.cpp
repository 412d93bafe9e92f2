#include "dgc/curvature.hpp"

#include "dgc/parallel.hpp"
#include "dgc/transport.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace dgc {

std::string to_string(QuotientVariant v) { return v == QuotientVariant::central ? "central" : "one-sided"; }

QuotientVariant parse_variant(const std::string& s) {
  if (s == "central") return QuotientVariant::central;
  if (s == "one-sided" || s == "one_sided") return QuotientVariant::one_sided;
  throw InvalidArgument("unknown variant '" + s + "' (expected one-sided or central)");
}

double default_beta(QuotientVariant v) { return v == QuotientVariant::central ? 1.5 : 2.0; }

namespace {

CurvatureQuery resolved(const EnergyModel& model, const CurvatureQuery& q, const CurvatureOptions& opt) {
  const Eigen::Index d = model.dimension();
  require_dimension(q.y, d, "curvature base point");
  require_dimension(q.v, d, "curvature direction v");
  require_dimension(q.w, d, "curvature direction w");
  CurvatureQuery r = q;
  if (!r.z) r.z = q.w;
  require_dimension(*r.z, d, "curvature argument z");
  if (!r.beta) r.beta = default_beta(q.variant);
  if (!(q.tau >= opt.tau_floor && q.tau <= opt.tau_max)) {
    throw InvalidArgument("tau = " + std::to_string(q.tau) + " outside [" + std::to_string(opt.tau_floor) + ", " +
                          std::to_string(opt.tau_max) + "]");
  }
  if (*r.beta < default_beta(q.variant)) {
    throw InvalidArgument("beta = " + std::to_string(*r.beta) + " below the minimum " +
                          std::to_string(default_beta(q.variant)) + " for the " + to_string(q.variant) + " variant");
  }
  return r;
}

Tangent quotient(const EnergyModel& model, QuotientVariant variant, const Point& y, const Tangent& dir,
                 const VectorField& field, double tau, const QuotientOptions& opt) {
  return variant == QuotientVariant::central ? cov_quotient_central(model, y, dir, field, tau, opt)
                                             : cov_quotient_one_sided(model, y, dir, field, tau, opt);
}

// Cov_outer^tau (Cov_inner^{tau^beta} z) at y.
Tangent nested(const EnergyModel& model, const CurvatureQuery& q, const Tangent& outer, const Tangent& inner,
               const char* outer_name, const char* inner_name, const CurvatureOptions& opt) {
  const double tau_in = std::pow(q.tau, *q.beta);
  QuotientOptions inner_opt{opt.newton, 0.0};
  QuotientOptions outer_opt{opt.newton, opt.tau_floor};
  const Tangent z = *q.z;
  VectorField constant = [z](const Point&) { return z; };
  VectorField inner_field = [&](const Point& p) -> Tangent {
    try {
      return quotient(model, q.variant, p, inner, constant, tau_in, inner_opt);
    } catch (const SolverError& e) {
      rethrow_tagged(e, std::string("inner quotient along ") + inner_name + " at offset |p - y| = " +
                            std::to_string((p - q.y).norm()));
    }
  };
  try {
    return quotient(model, q.variant, q.y, outer, inner_field, q.tau, outer_opt);
  } catch (const SolverError& e) {
    rethrow_tagged(e, std::string("outer quotient along ") + outer_name);
  }
}

}  // namespace

Tangent curvature_tensor(const EnergyModel& model, const CurvatureQuery& query, const CurvatureOptions& options) {
  const CurvatureQuery q = resolved(model, query, options);
  const Tangent a = nested(model, q, q.v, q.w, "v", "w", options);
  const Tangent b = nested(model, q, q.w, q.v, "w", "v", options);
  return a - b;
}

CurvatureReport sectional_curvature(const EnergyModel& model, const CurvatureQuery& query,
                                    const CurvatureOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  CurvatureReport rep;
  rep.query = resolved(model, query, options);
  rep.query.z = query.w;
  const MetricOperator g = metric_operator(model, rep.query.y);
  const Tangent& v = rep.query.v;
  const Tangent& w = rep.query.w;
  const double gvv = g(v, v), gww = g(w, w), gvw = g(v, w);
  rep.denominator = gvv * gww - gvw * gvw;
  const double s = model.metric_scale();
  if (!(rep.denominator >= 1e-10 * v.squaredNorm() * w.squaredNorm() * s * s)) {
    throw DegeneratePlaneError("v and w span a degenerate plane (Gram determinant " +
                               std::to_string(rep.denominator) + ")");
  }
  rep.tensor_vector = curvature_tensor(model, rep.query, options);
  rep.numerator = g(v, rep.tensor_vector);
  rep.sectional = rep.numerator / rep.denominator;
  // Each of the two nested terms calls the outer quotient once; every field
  // evaluation of the outer quotient is an inner quotient.
  const int per_quotient = rep.query.variant == QuotientVariant::central ? 2 : 1;
  rep.inverse_transports = 2 * (per_quotient + 2 * per_quotient);
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

CurvatureMatrix curvature_matrix(const EnergyModel& model, const Point& y, const std::vector<Tangent>& tangents,
                                 double tau, std::optional<double> beta, QuotientVariant variant,
                                 const CurvatureOptions& options, unsigned threads) {
  const Eigen::Index n = static_cast<Eigen::Index>(tangents.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CurvatureMatrix out;
  out.values = DenseMatrix::Constant(n, n, nan);
  out.valid.setConstant(n, n, false);

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> value(pairs.size(), nan);
  std::vector<std::string> error(pairs.size());
  parallel_for(pairs.size(), threads, [&](size_t k) {
    const auto [i, j] = pairs[k];
    const Tangent& a = tangents[static_cast<size_t>(i)];
    const Tangent& b = tangents[static_cast<size_t>(j)];
    // kappa(v,w) and kappa(w,v) agree only up to discretization error; orient
    // each pair by content so that relabeling the tangents permutes the matrix exactly.
    const bool swap = std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
    CurvatureQuery q;
    q.y = y;
    q.v = swap ? b : a;
    q.w = swap ? a : b;
    q.tau = tau;
    q.beta = beta;
    q.variant = variant;
    try {
      value[k] = sectional_curvature(model, q, options).sectional;
    } catch (const Error& e) {
      error[k] = e.what();
    }
  });

  std::vector<double> magnitudes;
  for (size_t k = 0; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    if (!error[k].empty() || !std::isfinite(value[k])) {
      out.errors.push_back(std::to_string(i) + "," + std::to_string(j) + ": " +
                           (error[k].empty() ? std::string("non-finite value") : error[k]));
      continue;
    }
    out.values(i, j) = out.values(j, i) = value[k];
    out.valid(i, j) = out.valid(j, i) = true;
    magnitudes.push_back(std::abs(value[k]));
  }
  out.clamp_level = magnitudes.empty() ? nan : percentile(magnitudes, 90.0);
  out.clamped = out.values.cwiseAbs().cwiseMin(out.clamp_level);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!out.valid(i, j)) out.clamped(i, j) = nan;
    }
  }
  return out;
}

}  // namespace dgc
