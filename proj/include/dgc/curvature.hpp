#pragma once

#include "dgc/energy_model.hpp"
#include "dgc/newton.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dgc {

enum class QuotientVariant { one_sided, central };

std::string to_string(QuotientVariant v);
QuotientVariant parse_variant(const std::string& s);  // "one-sided" | "central"

/// Smallest admissible inner exponent: 2 (one-sided), 3/2 (central).
double default_beta(QuotientVariant v);

struct CurvatureQuery {
  Point y;
  Tangent v;
  Tangent w;
  std::optional<Tangent> z;  // defaults to w
  double tau = 1e-2;
  std::optional<double> beta;  // defaults to default_beta(variant)
  QuotientVariant variant = QuotientVariant::central;
};

struct CurvatureOptions {
  std::optional<NewtonConfig> newton;
  double tau_floor = 1e-4;  // applies to the outer step only
  double tau_max = 1.0;
};

class DegeneratePlaneError : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

struct CurvatureReport {
  Tangent tensor_vector;  // R(v,w)z
  double sectional = 0.0;
  double numerator = 0.0;    // g(v, R(v,w)w)
  double denominator = 0.0;  // g(v,v) g(w,w) - g(v,w)^2
  CurvatureQuery query;      // with z and beta filled in
  int inverse_transports = 0;
  double seconds = 0.0;
};

/// R(v,w)z = Cov_v^tau (Cov_w^{tau^beta} z) - Cov_w^tau (Cov_v^{tau^beta} z) with z a constant field.
Tangent curvature_tensor(const EnergyModel& model, const CurvatureQuery& query, const CurvatureOptions& options = {});

CurvatureReport sectional_curvature(const EnergyModel& model, const CurvatureQuery& query,
                                    const CurvatureOptions& options = {});

struct CurvatureMatrix {
  DenseMatrix values;  // NaN on the diagonal and at invalid entries
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> valid;
  std::vector<std::string> errors;  // "i,j: message"
  double clamp_level = 0.0;         // 90th percentile of |kappa_ij| over valid i < j
  DenseMatrix clamped;              // min(clamp_level, |kappa_ij|)
};

/// Pairwise sectional curvatures; each unordered pair is computed once and mirrored.
CurvatureMatrix curvature_matrix(const EnergyModel& model, const Point& y, const std::vector<Tangent>& tangents,
                                 double tau, std::optional<double> beta, QuotientVariant variant,
                                 const CurvatureOptions& options = {}, unsigned threads = 1);

/// Linear-interpolation percentile (q in [0, 100]) of a non-empty sample.
double percentile(std::vector<double> values, double q);

}  // namespace dgc
