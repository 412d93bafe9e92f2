#pragma once

#include "dgc/curvature.hpp"
#include "dgc/geodesic.hpp"
#include "dgc/shells/shell_model.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace dgc {

struct ExperimentConfig {
  std::string experiment;  // torus-map, converge, bending-sweep, confusion, two-bump, check
  std::string model = "torus";  // converge: torus, sphere-chart, flat, shells-sphere

  double torus_R = std::sqrt(2.0);
  double torus_r = 1.0;
  int grid = 16;
  std::vector<double> chart_point{0.0, 0.0};  // converge on a chart model

  int sphere_level = 2;
  ShellParams shell;
  std::vector<double> bending_weights;  // bending-sweep, descending

  int plate_resolution = 8;
  double zeta = 0.15;
  double eta = 0.15;
  int path_K = 4;

  int branch_level = 2;
  int modes = 8;
  std::vector<std::string> deformed_meshes;  // confusion: tangents via discrete_log instead of eigenmodes
  int log_K = 8;
  double export_sigma = 0.1;  // modes have Euclidean length sqrt(n)

  std::vector<double> taus;  // descending
  std::optional<double> beta;
  QuotientVariant variant = QuotientVariant::central;
  std::vector<QuotientVariant> converge_variants{QuotientVariant::one_sided, QuotientVariant::central};

  std::string out_dir = "out";
  unsigned seed = 1;
  unsigned threads = 1;

  void validate() const;
};

/// Defaults for a named experiment, sized to run on a desktop.
ExperimentConfig default_config(const std::string& experiment);

// ---- torus-map ----

struct TorusMapRow {
  double u = 0.0, v = 0.0;
  double kappa = std::nan("");
  double analytic = 0.0;
  double error = std::nan("");
  bool valid = false;
  std::string message;
};

struct TorusMapResult {
  std::vector<TorusMapRow> rows;
  double max_abs_error = 0.0;
  int invalid = 0;
};

TorusMapResult run_torus_map(const ExperimentConfig& config);

// ---- converge ----

struct ConvergenceRow {
  double tau = 0.0;
  double kappa_one_sided = std::nan("");
  double kappa_central = std::nan("");
  double error_one_sided = std::nan("");  // relative
  double error_central = std::nan("");
  bool valid = true;
  std::string message;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  double reference = 0.0;  // analytic K, or per-variant value at tau_min for shells
  bool self_convergence = false;
  double slope_one_sided = std::nan("");
  double slope_central = std::nan("");
  int invalid = 0;
};

ConvergenceResult run_convergence(const ExperimentConfig& config);

/// OLS slope of log10(error) against log10(tau), skipping the two largest tau
/// and any non-finite or zero error.
double fit_slope(const std::vector<double>& taus, const std::vector<double>& errors);

// ---- bending-sweep ----

struct BendingRow {
  double mu = 0.0;
  double kappa = std::nan("");
  bool valid = false;
  std::string message;
};

struct BendingResult {
  std::vector<BendingRow> rows;
  int invalid = 0;
};

BendingResult run_bending_sweep(const ExperimentConfig& config);

// ---- confusion ----

struct ConfusionResult {
  CurvatureMatrix matrix;
  std::vector<double> eigenvalues;  // empty when tangents come from deformed meshes
  std::vector<std::string> exported;
  std::vector<std::string> export_errors;
  int invalid = 0;
};

ConfusionResult run_confusion_matrix(const ExperimentConfig& config);

// ---- two-bump ----

struct TwoBumpResult {
  std::vector<DiscretePath> paths;  // one per flip order: left bump first, right bump first
  std::vector<std::string> failures;
  double energy_gap = std::nan("");  // |E0 - E1| / max(E0, E1)
  double max_gap = std::nan("");     // max vertex distance between the two paths
  bool distinct = false;
  CurvatureReport curvature;
  bool curvature_valid = false;
  std::string curvature_message;
};

TwoBumpResult run_two_bump(const ExperimentConfig& config);

// ---- check ----

struct CheckLine {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Oracle self-tests and the consistency identities on the flat, torus,
/// sphere-chart and coarse shell models (100 sampled points each).
std::vector<CheckLine> run_check(const ExperimentConfig& config);

/// Throws if an analytic oracle disagrees with its closed form.
void require_oracles();

}  // namespace dgc
