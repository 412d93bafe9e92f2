#include "dgc/experiments/experiments.hpp"

#include "dgc/experiments/oracle.hpp"
#include "dgc/parallel.hpp"
#include "dgc/shells/eigenmodes.hpp"
#include "dgc/shells/mesh_generators.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>

namespace dgc {

namespace {

double first_tau(const ExperimentConfig& c) { return c.taus.front(); }

CurvatureQuery make_query(const Point& y, const Tangent& v, const Tangent& w, double tau,
                          const ExperimentConfig& c, QuotientVariant variant) {
  CurvatureQuery q;
  q.y = y;
  q.v = v;
  q.w = w;
  q.tau = tau;
  q.beta = c.beta;
  q.variant = variant;
  return q;
}

std::string describe(const std::exception& e) { return e.what(); }

ShellMesh plate(const ExperimentConfig& c, double zeta, double eta) {
  return make_bump_plate(c.plate_resolution, zeta, eta);
}

}  // namespace

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& m) { throw InvalidArgument("config: " + m); };
  if (!std::is_sorted(taus.begin(), taus.end(), std::greater<>())) fail("tau list must be sorted descending");
  for (double t : taus)
    if (!(t > 0.0)) fail("tau values must be positive");
  if (!std::is_sorted(bending_weights.begin(), bending_weights.end(), std::greater<>()))
    fail("bending weights must be sorted descending");
  for (double m : bending_weights)
    if (!(m >= 0.0)) fail("bending weights must be non-negative");
  if (beta && !(*beta > 0.0)) fail("beta must be positive");
  if (!(torus_R > torus_r && torus_r > 0.0)) fail("torus needs R > r > 0");
  if (chart_point.size() != 2) fail("chart_point needs two coordinates");
  if (sphere_level < 0) fail("sphere_level must be >= 0");
  if (branch_level < 0) fail("branch_level must be >= 0");
  if (plate_resolution < 4) fail("plate_resolution must be >= 4");
  if (path_K < 1 || log_K < 1) fail("path lengths must be >= 1");
  if (modes < 2 || modes > 16) fail("modes must be in [2, 16]");
  if (converge_variants.empty()) fail("converge_variants is empty");
  shell.validate();

  if (experiment == "torus-map") {
    if (grid < 8) fail("torus-map grid must be >= 8");
    if (taus.empty()) fail("tau list is empty");
  } else if (experiment == "converge") {
    if (taus.size() < 5) fail("converge needs at least 5 tau values");
    if (taus.front() / taus.back() < 10.0) fail("converge tau values must span at least one decade");
    if (model != "torus" && model != "sphere-chart" && model != "flat" && model != "shells-sphere")
      fail("unknown converge model '" + model + "'");
  } else if (experiment == "bending-sweep") {
    if (bending_weights.empty()) fail("bending_weights is empty");
    if (taus.empty()) fail("tau list is empty");
  } else if (experiment == "confusion") {
    if (taus.empty()) fail("tau list is empty");
  } else if (experiment == "two-bump") {
    if (plate_resolution < 8) fail("two-bump needs plate_resolution >= 8");
    if (taus.empty()) fail("tau list is empty");
  } else if (experiment != "check") {
    fail("unknown experiment '" + experiment + "'");
  }
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "torus-map") {
    c.taus = {1e-2};
  } else if (experiment == "converge") {
    c.model = "torus";
    c.chart_point = {0.0, M_PI / 4};
    c.taus = {0.3, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005};
  } else if (experiment == "bending-sweep") {
    c.model = "shells-sphere";
    c.taus = {1e-2};
    for (double mu = 0.1; c.bending_weights.size() < 10; mu *= 0.5) c.bending_weights.push_back(mu);
  } else if (experiment == "confusion") {
    c.model = "three-branch";
    c.shell.bending_weight = 1e-2;
    c.taus = {1e-2};
  } else if (experiment == "two-bump") {
    c.model = "plate";
    c.shell.bending_weight = 1e-4;
    c.taus = {1e-2};
  }
  return c;
}

void require_oracles() {
  for (const AnalyticOracle& o : {torus_oracle(std::sqrt(2.0), 1.0), sphere_oracle()}) {
    const std::string msg = o.self_test();
    if (!msg.empty()) throw Error("oracle self-test failed for " + o.surface() + ": " + msg);
  }
}

// ---- torus-map ----

TorusMapResult run_torus_map(const ExperimentConfig& c) {
  c.validate();
  require_oracles();
  const auto model = make_embedded_model(torus_chart(c.torus_R, c.torus_r));
  const AnalyticOracle oracle = torus_oracle(c.torus_R, c.torus_r);
  TorusMapResult out;
  out.rows.resize(static_cast<size_t>(c.grid * c.grid));
  parallel_for(out.rows.size(), c.threads, [&](size_t idx) {
    TorusMapRow& row = out.rows[idx];
    row.u = 2.0 * M_PI * static_cast<double>(idx / static_cast<size_t>(c.grid)) / c.grid;
    row.v = 2.0 * M_PI * static_cast<double>(idx % static_cast<size_t>(c.grid)) / c.grid;
    row.analytic = oracle.gaussian_curvature({row.u, row.v});
    try {
      const auto rep = sectional_curvature(
          *model, make_query(Point(Eigen::Vector2d(row.u, row.v)), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1),
                             first_tau(c), c, c.variant));
      row.kappa = rep.sectional;
      row.error = row.kappa - row.analytic;
      row.valid = true;
    } catch (const std::exception& e) {
      row.message = describe(e);
    }
  });
  for (const auto& r : out.rows) {
    if (r.valid) {
      out.max_abs_error = std::max(out.max_abs_error, std::abs(r.error));
    } else {
      ++out.invalid;
    }
  }
  return out;
}

// ---- converge ----

double fit_slope(const std::vector<double>& taus, const std::vector<double>& errors) {
  std::vector<std::pair<double, double>> pts;
  for (size_t i = 0; i < taus.size(); ++i) pts.emplace_back(taus[i], errors[i]);
  std::sort(pts.begin(), pts.end(), [](auto a, auto b) { return a.first > b.first; });
  std::vector<double> x, y;
  for (size_t i = 2; i < pts.size(); ++i) {
    if (std::isfinite(pts[i].second) && pts[i].second > 0.0) {
      x.push_back(std::log10(pts[i].first));
      y.push_back(std::log10(pts[i].second));
    }
  }
  if (x.size() < 2) return std::nan("");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

ConvergenceResult run_convergence(const ExperimentConfig& c) {
  c.validate();
  require_oracles();

  std::shared_ptr<const EnergyModel> model;
  Point y;
  Tangent v, w;
  std::optional<double> exact;
  if (c.model == "torus" || c.model == "sphere-chart") {
    const bool torus = c.model == "torus";
    model = make_embedded_model(torus ? torus_chart(c.torus_R, c.torus_r) : sphere_chart());
    y = Eigen::Vector2d(c.chart_point[0], c.chart_point[1]);
    v = Eigen::Vector2d(1, 0);
    w = Eigen::Vector2d(0, 1);
    const AnalyticOracle o = torus ? torus_oracle(c.torus_R, c.torus_r) : sphere_oracle();
    exact = o.gaussian_curvature(y);
  } else if (c.model == "flat") {
    model = make_flat_model(3);
    y = Eigen::Vector3d(0.3, -0.2, 0.5);
    v = Eigen::Vector3d(1, 0, 0);
    w = Eigen::Vector3d(0, 1, 0);
    exact = 0.0;
  } else {
    const ShellMesh s = make_sphere_shell(c.sphere_level);
    model = make_shell_model(s, c.shell, GaugeSpec::rigid());
    y = s.positions();
    v = stretch_direction(s, 0);
    w = stretch_direction(s, 1);
  }

  ConvergenceResult out;
  out.rows.resize(c.taus.size());
  const bool want_one = std::count(c.converge_variants.begin(), c.converge_variants.end(), QuotientVariant::one_sided);
  const bool want_central = std::count(c.converge_variants.begin(), c.converge_variants.end(), QuotientVariant::central);
  std::vector<std::pair<size_t, QuotientVariant>> jobs;
  for (size_t i = 0; i < c.taus.size(); ++i) {
    out.rows[i].tau = c.taus[i];
    if (want_one) jobs.emplace_back(i, QuotientVariant::one_sided);
    if (want_central) jobs.emplace_back(i, QuotientVariant::central);
  }
  std::vector<std::string> errors(jobs.size());
  std::vector<double> values(jobs.size(), std::nan(""));
  parallel_for(jobs.size(), c.threads, [&](size_t j) {
    const auto [i, var] = jobs[j];
    try {
      values[j] = sectional_curvature(*model, make_query(y, v, w, c.taus[i], c, var)).sectional;
    } catch (const std::exception& e) {
      errors[j] = to_string(var) + ": " + describe(e);
    }
  });
  for (size_t j = 0; j < jobs.size(); ++j) {
    auto& row = out.rows[jobs[j].first];
    (jobs[j].second == QuotientVariant::one_sided ? row.kappa_one_sided : row.kappa_central) = values[j];
    if (!errors[j].empty()) {
      row.valid = false;
      row.message += (row.message.empty() ? "" : "; ") + errors[j];
    }
  }

  // Reference: closed form, or the value at the smallest tau per variant.
  out.self_convergence = !exact.has_value();
  double ref_one = exact.value_or(out.rows.back().kappa_one_sided);
  double ref_central = exact.value_or(out.rows.back().kappa_central);
  out.reference = exact.value_or(want_central ? ref_central : ref_one);
  if (out.self_convergence && !out.rows.back().valid) {
    ref_one = ref_central = std::nan("");
  }
  auto err = [&](double k, double ref) {
    const double d = std::abs(k - ref);
    return (exact && *exact == 0.0) ? d : d / std::abs(ref);
  };
  std::vector<double> t, e1, e2;
  for (auto& row : out.rows) {
    if (!row.valid) {
      ++out.invalid;
      continue;
    }
    if (want_one) row.error_one_sided = err(row.kappa_one_sided, ref_one);
    if (want_central) row.error_central = err(row.kappa_central, ref_central);
    t.push_back(row.tau);
    e1.push_back(row.error_one_sided);
    e2.push_back(row.error_central);
  }
  if (want_one) out.slope_one_sided = fit_slope(t, e1);
  if (want_central) out.slope_central = fit_slope(t, e2);
  return out;
}

// ---- bending-sweep ----

BendingResult run_bending_sweep(const ExperimentConfig& c) {
  c.validate();
  require_oracles();
  const ShellMesh s = make_sphere_shell(c.sphere_level);
  const Tangent v = stretch_direction(s, 0), w = stretch_direction(s, 1);
  BendingResult out;
  out.rows.resize(c.bending_weights.size());
  parallel_for(out.rows.size(), c.threads, [&](size_t i) {
    BendingRow& row = out.rows[i];
    row.mu = c.bending_weights[i];
    try {
      ShellParams p = c.shell;
      p.bending_weight = row.mu;
      const ShellModel model(s, p, GaugeSpec::rigid());
      row.kappa = sectional_curvature(model, make_query(s.positions(), v, w, first_tau(c), c, c.variant)).sectional;
      row.valid = true;
    } catch (const std::exception& e) {
      row.message = describe(e);
    }
  });
  for (const auto& r : out.rows) out.invalid += r.valid ? 0 : 1;
  return out;
}

// ---- confusion ----

ConfusionResult run_confusion_matrix(const ExperimentConfig& c) {
  c.validate();
  require_oracles();

  ShellMesh base = make_sphere_shell(0);
  GaugeSpec gauge = GaugeSpec::rigid();
  if (c.model == "three-branch") {
    base = make_three_branch_shape(c.branch_level);
    gauge = GaugeSpec::fixed_vertices(three_branch_foot(base));
  } else if (c.model == "plate") {
    base = plate(c, 0.0, 0.0);
    gauge = GaugeSpec::fixed_vertices(base.topology().boundary_vertices());
  } else if (c.model == "shells-sphere") {
    base = make_sphere_shell(c.sphere_level);
  } else if (c.model.size() > 4 && c.model.substr(c.model.size() - 4) == ".obj") {
    base = read_obj(c.model);
  } else {
    throw InvalidArgument("config: unknown confusion model '" + c.model + "'");
  }
  const ShellModel model(base, c.shell, gauge);

  ConfusionResult out;
  std::vector<Tangent> tangents;
  if (c.deformed_meshes.empty()) {
    for (const auto& m : hessian_eigenmodes(model, base.positions(), c.modes)) {
      out.eigenvalues.push_back(m.eigenvalue);
      tangents.push_back(m.vector);
    }
  } else {
    for (const auto& path : c.deformed_meshes) {
      const ShellMesh target = read_obj(path);
      if (target.vertex_count() != base.vertex_count()) throw DimensionError(path + ": vertex count differs from base");
      tangents.push_back(discrete_log(model, base.positions(), target.positions(), c.log_K));
    }
  }
  out.matrix = curvature_matrix(model, base.positions(), tangents, first_tau(c), c.beta, c.variant, {}, c.threads);
  for (Eigen::Index i = 0; i < out.matrix.valid.rows(); ++i)
    for (Eigen::Index j = i + 1; j < out.matrix.valid.cols(); ++j) out.invalid += out.matrix.valid(i, j) ? 0 : 1;

  std::filesystem::create_directories(c.out_dir);
  const std::string base_path = c.out_dir + "/confusion_base.obj";
  write_obj(base_path, base.topology(), base.positions());
  out.exported.push_back(base_path);
  for (size_t i = 0; i < tangents.size(); ++i) {
    const std::string path = c.out_dir + "/confusion_mode_" + std::to_string(i) + ".obj";
    try {
      const Point p = discrete_exp(model, base.positions(), c.export_sigma * tangents[i], 4);
      write_obj(path, base.topology(), p);
      out.exported.push_back(path);
    } catch (const std::exception& e) {
      out.export_errors.push_back(std::to_string(i) + ": " + describe(e));
    }
  }
  return out;
}

// ---- two-bump ----

TwoBumpResult run_two_bump(const ExperimentConfig& c) {
  c.validate();
  require_oracles();
  const ShellMesh flat = plate(c, 0.0, 0.0);
  const ShellModel model(flat, c.shell, GaugeSpec::fixed_vertices(flat.topology().boundary_vertices()));
  const int K = c.path_K;
  const Point A = plate(c, c.zeta, -c.eta).positions();
  const Point B = plate(c, -c.zeta, c.eta).positions();

  TwoBumpResult out;
  std::vector<std::optional<DiscretePath>> found(2);
  std::vector<std::string> fail(2);
  parallel_for(2, c.threads, [&](size_t order) {
    // Flip one bump over the first half of the path and the other over the second half.
    DiscretePath init;
    init.K = K;
    for (int k = 0; k <= K; ++k) {
      const double s = 2.0 * k / K;
      const double first = std::min(s, 1.0), second = std::max(s - 1.0, 0.0);
      const double fz = order == 0 ? first : second, fe = order == 0 ? second : first;
      init.points.push_back(plate(c, c.zeta * (1 - 2 * fz), -c.eta * (1 - 2 * fe)).positions());
    }
    try {
      found[order] = geodesic_bvp(model, A, B, K, init);
    } catch (const std::exception& e) {
      fail[order] = describe(e);
    }
  });
  for (size_t i = 0; i < 2; ++i) {
    if (found[i]) out.paths.push_back(*found[i]);
    if (!fail[i].empty()) out.failures.push_back((i == 0 ? "left first: " : "right first: ") + fail[i]);
  }
  if (out.paths.size() == 2) {
    const double e0 = out.paths[0].energy, e1 = out.paths[1].energy;
    const double top = std::max(e0, e1);
    out.energy_gap = top > 0.0 ? std::abs(e0 - e1) / top : 0.0;
    double gap = 0.0;
    for (int k = 0; k <= K; ++k) {
      const Vector d = out.paths[0].points[static_cast<size_t>(k)] - out.paths[1].points[static_cast<size_t>(k)];
      for (Eigen::Index v = 0; v < d.size() / 3; ++v) gap = std::max(gap, d.segment<3>(3 * v).norm());
    }
    out.max_gap = gap;
    // plate width is 1
    out.distinct = gap > 1e-3;
  }

  try {
    out.curvature = sectional_curvature(
        model, make_query(flat.positions(), bump_direction(c.plate_resolution, 0),
                          bump_direction(c.plate_resolution, 1), first_tau(c), c, c.variant));
    out.curvature_valid = true;
  } catch (const std::exception& e) {
    out.curvature_message = describe(e);
  }
  return out;
}

// ---- check ----

std::vector<CheckLine> run_check(const ExperimentConfig& c) {
  std::vector<CheckLine> lines;
  {
    CheckLine l{"oracle self-tests", 0.0, 0.0, true};
    try {
      require_oracles();
    } catch (const std::exception&) {
      l.value = 1.0;
      l.pass = false;
    }
    lines.push_back(l);
  }

  std::mt19937 rng(c.seed);
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto gauss = [&](Eigen::Index d, double s) {
    Vector x(d);
    for (Eigen::Index i = 0; i < d; ++i) x[i] = s * N(rng);
    return x;
  };

  struct Case {
    std::string name;
    std::shared_ptr<const EnergyModel> model;
    std::function<Point()> sample;
  };
  const ShellMesh sphere = make_sphere_shell(1);
  std::vector<Case> cases{
      {"flat", make_flat_model(3), [&] { return Point(gauss(3, 1.0)); }},
      {"torus", make_embedded_model(torus_chart(c.torus_R, c.torus_r)),
       [&] { return Point(Eigen::Vector2d(2 * M_PI * U(rng), 2 * M_PI * U(rng))); }},
      {"sphere-chart", make_embedded_model(sphere_chart()),
       [&] { return Point(Eigen::Vector2d(0.3 + (M_PI - 0.6) * U(rng), 2 * M_PI * U(rng))); }},
      {"shells", make_shell_model(sphere, ShellParams{}, GaugeSpec::rigid()),
       [&] { return Point(sphere.positions() + gauss(sphere.positions().size(), 0.03)); }},
  };

  for (const auto& cs : cases) {
    IdentityReport worst;
    for (int i = 0; i < 100; ++i) {
      const Point y = cs.sample();
      const Eigen::Index d = cs.model->dimension();
      const auto rep = check_consistency_identities(*cs.model, y, {{gauss(d, 1.0), gauss(d, 1.0)}});
      worst.energy_on_diagonal = std::max(worst.energy_on_diagonal, rep.energy_on_diagonal);
      worst.grad1_on_diagonal = std::max(worst.grad1_on_diagonal, rep.grad1_on_diagonal);
      worst.grad2_on_diagonal = std::max(worst.grad2_on_diagonal, rep.grad2_on_diagonal);
      worst.hess11_plus_hess12 = std::max(worst.hess11_plus_hess12, rep.hess11_plus_hess12);
      worst.hess11_minus_hess22 = std::max(worst.hess11_minus_hess22, rep.hess11_minus_hess22);
      worst.hess12_symmetry = std::max(worst.hess12_symmetry, rep.hess12_symmetry);
      worst.third_order = std::max(worst.third_order, rep.third_order);
    }
    auto add = [&](const std::string& what, double value, double tol) {
      lines.push_back({cs.name + ": " + what, value, tol, value <= tol});
    };
    add("W(y,y)", worst.energy_on_diagonal, 1e-8);
    add("W_1(y,y)", worst.grad1_on_diagonal, 1e-8);
    add("W_2(y,y)", worst.grad2_on_diagonal, 1e-8);
    add("W_11 + W_12", worst.hess11_plus_hess12, 1e-8);
    add("W_11 - W_22", worst.hess11_minus_hess22, 1e-8);
    add("W_12 - W_21", worst.hess12_symmetry, 1e-8);
    add("diagonal derivative of the Hessian identities", worst.third_order, 1e-5);
  }
  return lines;
}

}  // namespace dgc
