#include "dgc/experiments/experiments.hpp"
#include "dgc/experiments/io.hpp"
#include "dgc/shells/eigenmodes.hpp"
#include "dgc/shells/mesh_generators.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace dgc;

namespace {

std::string temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("dgc_test_" + name);
  std::filesystem::remove_all(p);
  return p.string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("slope fit skips the two largest steps") {
  std::vector<double> taus{0.5, 0.3, 0.1, 0.05, 0.01};
  std::vector<double> errs;
  for (double t : taus) errs.push_back(3.0 * t * t);
  errs[0] = 1.0;  // pre-asymptotic outliers are ignored
  errs[1] = 1e-9;
  CHECK(fit_slope(taus, errs) == doctest::Approx(2.0).epsilon(1e-12));
  errs[4] = 0.0;  // a zero (reference) error is dropped
  CHECK(fit_slope(taus, errs) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::isnan(fit_slope({0.5, 0.3, 0.1}, {1, 1, 1})));
}

TEST_CASE("config round trip through JSON") {
  ExperimentConfig c = default_config("bending-sweep");
  c.beta = 1.75;
  c.variant = QuotientVariant::one_sided;
  c.seed = 42;
  const ExperimentConfig back = config_from_json(to_json(c), default_config("check"));
  CHECK(to_json(back) == to_json(c));
  CHECK(back.bending_weights.size() == 10);

  nlohmann::json j = {{"taus", {0.1, 0.2}}};
  ExperimentConfig bad = config_from_json(j, default_config("torus-map"));
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  CHECK_THROWS_AS(config_from_json({{"tua", 0.1}}, c), InvalidArgument);
  CHECK_THROWS_AS(config_from_json({{"grid", "big"}}, c), InvalidArgument);
  CHECK_THROWS_AS(config_from_json({{"variant", "sideways"}}, c), InvalidArgument);

  ExperimentConfig conv = default_config("converge");
  conv.taus = {0.1, 0.05, 0.02, 0.015, 0.011};
  CHECK_THROWS_AS(conv.validate(), InvalidArgument);  // under one decade
  conv.taus = {0.1, 0.05, 0.02, 0.01};
  CHECK_THROWS_AS(conv.validate(), InvalidArgument);  // fewer than five
  default_config("converge").validate();
}

TEST_CASE("CSV carries the config echo") {
  ExperimentConfig c = default_config("torus-map");
  c.out_dir = temp_dir("csv");
  ensure_directory(c.out_dir);
  const std::string path = join_path(c.out_dir, "t.csv");
  {
    CsvWriter w(path, c, {"a", "b"});
    w.row({"1", "x,y"});
    CHECK_THROWS_AS(w.row({"1"}), Error);
  }
  const std::string text = read_file(path);
  const auto first = text.substr(0, text.find('\n'));
  REQUIRE(first.rfind("# config: ", 0) == 0);
  CHECK(nlohmann::json::parse(first.substr(10)) == to_json(c));
  CHECK(text.find("a,b\n1,\"x,y\"\n") != std::string::npos);
  CHECK(fmt(0.1) == "0.10000000000000001");
  CHECK(fmt(std::nan("")) == "nan");
}

TEST_CASE("torus map on a coarse grid") {
  ExperimentConfig c = default_config("torus-map");
  c.grid = 8;
  const auto r = run_torus_map(c);
  REQUIRE(r.rows.size() == 64);
  CHECK(r.invalid == 0);
  CHECK(r.max_abs_error <= 1e-3);
  // outer equator
  CHECK(r.rows[0].analytic == doctest::Approx(1.0 / (std::sqrt(2.0) + 1.0)).epsilon(1e-14));
  CHECK(r.rows[0].kappa == doctest::Approx(1.0 / (std::sqrt(2.0) + 1.0)).epsilon(1e-3));

  c.grid = 7;
  CHECK_THROWS_AS(run_torus_map(c), InvalidArgument);
}

TEST_CASE("convergence on the sphere chart and flat model") {
  ExperimentConfig c = default_config("converge");
  c.model = "sphere-chart";
  c.chart_point = {1.2, 0.3};
  const auto r = run_convergence(c);
  CHECK(r.reference == 1.0);
  CHECK(r.slope_central == doctest::Approx(2.0).epsilon(0.1));
  CHECK(r.slope_one_sided > 0.9);

  c.model = "flat";
  const auto f = run_convergence(c);
  for (const auto& row : f.rows) {
    CHECK(std::abs(row.kappa_central) <= 1e-8);
    CHECK(std::abs(row.kappa_one_sided) <= 1e-5);
  }
}

TEST_CASE("bending sweep repeats bit for bit") {
  ExperimentConfig c = default_config("bending-sweep");
  c.sphere_level = 0;
  c.bending_weights = {0.1, 0.05, 0.0};
  const auto a = run_bending_sweep(c);
  const auto b = run_bending_sweep(c);
  REQUIRE(a.rows.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(a.rows[i].valid);
    CHECK(a.rows[i].kappa == b.rows[i].kappa);
  }
  // mu = 0 is a membrane-only diagnostic row: it runs, no value is asserted
  CHECK(std::isfinite(a.rows[2].kappa));
}

TEST_CASE("confusion matrix structure and relabeling") {
  ExperimentConfig c = default_config("confusion");
  c.model = "plate";
  c.plate_resolution = 4;
  c.modes = 3;
  c.out_dir = temp_dir("confusion");
  const auto r = run_confusion_matrix(c);
  const auto& m = r.matrix;
  REQUIRE(m.values.rows() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::isnan(m.values(i, i)));
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(m.values(i, j) == m.values(j, i));
  }
  CHECK(r.invalid == 0);
  CHECK(r.exported.size() == 4);
  CHECK(std::filesystem::exists(c.out_dir + "/confusion_mode_2.obj"));

  // reversing the mode order reverses rows and columns
  const ShellMesh base = make_bump_plate(4, 0.0, 0.0);
  const ShellModel model(base, c.shell, GaugeSpec::fixed_vertices(base.topology().boundary_vertices()));
  std::vector<Tangent> t;
  for (const auto& e : hessian_eigenmodes(model, base.positions(), 3)) t.push_back(e.vector);
  std::reverse(t.begin(), t.end());
  const auto p = curvature_matrix(model, base.positions(), t, 1e-2, std::nullopt, QuotientVariant::central);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(p.values(2 - i, 2 - j) == doctest::Approx(m.values(i, j)).epsilon(1e-12));
}

TEST_CASE("two-bump with flat bumps is a constant path") {
  ExperimentConfig c = default_config("two-bump");
  c.zeta = 0.0;
  c.eta = 0.0;
  const auto r = run_two_bump(c);
  REQUIRE(r.paths.size() == 2);
  CHECK(r.paths[0].energy == 0.0);
  CHECK(r.max_gap == 0.0);
  CHECK_FALSE(r.distinct);
  CHECK(r.curvature_valid);
  CHECK(r.curvature.sectional > 0.0);
}

TEST_CASE("check suite passes") {
  const auto lines = run_check(default_config("check"));
  CHECK(lines.size() == 29);
  for (const auto& l : lines) CHECK_MESSAGE(l.pass, l.name);
}
