// dgc: command-line front end for the curvature experiments.
//
// Exit codes: 0 success, 2 when any output row is marked invalid, 1 on a hard failure.

#include "dgc/experiments/experiments.hpp"
#include "dgc/experiments/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <sstream>

using namespace dgc;

namespace {

struct Flags {
  std::string config;
  std::string taus;
  std::optional<double> beta;
  std::string variant;
  std::string out;
  std::optional<unsigned> threads;
};

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw InvalidArgument("--tau: cannot parse '" + item + "'");
    out.push_back(x);
  }
  return out;
}

ExperimentConfig resolve(const std::string& name, const Flags& f) {
  ExperimentConfig c = default_config(name);
  if (!f.config.empty()) c = load_config(f.config, c);
  c.experiment = name;
  if (!f.taus.empty()) c.taus = parse_list(f.taus);
  if (f.beta) c.beta = f.beta;
  if (!f.variant.empty()) c.variant = parse_variant(f.variant);
  if (!f.out.empty()) c.out_dir = f.out;
  if (f.threads) c.threads = *f.threads;
  c.validate();
  return c;
}

int run(const std::string& name, const ExperimentConfig& c) {
  if (name == "torus-map") {
    const auto r = run_torus_map(c);
    write_outputs(c, r);
    std::printf("torus-map: %zu points, max |error| %.3e, invalid %d\n", r.rows.size(), r.max_abs_error, r.invalid);
    return r.invalid ? 2 : 0;
  }
  if (name == "converge") {
    const auto r = run_convergence(c);
    write_outputs(c, r);
    for (const auto& row : r.rows) {
      std::printf("tau %-8g one-sided %-14.8g (%.3e)  central %-14.8g (%.3e)%s\n", row.tau, row.kappa_one_sided,
                  row.error_one_sided, row.kappa_central, row.error_central, row.valid ? "" : "  INVALID");
    }
    std::printf("slope one-sided %.3f, central %.3f\n", r.slope_one_sided, r.slope_central);
    return r.invalid ? 2 : 0;
  }
  if (name == "bending-sweep") {
    const auto r = run_bending_sweep(c);
    write_outputs(c, r);
    for (const auto& row : r.rows) std::printf("mu %-12g kappa %.8g%s\n", row.mu, row.kappa, row.valid ? "" : "  INVALID");
    return r.invalid ? 2 : 0;
  }
  if (name == "confusion") {
    const auto r = run_confusion_matrix(c);
    write_outputs(c, r);
    const auto& m = r.matrix.values;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) std::printf("%11.4g", m(i, j));
      std::printf("\n");
    }
    for (const auto& e : r.matrix.errors) std::printf("error %s\n", e.c_str());
    for (const auto& e : r.export_errors) std::printf("export failed %s\n", e.c_str());
    return r.invalid ? 2 : 0;
  }
  if (name == "two-bump") {
    const auto r = run_two_bump(c);
    write_outputs(c, r);
    for (size_t i = 0; i < r.paths.size(); ++i) std::printf("path %zu energy %.10g\n", i, r.paths[i].energy);
    for (const auto& f : r.failures) std::printf("failed %s\n", f.c_str());
    std::printf("max path gap %.4g, distinct %s\n", r.max_gap, r.distinct ? "yes" : "no (nonuniqueness-not-found)");
    if (r.curvature_valid) {
      std::printf("kappa at the flat plate %.8g\n", r.curvature.sectional);
    } else {
      std::printf("curvature failed: %s\n", r.curvature_message.c_str());
    }
    return (r.paths.size() == 2 && r.curvature_valid) ? 0 : 2;
  }
  const auto lines = run_check(c);
  write_outputs(c, lines);
  bool ok = true;
  for (const auto& l : lines) {
    std::printf("%s %-55s %.3e (tol %.0e)\n", l.pass ? "ok  " : "FAIL", l.name.c_str(), l.value, l.tolerance);
    ok = ok && l.pass;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete sectional curvature experiments"};
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"torus-map", "Gaussian curvature map on a torus against the closed form"},
      {"converge", "tau-convergence of the one-sided and central curvature"},
      {"bending-sweep", "curvature of the stretched sphere shell against the bending weight"},
      {"confusion", "sectional curvatures between pairs of Hessian eigenmodes"},
      {"two-bump", "two competing geodesics and the curvature at the flat plate"},
      {"check", "oracle self-tests and consistency identities"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", f.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--tau", f.taus, "comma-separated tau list, descending");
    sub->add_option("--beta", f.beta, "inner step exponent");
    sub->add_option("--variant", f.variant, "one-sided or central")->check(CLI::IsMember({"one-sided", "central"}));
    sub->add_option("--out", f.out, "output directory");
    sub->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  }
  CLI11_PARSE(app, argc, argv);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return run(name, resolve(name, f));
  } catch (const std::exception& e) {
    std::fprintf(stderr, "dgc %s: %s\n", name.c_str(), e.what());
    return 1;
  }
}
