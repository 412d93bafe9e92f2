#include "dgc/experiments/io.hpp"

#include "dgc/shells/mesh_generators.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace dgc {

using nlohmann::json;

namespace {

json variant_list(const std::vector<QuotientVariant>& vs) {
  json a = json::array();
  for (auto v : vs) a.push_back(to_string(v));
  return a;
}

// NaN is not representable in JSON; write null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json to_json(const ExperimentConfig& c) {
  json j;
  j["experiment"] = c.experiment;
  j["model"] = c.model;
  j["torus_R"] = c.torus_R;
  j["torus_r"] = c.torus_r;
  j["grid"] = c.grid;
  j["chart_point"] = c.chart_point;
  j["sphere_level"] = c.sphere_level;
  j["mu_mem"] = c.shell.mu_mem;
  j["lambda_mem"] = c.shell.lambda_mem;
  j["bending_weight"] = c.shell.bending_weight;
  j["bending_weights"] = c.bending_weights;
  j["plate_resolution"] = c.plate_resolution;
  j["zeta"] = c.zeta;
  j["eta"] = c.eta;
  j["path_K"] = c.path_K;
  j["branch_level"] = c.branch_level;
  j["modes"] = c.modes;
  j["deformed_meshes"] = c.deformed_meshes;
  j["log_K"] = c.log_K;
  j["export_sigma"] = c.export_sigma;
  j["taus"] = c.taus;
  j["beta"] = c.beta ? json(*c.beta) : json(nullptr);
  j["variant"] = to_string(c.variant);
  j["converge_variants"] = variant_list(c.converge_variants);
  j["out_dir"] = c.out_dir;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  return j;
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  static const std::set<std::string> known = {
      "experiment", "model", "torus_R", "torus_r", "grid", "chart_point", "sphere_level", "mu_mem", "lambda_mem",
      "bending_weight", "bending_weights", "plate_resolution", "zeta", "eta", "path_K", "branch_level", "modes",
      "deformed_meshes", "log_K", "export_sigma", "taus", "beta", "variant", "converge_variants", "out_dir", "seed",
      "threads"};
  for (const auto& [k, _] : j.items())
    if (!known.count(k)) throw InvalidArgument("config: unknown key '" + k + "'");
  try {
    auto get = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    get("experiment", c.experiment);
    get("model", c.model);
    get("torus_R", c.torus_R);
    get("torus_r", c.torus_r);
    get("grid", c.grid);
    get("chart_point", c.chart_point);
    get("sphere_level", c.sphere_level);
    get("mu_mem", c.shell.mu_mem);
    get("lambda_mem", c.shell.lambda_mem);
    get("bending_weight", c.shell.bending_weight);
    get("bending_weights", c.bending_weights);
    get("plate_resolution", c.plate_resolution);
    get("zeta", c.zeta);
    get("eta", c.eta);
    get("path_K", c.path_K);
    get("branch_level", c.branch_level);
    get("modes", c.modes);
    get("deformed_meshes", c.deformed_meshes);
    get("log_K", c.log_K);
    get("export_sigma", c.export_sigma);
    get("taus", c.taus);
    get("out_dir", c.out_dir);
    get("seed", c.seed);
    get("threads", c.threads);
    if (j.contains("beta")) {
      c.beta = j["beta"].is_null() ? std::nullopt : std::optional<double>(j["beta"].get<double>());
    }
    if (j.contains("variant")) c.variant = parse_variant(j["variant"].get<std::string>());
    if (j.contains("converge_variants")) {
      c.converge_variants.clear();
      for (const auto& v : j["converge_variants"]) c.converge_variants.push_back(parse_variant(v.get<std::string>()));
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument(path + ": " + e.what());
  }
  return config_from_json(j, std::move(base));
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void ensure_directory(const std::string& dir) { std::filesystem::create_directories(dir); }

CsvWriter::CsvWriter(const std::string& path, const ExperimentConfig& config, const std::vector<std::string>& columns)
    : f_(std::fopen(path.c_str(), "w")), columns_(columns.size()) {
  if (!f_) throw Error("cannot write " + path);
  std::fprintf(f_, "# config: %s\n", to_json(config).dump().c_str());
  row(columns);
}

CsvWriter::~CsvWriter() { std::fclose(f_); }

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw Error("CSV row has the wrong number of cells");
  for (size_t i = 0; i < cells.size(); ++i) {
    std::string cell = cells[i];
    if (cell.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char ch : cell) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      cell = q + "\"";
    }
    std::fprintf(f_, "%s%s", i ? "," : "", cell.c_str());
  }
  std::fprintf(f_, "\n");
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

json to_json(const CurvatureReport& r) {
  json j;
  j["sectional"] = num(r.sectional);
  j["numerator"] = num(r.numerator);
  j["denominator"] = num(r.denominator);
  j["tau"] = r.query.tau;
  j["beta"] = r.query.beta ? json(*r.query.beta) : json(nullptr);
  j["variant"] = to_string(r.query.variant);
  j["inverse_transports"] = r.inverse_transports;
  j["seconds"] = r.seconds;
  return j;
}

json to_json(const TorusMapResult& r) {
  return {{"max_abs_error", r.max_abs_error}, {"invalid", r.invalid}, {"points", r.rows.size()}};
}

json to_json(const ConvergenceResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"tau", row.tau},
                    {"kappa_one_sided", num(row.kappa_one_sided)},
                    {"kappa_central", num(row.kappa_central)},
                    {"rel_error_one_sided", num(row.error_one_sided)},
                    {"rel_error_central", num(row.error_central)},
                    {"valid", row.valid}});
  }
  return {{"reference", r.reference},
          {"self_convergence", r.self_convergence},
          {"slope_one_sided", num(r.slope_one_sided)},
          {"slope_central", num(r.slope_central)},
          {"invalid", r.invalid},
          {"rows", rows}};
}

json to_json(const BendingResult& r) {
  json rows = json::array();
  for (const auto& row : r.rows) rows.push_back({{"mu", row.mu}, {"kappa", num(row.kappa)}, {"valid", row.valid}});
  return {{"rows", rows}, {"invalid", r.invalid}};
}

json to_json(const ConfusionResult& r) {
  json m = json::array();
  for (Eigen::Index i = 0; i < r.matrix.values.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < r.matrix.values.cols(); ++j) row.push_back(num(r.matrix.values(i, j)));
    m.push_back(row);
  }
  return {{"kappa", m},
          {"clamp_level", r.matrix.clamp_level},
          {"eigenvalues", r.eigenvalues},
          {"errors", r.matrix.errors},
          {"exported", r.exported},
          {"export_errors", r.export_errors},
          {"invalid", r.invalid}};
}

json to_json(const TwoBumpResult& r) {
  json energies = json::array();
  for (const auto& p : r.paths) energies.push_back(p.energy);
  json j{{"energies", energies},
         {"failures", r.failures},
         {"relative_energy_gap", num(r.energy_gap)},
         {"max_path_gap", num(r.max_gap)},
         {"distinct", r.distinct},
         {"curvature_valid", r.curvature_valid}};
  if (!r.distinct && r.paths.size() == 2) j["flag"] = "nonuniqueness-not-found";
  if (r.curvature_valid) {
    j["curvature"] = to_json(r.curvature);
  } else {
    j["curvature_error"] = r.curvature_message;
  }
  return j;
}

void write_outputs(const ExperimentConfig& c, const TorusMapResult& r) {
  ensure_directory(c.out_dir);
  CsvWriter csv(join_path(c.out_dir, "torus_map.csv"), c, {"u", "v", "kappa", "K_analytic", "error", "valid"});
  for (const auto& row : r.rows)
    csv.row({fmt(row.u), fmt(row.v), fmt(row.kappa), fmt(row.analytic), fmt(row.error), row.valid ? "1" : "0"});
  csv.row({"max_abs_error", "", "", "", fmt(r.max_abs_error), r.invalid ? "0" : "1"});
  write_json(join_path(c.out_dir, "torus_map.json"), to_json(r));
}

void write_outputs(const ExperimentConfig& c, const ConvergenceResult& r) {
  ensure_directory(c.out_dir);
  CsvWriter csv(join_path(c.out_dir, "convergence.csv"), c,
                {"tau", "kappa_one_sided", "kappa_central", "rel_error_one_sided", "rel_error_central", "valid"});
  for (const auto& row : r.rows) {
    csv.row({fmt(row.tau), fmt(row.kappa_one_sided), fmt(row.kappa_central), fmt(row.error_one_sided),
             fmt(row.error_central), row.valid ? "1" : "0"});
  }
  csv.row({"slope", "", "", fmt(r.slope_one_sided), fmt(r.slope_central), ""});
  write_json(join_path(c.out_dir, "convergence.json"), to_json(r));
}

void write_outputs(const ExperimentConfig& c, const BendingResult& r) {
  ensure_directory(c.out_dir);
  CsvWriter csv(join_path(c.out_dir, "bending_sweep.csv"), c, {"mu", "kappa", "valid"});
  for (const auto& row : r.rows) csv.row({fmt(row.mu), fmt(row.kappa), row.valid ? "1" : "0"});
  write_json(join_path(c.out_dir, "bending_sweep.json"), to_json(r));
}

void write_outputs(const ExperimentConfig& c, const ConfusionResult& r) {
  ensure_directory(c.out_dir);
  CsvWriter csv(join_path(c.out_dir, "confusion.csv"), c, {"i", "j", "kappa", "clamped", "valid"});
  const auto& m = r.matrix;
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      if (i == j) continue;
      csv.row({std::to_string(i), std::to_string(j), fmt(m.values(i, j)), fmt(m.clamped(i, j)),
               m.valid(i, j) ? "1" : "0"});
    }
  }
  write_json(join_path(c.out_dir, "confusion.json"), to_json(r));
}

void write_outputs(const ExperimentConfig& c, const TwoBumpResult& r) {
  ensure_directory(c.out_dir);
  write_json(join_path(c.out_dir, "two_bump.json"), to_json(r));
  CsvWriter csv(join_path(c.out_dir, "two_bump.csv"), c, {"quantity", "value"});
  for (size_t i = 0; i < r.paths.size(); ++i) csv.row({"energy_" + std::to_string(i), fmt(r.paths[i].energy)});
  csv.row({"relative_energy_gap", fmt(r.energy_gap)});
  csv.row({"max_path_gap", fmt(r.max_gap)});
  csv.row({"kappa_flat", r.curvature_valid ? fmt(r.curvature.sectional) : "nan"});
  const ShellMesh flat = make_bump_plate(c.plate_resolution, 0.0, 0.0);
  for (size_t i = 0; i < r.paths.size(); ++i) {
    for (size_t k = 0; k < r.paths[i].points.size(); ++k) {
      write_obj(join_path(c.out_dir, "two_bump_path" + std::to_string(i) + "_" + std::to_string(k) + ".obj"),
                flat.topology(), r.paths[i].points[k]);
    }
  }
}

void write_outputs(const ExperimentConfig& c, const std::vector<CheckLine>& r) {
  ensure_directory(c.out_dir);
  CsvWriter csv(join_path(c.out_dir, "check.csv"), c, {"check", "value", "tolerance", "pass"});
  for (const auto& l : r) csv.row({l.name, fmt(l.value), fmt(l.tolerance), l.pass ? "1" : "0"});
}

}  // namespace dgc
