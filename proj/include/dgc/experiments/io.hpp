#pragma once

#include "dgc/experiments/experiments.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace dgc {

nlohmann::json to_json(const ExperimentConfig& config);

/// Applies the fields present in `j` on top of `base`; unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base);

ExperimentConfig load_config(const std::string& path, ExperimentConfig base);

/// CSV whose first line is "# config: <json>" followed by the column header.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const ExperimentConfig& config, const std::vector<std::string>& columns);
  ~CsvWriter();
  CsvWriter(const CsvWriter&) = delete;
  CsvWriter& operator=(const CsvWriter&) = delete;

  void row(const std::vector<std::string>& cells);

 private:
  std::FILE* f_;
  size_t columns_;
};

/// Shortest decimal that round-trips, "nan" for NaN.
std::string fmt(double x);

std::string join_path(const std::string& dir, const std::string& file);
void ensure_directory(const std::string& dir);

void write_json(const std::string& path, const nlohmann::json& j);

nlohmann::json to_json(const TorusMapResult& r);
nlohmann::json to_json(const ConvergenceResult& r);
nlohmann::json to_json(const BendingResult& r);
nlohmann::json to_json(const ConfusionResult& r);
nlohmann::json to_json(const TwoBumpResult& r);
nlohmann::json to_json(const CurvatureReport& r);

/// Writes the CSV (and JSON summary) products of each experiment into config.out_dir.
void write_outputs(const ExperimentConfig& config, const TorusMapResult& r);
void write_outputs(const ExperimentConfig& config, const ConvergenceResult& r);
void write_outputs(const ExperimentConfig& config, const BendingResult& r);
void write_outputs(const ExperimentConfig& config, const ConfusionResult& r);
void write_outputs(const ExperimentConfig& config, const TwoBumpResult& r);
void write_outputs(const ExperimentConfig& config, const std::vector<CheckLine>& r);

}  // namespace dgc
