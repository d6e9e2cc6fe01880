#pragma once

#include "vw/report.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vw {

struct ExampleInfo {
  std::string name;
  std::string pipeline;
  std::string description;
};

const std::vector<ExampleInfo>& examples();

// Default configuration of a built-in system. Throws ConfigError for an
// unknown name.
RunConfig example_config(const std::string& name);

struct PipelineResult {
  Json report;     // meta block not yet attached
  Json constants;
  std::optional<Trajectory> trajectory;
  Status status = Status::Inconclusive;
};

// Runs one pipeline; library errors propagate.
PipelineResult run_pipeline(const RunConfig& cfg);

int exit_code(Status s);

struct RunOutcome {
  int exit_code = 3;
  std::string message;
  std::vector<std::string> written;
  Json report;
};

// run_pipeline plus artifact writing: report.json, trajectory.csv and
// constants.json under cfg.output. Exit codes: 0 pass, 1 fail, 2
// inconclusive, 3 configuration or hypothesis error (nothing written).
RunOutcome run(const RunConfig& cfg);

}  // namespace vw
