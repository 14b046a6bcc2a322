#pragma once

#include <string>

#include "nehari/presets.hpp"

namespace nehari {

/// Parsed run configuration: a complete SystemSpec (domain included), the
/// grid size, solver knobs, and the run block.
struct RunConfig {
  std::string preset;  // exterior | yamabe | brezis_nirenberg | custom
  SystemSpec system;
  int grid_n = 0;
  DescentConfig solver;
  std::string mode = "solve";  // solve | multistart | verify | bubble-scan
  int k = 1;

  struct BubbleBlock {
    double mu = 1.0;
    double cutoff = 0.5;
    std::vector<double> eps;
    std::vector<double> betas;
  } bubble;
};

/// Parses and schema-validates a JSON config document. Error messages name
/// the offending field path; throws DomainError.
RunConfig parse_config(const std::string& text);

/// Canonical re-serialization; parse(serialize(c)) reproduces c.
std::string serialize_config(const RunConfig& c);

/// Builds the space and validated spec for the configured preset.
Preset make_preset(const RunConfig& c);

}  // namespace nehari
