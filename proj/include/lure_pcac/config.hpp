#pragma once

#include <map>
#include <string>
#include <vector>

#include "lure_pcac/lure.hpp"
#include "lure_pcac/stability.hpp"

namespace lure_pcac {

/// Flat dotted-key configuration: `section.key = value` lines. Values are
/// scalars, booleans, bracketed vectors/matrices, or the shape-free matrix
/// forms `eye`, `ones`, `zeros`, `first_block`, each optionally scaled as
/// `eye * 1e-4` (dimensions are inferred from context when built).
using ConfigMap = std::map<std::string, std::string>;

/// Parses a config file. Blank lines and `#` comments are ignored.
ConfigMap parse_config_file(const std::string& path);

/// Parses config text (same grammar as a file).
ConfigMap parse_config_text(const std::string& text);

/// Applies `key=value` override strings on top of an existing map.
void apply_overrides(ConfigMap& map, const std::vector<std::string>& overrides);

/// A fully resolved run: the simulation itself plus the analysis inputs.
struct FullConfig {
  SimulationConfig sim;
  SectorSpec sector;
  Eigen::Index grid_size = 2048;
  std::string checkpoint_policy = "engaged";  // engaged | all | none | explicit
  std::vector<long> explicit_checkpoints;
  long checkpoint_stride = 1;
  double probe_box = 20.0;
  long probe_points = 10000;  // total probe count for sector checks
};

/// Builds and validates a FullConfig. Throws std::invalid_argument naming
/// the offending key for unknown keys or invariant violations.
FullConfig build_config(const ConfigMap& map);

/// Materializes the checkpoint list for analyze mode.
std::vector<long> resolve_checkpoints(const FullConfig& config);

// Value-grammar helpers shared with tests.
double parse_scalar(const std::string& text, const std::string& key);
long parse_integer(const std::string& text, const std::string& key);
bool parse_boolean(const std::string& text, const std::string& key);
Vector parse_vector(const std::string& text, const std::string& key);
Matrix parse_matrix(const std::string& text, const std::string& key);

}  // namespace lure_pcac
