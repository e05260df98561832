#pragma once

#include <string>
#include <vector>

#include "lure_pcac/config.hpp"

namespace lure_pcac {

inline constexpr const char* kToolVersion = "0.1.0";

enum class RunMode { simulate, analyze, sector_check };

enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitConfigError = 2,
  kExitDivergence = 3,
  kExitSectorFailure = 4,
};

struct RunResult {
  int exit_code = kExitOk;
  Trajectory trajectory;
  std::vector<StabilityReport> reports;
  SectorCheckResult sector;
  bool dmisb = false;
};

/// Evaluates certificates for every snapshot, fanned out over worker
/// threads (capped by LURE_PCAC_THREADS), results ordered by step.
std::vector<StabilityReport> analyze_snapshots(const FullConfig& config,
                                               const std::vector<CheckpointSnapshot>& snapshots);

/// Runs one mode and emits files into `out_dir` (created if needed):
/// trajectory.csv, stability.csv (analyze), run.meta. The resolved map is
/// recorded in run.meta together with grid sizes, thresholds, and the tool
/// version. `label` names the config source (preset name or file path).
RunResult run(const ConfigMap& map, RunMode mode, const std::string& out_dir,
              const std::string& label);

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          Eigen::Index p, Eigen::Index m);
void write_stability_csv(const std::string& path, const std::vector<StabilityReport>& reports);

/// %.17g rendering used by all emitters; round-trips doubles exactly.
std::string format_double(double v);

Eigen::Index worker_count();

}  // namespace lure_pcac
