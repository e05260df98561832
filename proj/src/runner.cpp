#include "lure_pcac/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

namespace lure_pcac {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Eigen::Index worker_count() {
  Eigen::Index n = static_cast<Eigen::Index>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("LURE_PCAC_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1 && cap < n) n = cap;
    } catch (const std::exception&) {
      // Unparsable cap: keep the hardware default.
    }
  }
  return n;
}

std::vector<StabilityReport> analyze_snapshots(const FullConfig& config,
                                               const std::vector<CheckpointSnapshot>& snapshots) {
  std::vector<StabilityReport> reports(snapshots.size());
  const Eigen::Index workers =
      std::min<Eigen::Index>(worker_count(), static_cast<Eigen::Index>(snapshots.size()));
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mutex;

  auto work = [&]() {
    while (!failed.load()) {
      const size_t i = next.fetch_add(1);
      if (i >= snapshots.size()) return;
      try {
        const CheckpointSnapshot& snap = snapshots[i];
        IdentifiedModel model = extract_model(snap.theta, config.sim.rls.nhat,
                                              config.sim.rls.p, config.sim.rls.m);
        model.step_tag = snap.k + 1;
        reports[i] = evaluate_certificates(config.sim.plant, model, snap.K, config.sector,
                                           config.grid_size, snap.k);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        error = e.what();
        failed.store(true);
      }
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (Eigen::Index w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }
  if (failed.load()) throw std::runtime_error("certificate evaluation failed: " + error);
  return reports;
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj,
                          Eigen::Index p, Eigen::Index m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "k";
  for (Eigen::Index i = 1; i <= p; ++i) out << ",y_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",u_req_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",u_" << i;
  for (Eigen::Index i = 1; i <= m; ++i) out << ",v_" << i;
  out << ",theta_norm,beta\n";
  for (const TrajectoryRecord& r : traj.records) {
    out << r.k;
    for (Eigen::Index i = 0; i < p; ++i) out << ',' << format_double(r.y(i));
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << format_double(r.u_req(i));
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << format_double(r.u(i));
    for (Eigen::Index i = 0; i < m; ++i) out << ',' << format_double(r.v(i));
    out << ',' << format_double(r.theta_norm) << ',' << format_double(r.beta) << '\n';
  }
}

void write_stability_csv(const std::string& path, const std::vector<StabilityReport>& reports) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "k,alpha_cc,beta_cc,cc_pass,zeta1,zeta2,zeta3_min_eig,alpha_tc,beta_tc,tc_pass\n";
  for (const StabilityReport& r : reports) {
    out << r.k << ',' << format_double(r.alpha_cc) << ',' << format_double(r.beta_cc) << ','
        << (r.cc_pass ? 1 : 0) << ',' << format_double(r.zeta1) << ',' << r.zeta2 << ','
        << format_double(r.zeta3_min_eig) << ',' << format_double(r.alpha_tc) << ','
        << format_double(r.beta_tc) << ',' << (r.tc_pass ? 1 : 0) << '\n';
  }
}

namespace {

void write_run_meta(const std::string& path, const ConfigMap& map, RunMode mode,
                    const std::string& label, const FullConfig& config,
                    const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "tool.version = " << kToolVersion << "\n";
  out << "run.mode = "
      << (mode == RunMode::simulate ? "simulate"
                                    : mode == RunMode::analyze ? "analyze" : "sector-check")
      << "\n";
  out << "run.source = " << label << "\n";
  out << "run.workers = " << worker_count() << "\n";
  for (const auto& [key, value] : map) out << key << " = " << value << "\n";
  // Resolved analysis constants (also present when defaulted).
  out << "resolved.grid_size = " << config.grid_size << "\n";
  out << "resolved.k_engage = " << config.sim.k_engage << "\n";
  out << "resolved.checkpoint_count = " << config.sim.checkpoints.size() << "\n";
  out << "resolved.zeta1_tolerance = " << format_double(kZeta1Tolerance) << "\n";
  out << "resolved.divergence_guard = " << format_double(kDivergenceGuard) << "\n";
  out << "resolved.probe_box = " << format_double(config.probe_box) << "\n";
  out << "resolved.probe_points = " << config.probe_points << "\n";
  auto kind = map.find("gamma.kind");
  if (kind != map.end() && kind->second == "gaussian_plus_piecewise")
    out << "notes.gamma_slopes = outer branch slopes s_lo/s_hi are configuration "
           "choices, not fixed by the model family; see the resolved values above\n";
  out << "result.diverged = " << (traj.diverged ? "true" : "false") << "\n";
  if (traj.diverged) out << "result.divergence_step = " << traj.divergence_step << "\n";
}

Eigen::Index probes_per_axis(long total, Eigen::Index p) {
  const double per = std::pow(static_cast<double>(total), 1.0 / static_cast<double>(p));
  return std::max<Eigen::Index>(2, static_cast<Eigen::Index>(std::llround(per)));
}

}  // namespace

RunResult run(const ConfigMap& map, RunMode mode, const std::string& out_dir,
              const std::string& label) {
  RunResult result;
  FullConfig config;
  try {
    config = build_config(map);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    result.exit_code = kExitConfigError;
    return result;
  }

  std::filesystem::create_directories(out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(out_dir) / name).string();
  };

  if (mode == RunMode::sector_check) {
    const Eigen::Index per_axis = probes_per_axis(config.probe_points, config.sim.plant.p());
    result.sector = sector_check(config.sim.gamma, config.sector.K1, config.sector.K2,
                                 config.probe_box, per_axis);
    result.dmisb = config.sim.plant.m() == config.sim.plant.p() &&
                   dmisb_check(config.sim.gamma, config.sector.K_L, config.sector.kappa,
                               config.probe_box, per_axis);
    std::cout << "sector check [" << label << "]: " << (result.sector.pass ? "PASS" : "FAIL")
              << "  worst margin = " << format_double(result.sector.worst_margin);
    if (result.sector.worst_probe.size() > 0) {
      std::cout << " at y = (";
      for (Eigen::Index i = 0; i < result.sector.worst_probe.size(); ++i)
        std::cout << (i ? ", " : "") << format_double(result.sector.worst_probe(i));
      std::cout << ")";
    }
    std::cout << "\n";
    std::cout << "dmisb check (shifted by K_L = " << config.sector.K_L
              << "): " << (result.dmisb ? "PASS" : "FAIL") << "\n";
    write_run_meta(path("run.meta"), map, mode, label, config, result.trajectory);
    result.exit_code = result.sector.pass ? kExitOk : kExitSectorFailure;
    return result;
  }

  if (mode == RunMode::simulate) config.sim.checkpoints.clear();
  result.trajectory = simulate(config.sim);
  write_trajectory_csv(path("trajectory.csv"), result.trajectory, config.sim.plant.p(),
                       config.sim.plant.m());

  if (mode == RunMode::analyze) {
    result.reports = analyze_snapshots(config, result.trajectory.snapshots);
    write_stability_csv(path("stability.csv"), result.reports);
  }
  write_run_meta(path("run.meta"), map, mode, label, config, result.trajectory);

  if (result.trajectory.diverged) {
    std::cerr << "divergence at step " << result.trajectory.divergence_step
              << "; partial outputs retained in " << out_dir << "\n";
    result.exit_code = kExitDivergence;
  }
  return result;
}

}  // namespace lure_pcac
