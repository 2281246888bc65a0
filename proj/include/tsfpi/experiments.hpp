// SPDX-License-Identifier: Apache-2.0

#pragma once

// Experiment configuration (one JSON document, see docs/config.md) and the
// three runners behind the CLI: inference surface, grid-MSE sweep and the
// closed-loop manipulator run. Every runner writes CSV files into an output
// directory; numbers are printed with 17 significant digits so reruns are
// byte-identical.

#include <filesystem>
#include <string>
#include <vector>

#include "tsfpi/controller.hpp"
#include "tsfpi/inference.hpp"
#include "tsfpi/membership.hpp"
#include "tsfpi/oracle.hpp"
#include "tsfpi/plant.hpp"

namespace tsfpi {

struct ExperimentConfig {
  BankShape bank = BankShape::uniform_default();
  RuleBase rules = RuleBase::antisymmetric_default(BankShape::uniform_default());
  ControllerConfig controller;
  PlantParams plant;
  TrajectorySchedule schedule = TrajectorySchedule::reference_table();
  SimulationOptions simulation;
  // Seconds skipped at the start of each segment before the fixed-point and
  // float64 trajectories are compared.
  double transient_seconds = 1.0;

  std::vector<int> sweep_n{8, 10, 12, 14, 16};
  std::vector<int> sweep_t{4, 6, 8, 10};
  std::vector<int> robot_n{12, 14, 16};
  MseOptions mse;

  // Throws ConfigError.
  void validate() const;

  // Missing keys keep their defaults. ConfigError on malformed input.
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
  std::string to_json() const;
};

struct SurfaceResult {
  std::size_t rows = 0;
  double max_abs_fixed = 0.0;
  int zero_denominators = 0;
  std::filesystem::path fixed_csv;
  std::filesystem::path reference_csv;
};

// Both engines over the grid at the controller's N and T.
SurfaceResult run_surface(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct SweepResult {
  std::vector<MseReport> reports;
  std::filesystem::path csv;
};

SweepResult run_mse_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out_dir);

struct RobotRun {
  int n_bits = 0;  // 0 for the float64 reference run
  SimulationResult result;
  // Against the reference run, after the per-segment transient.
  double max_diff_deg = 0.0;
  std::filesystem::path csv;
};

struct RobotResult {
  RobotRun reference;
  std::vector<RobotRun> runs;
  std::filesystem::path summary_csv;

  bool all_settled() const;
  double worst_diff_deg() const;
};

struct RobotOptions {
  // Per-joint step logs (n, y, y_sp, e, e_d, x0, x1, v_d, r) every log_every
  // steps for each fixed-point run.
  bool step_log = false;
  // Skip the trajectory CSVs (acceptance runs only need the summaries).
  bool write_trajectories = true;
};

// The float64 reference run plus one fixed-point run per robot_n entry, all
// concurrently. NumericError if any simulation diverges.
RobotResult run_robot(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                      const RobotOptions& options = {});

}  // namespace tsfpi
