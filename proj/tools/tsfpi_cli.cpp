// SPDX-License-Identifier: Apache-2.0

// Experiment driver: surface | mse-sweep | robot | costmodel | config.
// Exit codes: 0 ok, 2 configuration/usage error, 3 numeric divergence,
// 1 anything else.

#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsfpi/tsfpi.h"

namespace {

struct Overrides {
  std::string config;
  std::optional<double> kp, ki, ts, vmin, vmax;
  std::optional<int> n_bits, t_bits;
  std::optional<std::string> mode;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON experiment config (defaults if omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--kp", o.kp, "proportional gain");
  cmd->add_option("--ki", o.ki, "integral gain");
  cmd->add_option("--ts", o.ts, "sample time in seconds");
  cmd->add_option("--n-bits", o.n_bits, "fractional bits N");
  cmd->add_option("--t-bits", o.t_bits, "membership constant bits T");
  cmd->add_option("--mode", o.mode, "inference executor")
      ->check(CLI::IsMember({"oneshot", "pipeline"}));
  cmd->add_option("--vmin", o.vmin, "actuator lower limit");
  cmd->add_option("--vmax", o.vmax, "actuator upper limit");
}

int exit_code(tsfpi_status s) {
  switch (s) {
    case TSFPI_OK: return 0;
    case TSFPI_ERR_CONFIG:
    case TSFPI_ERR_INVALID_ARGUMENT: return 2;
    case TSFPI_ERR_DIVERGENCE: return 3;
    default: return 1;
  }
}

// Thrown out of the subcommand bodies to unwind with a status.
struct Failure {
  tsfpi_status status;
};

void check(tsfpi_status s, const char* what) {
  if (s == TSFPI_OK) return;
  std::fprintf(stderr, "tsfpi: %s: %s (%s)\n", what, tsfpi_last_error(), tsfpi_status_string(s));
  throw Failure{s};
}

class Config {
 public:
  explicit Config(const Overrides& o) {
    if (o.config.empty()) {
      check(tsfpi_config_default(&cfg_), "default config");
    } else {
      check(tsfpi_config_load(o.config.c_str(), &cfg_), "loading config");
    }
    double kp = 0, ki = 0, ts = 0, vmin = 0, vmax = 0;
    int n = 0, t = 0;
    current(kp, ki, ts, vmin, vmax, n, t);
    if (o.kp || o.ki) check(tsfpi_config_set_gains(cfg_, o.kp.value_or(kp), o.ki.value_or(ki)), "--kp/--ki");
    if (o.ts) check(tsfpi_config_set_sample_time(cfg_, *o.ts), "--ts");
    if (o.vmin || o.vmax) {
      check(tsfpi_config_set_limits(cfg_, o.vmin.value_or(vmin), o.vmax.value_or(vmax)), "--vmin/--vmax");
    }
    if (o.n_bits || o.t_bits) {
      check(tsfpi_config_set_bits(cfg_, o.n_bits.value_or(n), o.t_bits.value_or(t)), "--n-bits/--t-bits");
    }
    if (o.mode) {
      check(tsfpi_config_set_mode(cfg_, *o.mode == "pipeline" ? TSFPI_MODE_PIPELINE : TSFPI_MODE_ONESHOT),
            "--mode");
    }
  }
  ~Config() { tsfpi_config_free(cfg_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  tsfpi_config* get() { return cfg_; }

  nlohmann::json json() const {
    size_t need = 0;
    check(tsfpi_config_to_json(cfg_, nullptr, 0, &need), "serializing config");
    std::string buf(need, '\0');
    check(tsfpi_config_to_json(cfg_, buf.data(), buf.size(), &need), "serializing config");
    buf.resize(need - 1);
    return nlohmann::json::parse(buf);
  }

 private:
  void current(double& kp, double& ki, double& ts, double& vmin, double& vmax, int& n, int& t) const {
    const auto c = json().at("controller");
    kp = c.at("kp");
    ki = c.at("ki");
    ts = c.at("ts");
    vmin = c.at("v_min");
    vmax = c.at("v_max");
    n = c.at("n_bits");
    t = c.at("t_bits");
  }

  tsfpi_config* cfg_ = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy-PI hardware model: experiments and cost estimates"};
  app.require_subcommand(1);

  std::string out_dir = "out";

  Overrides surface_o;
  auto* surface = app.add_subcommand("surface", "inference surface on the grid, fixed and float64");
  add_common(surface, surface_o);
  surface->add_option("--out", out_dir, "output directory");

  Overrides sweep_o;
  auto* sweep = app.add_subcommand("mse-sweep", "grid MSE against float64 for every (N, T)");
  add_common(sweep, sweep_o);
  sweep->add_option("--out", out_dir, "output directory");

  Overrides robot_o;
  int log_every = 100;
  bool step_log = false;
  std::vector<int> robot_n;
  auto* robot = app.add_subcommand("robot", "closed-loop manipulator runs, one per N");
  add_common(robot, robot_o);
  robot->add_option("--out", out_dir, "output directory");
  robot->add_option("--log-every", log_every, "keep every k-th sample in logs")
      ->check(CLI::PositiveNumber);
  robot->add_flag("--step-log", step_log, "write per-joint controller step logs");
  robot->add_option("--robot-n", robot_n, "N values to run (replaces the config list)");

  auto* cost = app.add_subcommand("costmodel", "fitted synthesis models");
  cost->require_subcommand(1);
  std::string variant = "os";
  double cost_n = 0, cost_t = 0;
  auto* estimate = cost->add_subcommand("estimate", "LUTs and throughput for one (N, T)");
  estimate->add_option("--variant", variant, "os (one-shot) or p (pipeline)")
      ->check(CLI::IsMember({"os", "p"}));
  estimate->add_option("--n", cost_n, "N")->required();
  estimate->add_option("--t", cost_t, "T")->required();
  double n_ref = 0, f_ref = 0, n_work = 0, f_work = 0;
  auto* power = cost->add_subcommand("power", "dynamic power saving ratio");
  power->add_option("--n-ref", n_ref, "reference design gate count")->required();
  power->add_option("--f-ref", f_ref, "reference clock, MHz")->required();
  power->add_option("--n-work", n_work, "this design's gate count")->required();
  power->add_option("--f-work", f_work, "this design's clock, MHz")->required();

  Overrides dump_o;
  auto* dump = app.add_subcommand("config", "print the effective configuration as JSON");
  add_common(dump, dump_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*surface) {
      Config cfg(surface_o);
      tsfpi_surface_summary s{};
      check(tsfpi_run_surface(cfg.get(), out_dir.c_str(), &s), "surface");
      std::printf("surface: %zu points, max |v_d| %.6g, zero denominators %d -> %s\n", s.rows,
                  s.max_abs_fixed, s.zero_denominators, out_dir.c_str());
    } else if (*sweep) {
      Config cfg(sweep_o);
      size_t count = 0;
      check(tsfpi_run_mse_sweep(cfg.get(), out_dir.c_str(), nullptr, 0, &count), "mse-sweep");
      // The sweep is deterministic; a second pass fills the rows.
      std::vector<tsfpi_mse_row> rows(count);
      check(tsfpi_run_mse_sweep(cfg.get(), out_dir.c_str(), rows.data(), rows.size(), &count),
            "mse-sweep");
      std::printf("%4s %4s %14s %14s\n", "N", "T", "mse", "max_abs_err");
      for (const auto& r : rows) {
        std::printf("%4d %4d %14.4e %14.4e\n", r.n_bits, r.t_bits, r.mse, r.max_abs_err);
      }
    } else if (*robot) {
      Config cfg(robot_o);
      check(tsfpi_config_set_log_every(cfg.get(), log_every), "--log-every");
      if (!robot_n.empty()) {
        check(tsfpi_config_set_robot_bits(cfg.get(), robot_n.data(), robot_n.size()), "--robot-n");
      }
      std::vector<tsfpi_robot_run> runs(robot_n.empty() ? 16 : robot_n.size() + 1);
      size_t count = 0;
      check(tsfpi_run_robot(cfg.get(), out_dir.c_str(), step_log ? 1 : 0, runs.data(), runs.size(),
                            &count),
            "robot");
      std::printf("%-10s %8s %18s %14s\n", "run", "settled", "worst_final_deg", "max_diff_deg");
      for (size_t i = 0; i < count && i < runs.size(); ++i) {
        const auto& r = runs[i];
        const std::string name = r.n_bits == 0 ? "reference" : "N" + std::to_string(r.n_bits);
        std::printf("%-10s %8s %18.4f %14.4f\n", name.c_str(), r.settled ? "yes" : "no",
                    r.worst_final_error_deg, r.max_diff_deg);
      }
    } else if (*cost) {
      if (*estimate) {
        tsfpi_cost_estimate e{};
        check(tsfpi_costmodel_estimate(variant == "os" ? TSFPI_VARIANT_OS : TSFPI_VARIANT_P, cost_n,
                                       cost_t, &e),
              "costmodel estimate");
        if (e.extrapolated) {
          std::fprintf(stderr, "tsfpi: warning: N=%g, T=%g is outside the fitted range "
                               "(N 8..16, T 4..10); extrapolating\n", cost_n, cost_t);
        }
        nlohmann::json j{{"variant", variant},      {"n", cost_n},
                         {"t", cost_t},             {"nlut", e.nlut},
                         {"rs_msps", e.rs_msps},    {"mflips", e.mflips},
                         {"extrapolated", e.extrapolated != 0}};
        std::printf("%s\n", j.dump(2).c_str());
      } else {
        double s = 0;
        check(tsfpi_dynamic_power_saving(n_ref, f_ref, n_work, f_work, &s), "costmodel power");
        std::printf("%s\n", nlohmann::json{{"saving", s}}.dump(2).c_str());
      }
    } else if (*dump) {
      Config cfg(dump_o);
      std::printf("%s\n", cfg.json().dump(2).c_str());
    }
  } catch (const Failure& f) {
    return exit_code(f.status);
  }
  return 0;
}
