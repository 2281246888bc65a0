// SPDX-License-Identifier: Apache-2.0

#include "tsfpi/tsfpi.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <string>

#include "tsfpi/costmodel.hpp"
#include "tsfpi/errors.hpp"
#include "tsfpi/experiments.hpp"

struct tsfpi_config {
  tsfpi::ExperimentConfig cfg;
};

struct tsfpi_fim {
  std::shared_ptr<const tsfpi::FimEngine> engine;
  std::unique_ptr<tsfpi::FimPipeline> pipeline;
  tsfpi::BankShape bank;
  tsfpi::RuleBase rules;
};

struct tsfpi_controller {
  std::unique_ptr<tsfpi::FuzzyPiController> ctl;
};

namespace {

thread_local std::string g_last_error;

tsfpi_status fail(tsfpi_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
tsfpi_status guarded(Fn&& fn) {
  try {
    fn();
    return TSFPI_OK;
  } catch (const tsfpi::ContractError& e) {
    return fail(TSFPI_ERR_INVALID_ARGUMENT, e.what());
  } catch (const tsfpi::ConfigError& e) {
    return fail(TSFPI_ERR_CONFIG, e.what());
  } catch (const tsfpi::NumericError& e) {
    return fail(TSFPI_ERR_DIVERGENCE, e.what());
  } catch (const tsfpi::IoError& e) {
    return fail(TSFPI_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(TSFPI_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(TSFPI_ERR_INTERNAL, "unknown exception");
  }
}

#define TSFPI_REQUIRE(cond, what)                                   \
  do {                                                              \
    if (!(cond)) return fail(TSFPI_ERR_INVALID_ARGUMENT, what);     \
  } while (0)

// Setters validate the whole config so an invalid value never sticks.
template <typename Fn>
tsfpi_status update(tsfpi_config* cfg, Fn&& fn) {
  TSFPI_REQUIRE(cfg, "config is NULL");
  return guarded([&] {
    auto copy = cfg->cfg;
    fn(copy);
    copy.validate();
    cfg->cfg = std::move(copy);
  });
}

}  // namespace

extern "C" {

const char* tsfpi_version(void) { return "0.1.0"; }

const char* tsfpi_status_string(tsfpi_status status) {
  switch (status) {
    case TSFPI_OK: return "ok";
    case TSFPI_ERR_INVALID_ARGUMENT: return "invalid argument";
    case TSFPI_ERR_CONFIG: return "configuration error";
    case TSFPI_ERR_DIVERGENCE: return "numeric divergence";
    case TSFPI_ERR_IO: return "i/o error";
    case TSFPI_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* tsfpi_last_error(void) { return g_last_error.c_str(); }

tsfpi_status tsfpi_config_default(tsfpi_config** out) {
  TSFPI_REQUIRE(out, "out is NULL");
  return guarded([&] { *out = new tsfpi_config{}; });
}

tsfpi_status tsfpi_config_load(const char* path, tsfpi_config** out) {
  TSFPI_REQUIRE(path && out, "path or out is NULL");
  return guarded([&] { *out = new tsfpi_config{tsfpi::ExperimentConfig::load(path)}; });
}

void tsfpi_config_free(tsfpi_config* cfg) { delete cfg; }

tsfpi_status tsfpi_config_set_bits(tsfpi_config* cfg, int n_bits, int t_bits) {
  return update(cfg, [&](tsfpi::ExperimentConfig& c) {
    c.controller.n_bits = n_bits;
    c.controller.t_bits = t_bits;
  });
}

tsfpi_status tsfpi_config_set_gains(tsfpi_config* cfg, double kp, double ki) {
  return update(cfg, [&](tsfpi::ExperimentConfig& c) {
    c.controller.kp = kp;
    c.controller.ki = ki;
  });
}

tsfpi_status tsfpi_config_set_sample_time(tsfpi_config* cfg, double ts) {
  return update(cfg, [&](tsfpi::ExperimentConfig& c) { c.controller.ts = ts; });
}

tsfpi_status tsfpi_config_set_limits(tsfpi_config* cfg, double v_min, double v_max) {
  return update(cfg, [&](tsfpi::ExperimentConfig& c) {
    c.controller.v_min = v_min;
    c.controller.v_max = v_max;
  });
}

tsfpi_status tsfpi_config_set_mode(tsfpi_config* cfg, tsfpi_mode mode) {
  TSFPI_REQUIRE(mode == TSFPI_MODE_ONESHOT || mode == TSFPI_MODE_PIPELINE, "unknown mode");
  return update(cfg, [&](tsfpi::ExperimentConfig& c) {
    c.controller.mode =
        mode == TSFPI_MODE_ONESHOT ? tsfpi::ExecutorMode::OneShot : tsfpi::ExecutorMode::Pipeline;
  });
}

tsfpi_status tsfpi_config_set_log_every(tsfpi_config* cfg, int log_every) {
  return update(cfg, [&](tsfpi::ExperimentConfig& c) { c.simulation.log_every = log_every; });
}

tsfpi_status tsfpi_config_set_robot_bits(tsfpi_config* cfg, const int* n_bits, size_t count) {
  TSFPI_REQUIRE(n_bits || count == 0, "n_bits is NULL");
  return update(cfg, [&](tsfpi::ExperimentConfig& c) { c.robot_n.assign(n_bits, n_bits + count); });
}

tsfpi_status tsfpi_config_to_json(const tsfpi_config* cfg, char* buf, size_t cap, size_t* needed) {
  TSFPI_REQUIRE(cfg, "config is NULL");
  std::string text;
  const auto s = guarded([&] { text = cfg->cfg.to_json(); });
  if (s != TSFPI_OK) return s;
  if (needed) *needed = text.size() + 1;
  if (!buf) return TSFPI_OK;
  TSFPI_REQUIRE(cap >= text.size() + 1, "buffer too small");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return TSFPI_OK;
}

tsfpi_status tsfpi_fim_create(const tsfpi_config* cfg, tsfpi_fim** out) {
  TSFPI_REQUIRE(cfg && out, "config or out is NULL");
  return guarded([&] {
    const auto& c = cfg->cfg;
    auto fim = std::make_unique<tsfpi_fim>();
    fim->engine = std::make_shared<const tsfpi::FimEngine>(
        c.bank, c.rules,
        tsfpi::FimParams{c.controller.n_bits, c.controller.t_bits, c.controller.rounding});
    fim->pipeline = std::make_unique<tsfpi::FimPipeline>(fim->engine);
    fim->bank = c.bank;
    fim->rules = c.rules;
    *out = fim.release();
  });
}

void tsfpi_fim_free(tsfpi_fim* fim) { delete fim; }

tsfpi_status tsfpi_fim_eval(const tsfpi_fim* fim, double x0, double x1, double* v_d,
                            unsigned* flags) {
  TSFPI_REQUIRE(fim && v_d, "fim or v_d is NULL");
  return guarded([&] {
    const auto out =
        fim->engine->one_shot(fim->engine->quantize_input(x0), fim->engine->quantize_input(x1));
    *v_d = out.v_d.to_double();
    if (flags) *flags = out.flags;
  });
}

tsfpi_status tsfpi_fim_eval_raw(const tsfpi_fim* fim, int64_t x0_raw, int64_t x1_raw,
                                int64_t* v_d_raw, unsigned* flags) {
  TSFPI_REQUIRE(fim && v_d_raw, "fim or v_d_raw is NULL");
  return guarded([&] {
    const auto fmt = fim->engine->formats().input();
    const auto out = fim->engine->one_shot(tsfpi::FixedValue(x0_raw, fmt),
                                           tsfpi::FixedValue(x1_raw, fmt));
    *v_d_raw = out.v_d.raw64();
    if (flags) *flags = out.flags;
  });
}

tsfpi_status tsfpi_fim_eval_reference(const tsfpi_fim* fim, double x0, double x1, double* v_d) {
  TSFPI_REQUIRE(fim && v_d, "fim or v_d is NULL");
  return guarded([&] { *v_d = tsfpi::fim_reference(x0, x1, fim->bank, fim->rules).v_d; });
}

tsfpi_status tsfpi_fim_pipeline_step(tsfpi_fim* fim, double x0, double x1, double* v_d,
                                     unsigned* flags) {
  TSFPI_REQUIRE(fim && v_d, "fim or v_d is NULL");
  return guarded([&] {
    const auto out =
        fim->pipeline->step(fim->engine->quantize_input(x0), fim->engine->quantize_input(x1));
    *v_d = out.v_d.to_double();
    if (flags) *flags = out.flags;
  });
}

tsfpi_status tsfpi_fim_pipeline_reset(tsfpi_fim* fim) {
  TSFPI_REQUIRE(fim, "fim is NULL");
  return guarded([&] { fim->pipeline->reset(); });
}

tsfpi_status tsfpi_controller_create(const tsfpi_config* cfg, tsfpi_controller** out) {
  TSFPI_REQUIRE(cfg && out, "config or out is NULL");
  return guarded([&] {
    const auto& c = cfg->cfg;
    *out = new tsfpi_controller{
        std::make_unique<tsfpi::FuzzyPiController>(c.controller, c.bank, c.rules)};
  });
}

void tsfpi_controller_free(tsfpi_controller* ctl) { delete ctl; }

tsfpi_status tsfpi_controller_step(tsfpi_controller* ctl, double y, double y_sp, double* r) {
  TSFPI_REQUIRE(ctl && r, "controller or r is NULL");
  return guarded([&] { *r = ctl->ctl->step(y, y_sp); });
}

tsfpi_status tsfpi_controller_step_record(tsfpi_controller* ctl, double y, double y_sp,
                                          tsfpi_step_record* rec) {
  TSFPI_REQUIRE(ctl, "controller is NULL");
  return guarded([&] {
    const auto s = ctl->ctl->step_record(y, y_sp);
    if (!rec) return;
    *rec = {s.y,           s.y_sp,          s.e.to_double(),   s.e_d.to_double(),
            s.x0.to_double(), s.x1.to_double(), s.v_d.to_double(), s.r.to_double(),
            s.flags};
  });
}

tsfpi_status tsfpi_controller_reset(tsfpi_controller* ctl) {
  TSFPI_REQUIRE(ctl, "controller is NULL");
  return guarded([&] { ctl->ctl->reset(); });
}

tsfpi_status tsfpi_run_surface(const tsfpi_config* cfg, const char* out_dir,
                               tsfpi_surface_summary* summary) {
  TSFPI_REQUIRE(cfg && out_dir, "config or out_dir is NULL");
  return guarded([&] {
    const auto r = tsfpi::run_surface(cfg->cfg, out_dir);
    if (summary) *summary = {r.rows, r.max_abs_fixed, r.zero_denominators};
  });
}

tsfpi_status tsfpi_run_mse_sweep(const tsfpi_config* cfg, const char* out_dir, tsfpi_mse_row* rows,
                                 size_t cap, size_t* count) {
  TSFPI_REQUIRE(cfg && out_dir, "config or out_dir is NULL");
  TSFPI_REQUIRE(rows || cap == 0, "rows is NULL");
  return guarded([&] {
    const auto r = tsfpi::run_mse_sweep(cfg->cfg, out_dir);
    if (count) *count = r.reports.size();
    for (size_t i = 0; i < r.reports.size() && i < cap; ++i) {
      const auto& m = r.reports[i];
      rows[i] = {m.n_bits, m.t_bits, m.grid_points, m.mse, m.max_abs_err};
    }
  });
}

tsfpi_status tsfpi_run_robot(const tsfpi_config* cfg, const char* out_dir, int step_log,
                             tsfpi_robot_run* runs, size_t cap, size_t* count) {
  TSFPI_REQUIRE(cfg && out_dir, "config or out_dir is NULL");
  TSFPI_REQUIRE(runs || cap == 0, "runs is NULL");
  return guarded([&] {
    tsfpi::RobotOptions opts;
    opts.step_log = step_log != 0;
    const auto r = tsfpi::run_robot(cfg->cfg, out_dir, opts);
    auto pack = [](const tsfpi::RobotRun& run) {
      double worst = 0.0;
      for (const auto& s : run.result.segments) worst = std::max(worst, s.final_error_deg);
      return tsfpi_robot_run{run.n_bits, run.result.all_settled() ? 1 : 0, worst,
                             run.max_diff_deg};
    };
    if (count) *count = r.runs.size() + 1;
    if (cap > 0) runs[0] = pack(r.reference);
    for (size_t i = 0; i < r.runs.size() && i + 1 < cap; ++i) runs[i + 1] = pack(r.runs[i]);
  });
}

tsfpi_status tsfpi_costmodel_estimate(tsfpi_variant variant, double n_bits, double t_bits,
                                      tsfpi_cost_estimate* out) {
  TSFPI_REQUIRE(out, "out is NULL");
  TSFPI_REQUIRE(variant == TSFPI_VARIANT_OS || variant == TSFPI_VARIANT_P, "unknown variant");
  return guarded([&] {
    const auto e = tsfpi::estimate(
        variant == TSFPI_VARIANT_OS ? tsfpi::Variant::OneShot : tsfpi::Variant::Pipeline, n_bits,
        t_bits);
    *out = {e.nlut, e.rs_msps, e.mflips, e.extrapolated ? 1 : 0};
  });
}

tsfpi_status tsfpi_dynamic_power_saving(double n_ref_gates, double f_ref_mhz, double n_work_gates,
                                        double f_work_mhz, double* out) {
  TSFPI_REQUIRE(out, "out is NULL");
  return guarded(
      [&] { *out = tsfpi::dynamic_power_saving(n_ref_gates, f_ref_mhz, n_work_gates, f_work_mhz); });
}

}  // extern "C"
