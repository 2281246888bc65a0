// SPDX-License-Identifier: Apache-2.0

#include "tsfpi/controller.hpp"

#include <cmath>

#include "tsfpi/errors.hpp"

namespace tsfpi {

const char* to_string(ExecutorMode mode) {
  return mode == ExecutorMode::OneShot ? "oneshot" : "pipeline";
}

ExecutorMode parse_executor_mode(const std::string& text) {
  if (text == "oneshot" || text == "one_shot") return ExecutorMode::OneShot;
  if (text == "pipeline") return ExecutorMode::Pipeline;
  throw ConfigError("unknown executor mode '" + text + "' (expected oneshot or pipeline)");
}

void ControllerConfig::validate() const {
  if (!(kp > 0.0) || !std::isfinite(kp)) throw ConfigError("Kp must be positive");
  if (!(ki > 0.0) || !std::isfinite(ki)) throw ConfigError("Ki must be positive");
  if (!(ts > 0.0) || !std::isfinite(ts)) throw ConfigError("ts must be positive");
  if (!(v_min < v_max) || !std::isfinite(v_min) || !std::isfinite(v_max)) {
    throw ConfigError("v_min must be below v_max");
  }
  if (!(y_max > 0.0) || !std::isfinite(y_max)) throw ConfigError("y_max must be positive");
  if (n_bits < 4 || n_bits > 32) throw ConfigError("N must lie in [4, 32]");
  if (t_bits < 2 || t_bits > 16) throw ConfigError("T must lie in [2, 16]");
  const auto f = ControllerFormats::derive(*this);
  if (v_max > std::ldexp(1.0, f.g - 1 - f.n) || v_min < -std::ldexp(1.0, f.g - 1 - f.n)) {
    throw ConfigError("actuator range does not fit the accumulator format");
  }
}

ControllerFormats ControllerFormats::derive(const ControllerConfig& cfg) {
  ControllerFormats f;
  f.n = cfg.n_bits;
  f.m = cfg.n_bits + ceil_log2(static_cast<std::uint64_t>(std::ceil(cfg.y_max))) + 1;
  f.g = cfg.n_bits +
        ceil_log2(static_cast<std::uint64_t>(std::ceil(cfg.v_max - cfg.v_min))) + 1;
  return f;
}

FuzzyPiController::FuzzyPiController(const ControllerConfig& cfg,
                                     std::shared_ptr<const FimEngine> engine)
    : cfg_(cfg), engine_(std::move(engine)) {
  cfg_.validate();
  if (!engine_) throw ContractError("controller needs an inference engine");
  if (engine_->formats().n != cfg_.n_bits || engine_->formats().t != cfg_.t_bits) {
    throw ConfigError("inference engine bit widths do not match the controller config");
  }
  formats_ = ControllerFormats::derive(cfg_);
  const auto acc = formats_.accumulator();
  // Floor for the top and ceiling for the bottom keep both limits inside
  // the configured range.
  v_max_ = quantize(cfg_.v_max, acc, Rounding::Floor);
  v_min_ = FixedValue(-quantize(-cfg_.v_min, acc, Rounding::Floor).raw(), acc);
  if (cfg_.mode == ExecutorMode::Pipeline) pipeline_ = std::make_unique<FimPipeline>(engine_);
  reset();
}

FuzzyPiController::FuzzyPiController(const ControllerConfig& cfg, const BankShape& bank,
                                     const RuleBase& rules)
    : FuzzyPiController(cfg, std::make_shared<const FimEngine>(
                                 bank, rules, FimParams{cfg.n_bits, cfg.t_bits, cfg.rounding})) {}

void FuzzyPiController::reset() {
  prev_error_ = FixedValue::zero(formats_.error());
  v_ = FixedValue::zero(formats_.accumulator());
  v_ = fx_max(fx_min(v_, v_max_), v_min_);
  if (pipeline_) pipeline_->reset();
  sticky_ = kCtlOk;
}

IpmOutput FuzzyPiController::ipm_step(double y, double y_sp) {
  if (std::isnan(y) || std::isnan(y_sp)) throw NumericError("controller input is NaN");
  IpmOutput out;
  auto clip = [&](double v) {
    if (std::abs(v) > cfg_.y_max) {
      out.flags |= kCtlInputSaturated;
      return std::copysign(cfg_.y_max, v);
    }
    return v;
  };
  const auto ef = formats_.error();
  const auto yq = quantize(clip(y), ef, cfg_.rounding);
  const auto spq = quantize(clip(y_sp), ef, cfg_.rounding);
  out.e = fx_sub(spq, yq, ef);
  out.e_d = fx_sub(requantize(out.e, formats_.difference()),
                   requantize(prev_error_, formats_.difference()), formats_.difference());
  out.x0 = fx_scale(out.e_d, cfg_.kp, formats_.signal(), cfg_.rounding);
  out.x1 = fx_scale(out.e, cfg_.ki, formats_.signal(), cfg_.rounding);
  prev_error_ = out.e;
  return out;
}

FixedValue FuzzyPiController::im_step(const FixedValue& v_d) {
  const auto acc = formats_.accumulator();
  const auto wide = FixedFormat::s(formats_.g + 1, formats_.n);
  const auto sum = fx_add(requantize(v_, wide), requantize(v_d, wide), wide);
  const auto clamped = fx_max(fx_min(sum, requantize(v_max_, wide)), requantize(v_min_, wide));
  v_ = requantize(clamped, acc);
  return v_;
}

StepRecord FuzzyPiController::step_record(double y, double y_sp) {
  StepRecord rec;
  rec.y = y;
  rec.y_sp = y_sp;
  const auto ipm = ipm_step(y, y_sp);
  rec.e = ipm.e;
  rec.e_d = ipm.e_d;
  rec.x0 = ipm.x0;
  rec.x1 = ipm.x1;
  const auto fim = pipeline_ ? pipeline_->step(ipm.x0, ipm.x1) : engine_->one_shot(ipm.x0, ipm.x1);
  rec.v_d = fim.v_d;
  rec.r = im_step(fim.v_d);
  rec.flags = ipm.flags | fim.flags;
  sticky_ |= rec.flags;
  return rec;
}

double FuzzyPiController::step(double y, double y_sp) { return step_record(y, y_sp).r.to_double(); }

}  // namespace tsfpi
