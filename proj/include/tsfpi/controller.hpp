// SPDX-License-Identifier: Apache-2.0

#pragma once

// Fuzzy-PI control loop around the inference engine.
//
//   IPM  e = y_sp - y          sM.N, M = N + ceil(log2(ceil(y_max))) + 1
//        e_d = e - e[n-1]      s(M+1).N (exact)
//        x0 = sat(Kp * e_d)    sV.N   (difference path)
//        x1 = sat(Ki * e)      sV.N   (error path)
//   FIM  v_d = fim(x0, x1)     one-shot, or pipelined with 4 samples of delay
//   IM   v = clamp(v + v_d, v_min, v_max), r = v
//        accumulator sG.N, G = N + ceil(log2(ceil(v_max - v_min))) + 1
//
// The accumulator is clamped before it is stored, so it never holds a value
// outside [v_min, v_max].

#include <memory>

#include "tsfpi/inference.hpp"

namespace tsfpi {

enum class ExecutorMode { OneShot, Pipeline };

const char* to_string(ExecutorMode mode);
ExecutorMode parse_executor_mode(const std::string& text);

struct ControllerConfig {
  double kp = 2000.0;
  double ki = 0.1;
  double ts = 1e-5;
  double v_min = -3.0;
  double v_max = 3.0;
  double y_max = 1.0;
  int n_bits = 12;
  int t_bits = 8;
  ExecutorMode mode = ExecutorMode::OneShot;
  Rounding rounding = Rounding::Floor;

  // Throws ConfigError.
  void validate() const;
};

struct ControllerFormats {
  int n = 0;
  int m = 0;
  int g = 0;

  static ControllerFormats derive(const ControllerConfig& cfg);

  FixedFormat error() const { return FixedFormat::s(m, n); }
  FixedFormat difference() const { return FixedFormat::s(m + 1, n); }
  FixedFormat signal() const { return FixedFormat::s(n + 1, n); }
  FixedFormat accumulator() const { return FixedFormat::s(g, n); }
};

enum ControllerFlags : unsigned {
  kCtlOk = 0,
  kCtlZeroDenominator = kFimZeroDenominator,
  // |y| or |y_sp| exceeded y_max and was clipped.
  kCtlInputSaturated = 1u << 1,
};

struct IpmOutput {
  FixedValue e;
  FixedValue e_d;
  FixedValue x0;
  FixedValue x1;
  unsigned flags = kCtlOk;
};

// Everything one controller step saw and produced, for step logs.
struct StepRecord {
  double y = 0.0;
  double y_sp = 0.0;
  FixedValue e;
  FixedValue e_d;
  FixedValue x0;
  FixedValue x1;
  FixedValue v_d;
  FixedValue r;
  unsigned flags = kCtlOk;
};

// One control channel: normalized plant output in, actuator command out.
class JointController {
 public:
  virtual ~JointController() = default;
  virtual double step(double y, double y_sp) = 0;
  virtual void reset() = 0;
};

class FuzzyPiController final : public JointController {
 public:
  // The engine's N and T must match cfg (ConfigError otherwise).
  FuzzyPiController(const ControllerConfig& cfg, std::shared_ptr<const FimEngine> engine);
  FuzzyPiController(const ControllerConfig& cfg, const BankShape& bank, const RuleBase& rules);

  const ControllerConfig& config() const { return cfg_; }
  const ControllerFormats& formats() const { return formats_; }
  const FimEngine& engine() const { return *engine_; }

  // Updates the stored previous error.
  IpmOutput ipm_step(double y, double y_sp);
  // Updates and returns the accumulator.
  FixedValue im_step(const FixedValue& v_d);

  StepRecord step_record(double y, double y_sp);
  double step(double y, double y_sp) override;
  void reset() override;

  const FixedValue& accumulator() const { return v_; }
  const FixedValue& previous_error() const { return prev_error_; }
  unsigned sticky_flags() const { return sticky_; }

 private:
  ControllerConfig cfg_;
  ControllerFormats formats_;
  std::shared_ptr<const FimEngine> engine_;
  std::unique_ptr<FimPipeline> pipeline_;
  FixedValue v_min_;
  FixedValue v_max_;
  FixedValue prev_error_;
  FixedValue v_;
  unsigned sticky_ = kCtlOk;
};

}  // namespace tsfpi
