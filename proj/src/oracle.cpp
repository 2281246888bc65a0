// SPDX-License-Identifier: Apache-2.0

#include "tsfpi/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "tsfpi/errors.hpp"

namespace tsfpi {

ReferenceOutput fim_reference(double x0, double x1, const BankShape& bank, const RuleBase& rules) {
  if (bank.inputs.size() < 2) throw ContractError("fim_reference: bank needs two inputs");
  const auto& t0 = bank.inputs[0];
  const auto& t1 = bank.inputs[1];
  if (rules.terms0 != t0.size() || rules.terms1 != t1.size()) {
    throw ContractError("fim_reference: rule base does not match the bank");
  }
  std::vector<double> f1(t1.size());
  for (std::size_t k = 0; k < t1.size(); ++k) f1[k] = t1[k].evaluate(x1);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t l = 0; l < t0.size(); ++l) {
    const double f0 = t0[l].evaluate(x0);
    for (std::size_t k = 0; k < t1.size(); ++k) {
      const double o = std::min(f0, f1[k]);
      if (o == 0.0) continue;
      const auto& r = rules.at(l, k);
      num += o * (r.a * x0 + r.b * x1 + r.c);
      den += o;
    }
  }
  if (den == 0.0) return {0.0, true};
  return {num / den, false};
}

std::vector<double> grid_axis(int points) {
  if (points < 2) throw ContractError("grid_axis: need at least two points");
  std::vector<double> axis(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    axis[static_cast<std::size_t>(i)] = -1.0 + 2.0 * i / (points - 1);
  }
  return axis;
}

MseReport mse_report(int n_bits, int t_bits, const BankShape& bank, const RuleBase& rules,
                     const MseOptions& options) {
  const FimEngine engine(bank, rules, {n_bits, t_bits, options.rounding});
  const auto axis = grid_axis(options.points_per_axis);
  std::vector<FixedValue> xq;
  xq.reserve(axis.size());
  for (double x : axis) xq.push_back(engine.quantize_input(x));

  MseReport rep;
  rep.n_bits = n_bits;
  rep.t_bits = t_bits;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < axis.size(); ++i) {
    for (std::size_t j = 0; j < axis.size(); ++j) {
      const auto fixed = engine.one_shot(xq[i], xq[j]);
      const bool quantized = options.reference_input == ReferenceInput::Quantized;
      const double r0 = quantized ? xq[i].to_double() : axis[i];
      const double r1 = quantized ? xq[j].to_double() : axis[j];
      const double ref = fim_reference(r0, r1, bank, rules).v_d;
      const double v = fixed.v_d.to_double();
      const double err = ref - v;
      sum_sq += err * err;
      rep.max_abs_err = std::max(rep.max_abs_err, std::abs(err));
      rep.max_abs_output = std::max(rep.max_abs_output, std::abs(v));
      if (fixed.flags & kFimZeroDenominator) ++rep.zero_denominators;
      ++rep.grid_points;
    }
  }
  rep.mse = sum_sq / rep.grid_points;
  return rep;
}

std::vector<MseReport> mse_sweep(std::span<const int> n_list, std::span<const int> t_list,
                                 const BankShape& bank, const RuleBase& rules,
                                 const MseOptions& options) {
  std::vector<std::future<MseReport>> jobs;
  for (int n : n_list) {
    for (int t : t_list) {
      jobs.push_back(std::async(std::launch::async, [n, t, &bank, &rules, &options] {
        return mse_report(n, t, bank, rules, options);
      }));
    }
  }
  std::vector<MseReport> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

ReferenceController::ReferenceController(const ControllerConfig& cfg, BankShape bank,
                                         RuleBase rules)
    : cfg_(cfg), bank_(std::move(bank)), rules_(std::move(rules)) {
  cfg_.validate();
  bank_.validate();
  rules_.validate();
  reset();
}

void ReferenceController::reset() {
  prev_error_ = 0.0;
  v_ = std::clamp(0.0, cfg_.v_min, cfg_.v_max);
}

double ReferenceController::step(double y, double y_sp) {
  if (std::isnan(y) || std::isnan(y_sp)) throw NumericError("controller input is NaN");
  const double lim = cfg_.y_max;
  const double e = std::clamp(y_sp, -lim, lim) - std::clamp(y, -lim, lim);
  const double e_d = e - prev_error_;
  prev_error_ = e;
  const double x0 = std::clamp(cfg_.kp * e_d, -1.0, 1.0);
  const double x1 = std::clamp(cfg_.ki * e, -1.0, 1.0);
  const double v_d = fim_reference(x0, x1, bank_, rules_).v_d;
  v_ = std::clamp(v_ + v_d, cfg_.v_min, cfg_.v_max);
  return v_;
}

}  // namespace tsfpi
