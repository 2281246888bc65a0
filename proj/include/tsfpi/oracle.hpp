// SPDX-License-Identifier: Apache-2.0

#pragma once

// Double-precision reference inference and the grid-MSE harness that
// measures the fixed-point engine against it. The reference uses the
// real-valued breakpoints and coefficients; it knows nothing about N or T.

#include <span>
#include <vector>

#include "tsfpi/controller.hpp"
#include "tsfpi/inference.hpp"
#include "tsfpi/membership.hpp"

namespace tsfpi {

struct ReferenceOutput {
  double v_d = 0.0;
  bool zero_denominator = false;
};

// sum_g o_g (A_g x0 + B_g x1 + C_g) / sum_g o_g with exact memberships and
// the min t-norm. 0 (flagged) when no rule fires.
ReferenceOutput fim_reference(double x0, double x1, const BankShape& bank, const RuleBase& rules);

// `points` evenly spaced values over [-1, 1], both endpoints included.
std::vector<double> grid_axis(int points);

// Which value the reference sees at each grid point.
enum class ReferenceInput {
  Real,       // the exact grid value
  Quantized,  // the sV.N code the fixed-point engine sees
};

struct MseOptions {
  int points_per_axis = 100;
  ReferenceInput reference_input = ReferenceInput::Real;
  Rounding rounding = Rounding::Floor;
};

struct MseReport {
  int n_bits = 0;
  int t_bits = 0;
  int grid_points = 0;
  double mse = 0.0;
  double max_abs_err = 0.0;
  // Largest |v_d| produced by the fixed-point engine over the grid.
  double max_abs_output = 0.0;
  int zero_denominators = 0;
};

MseReport mse_report(int n_bits, int t_bits, const BankShape& bank, const RuleBase& rules,
                     const MseOptions& options = {});

// One report per (N, T) pair, N-major. Pairs are evaluated concurrently.
std::vector<MseReport> mse_sweep(std::span<const int> n_list, std::span<const int> t_list,
                                 const BankShape& bank, const RuleBase& rules,
                                 const MseOptions& options = {});

// The same PI loop as FuzzyPiController in double precision: inputs to the
// inference are clipped to [-1, 1], the integrator is clamped to
// [v_min, v_max]. Bit widths and executor mode in the config are ignored.
class ReferenceController final : public JointController {
 public:
  ReferenceController(const ControllerConfig& cfg, BankShape bank, RuleBase rules);

  double step(double y, double y_sp) override;
  void reset() override;

 private:
  ControllerConfig cfg_;
  BankShape bank_;
  RuleBase rules_;
  double prev_error_ = 0.0;
  double v_ = 0.0;
};

}  // namespace tsfpi
