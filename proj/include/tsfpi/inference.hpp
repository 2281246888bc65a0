// SPDX-License-Identifier: Apache-2.0

#pragma once

// Takagi-Sugeno inference datapath: rule evaluation with the min t-norm,
// numerator/denominator adder trees, and the float32 division that turns
// them into the normalized output v_d. Two executors share the arithmetic:
// FimEngine::one_shot evaluates everything within one sample, FimPipeline
// inserts registers after the input, fuzzification, rule and output stages
// and therefore answers four samples late.
//
// Datapath formats for N fractional bits and R = F0*F1 rules, D = ceil(log2 R):
//   x0, x1, v_d  sV.N  with V = N + 1
//   f, o         uN.N
//   A, B, C      s(T+1).T
//   a_g          sH.N  with H = N + 3
//   a            sP.N  with P = H + D
//   b            sQ.N  with Q = N + D + 1
//
// Both the numerator and the denominator sum over every rule, g = 0..R-1.

#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "tsfpi/fixed.hpp"
#include "tsfpi/membership.hpp"

namespace tsfpi {

// First-order Sugeno consequent: A*x0 + B*x1 + C, each coefficient in (-1, 1).
struct RuleConsequent {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

// Row-major rule table: rule g = l * terms1 + k pairs term l of input 0 with
// term k of input 1.
struct RuleBase {
  std::size_t terms0 = 0;
  std::size_t terms1 = 0;
  std::vector<RuleConsequent> rules;

  std::size_t size() const { return rules.size(); }
  std::size_t index(std::size_t l, std::size_t k) const { return l * terms1 + k; }
  const RuleConsequent& at(std::size_t l, std::size_t k) const { return rules.at(index(l, k)); }

  // Zero-order PI-like table: A = B = 0, C = (centre_l + centre_k) / 2.
  // Antisymmetric whenever the bank is symmetric.
  static RuleBase antisymmetric_default(const BankShape& bank);

  // Throws ConfigError on size mismatch or coefficients outside (-1, 1).
  void validate() const;
};

struct QuantizedRule {
  FixedValue a;
  FixedValue b;
  FixedValue c;
};

struct FimFormats {
  int n = 0;
  int t = 0;
  int rule_count = 0;
  int tree_depth = 0;
  int v = 0;
  int h = 0;
  int p = 0;
  int q = 0;

  static FimFormats derive(int n_bits, int t_bits, int rule_count);

  FixedFormat input() const { return FixedFormat::s(v, n); }
  FixedFormat degree() const { return FixedFormat::u(n, n); }
  FixedFormat consequent() const { return FixedFormat::s(t + 1, t); }
  FixedFormat term() const { return FixedFormat::s(h, n); }
  FixedFormat numerator() const { return FixedFormat::s(p, n); }
  FixedFormat denominator() const { return FixedFormat::s(q, n); }
};

enum FimFlags : unsigned {
  kFimOk = 0,
  // Every rule weight was zero; v_d was forced to 0.
  kFimZeroDenominator = 1u << 0,
};

struct FimOutput {
  FixedValue v_d;
  unsigned flags = kFimOk;
};

struct FimParams {
  int n_bits = 8;
  int t_bits = 4;
  Rounding rounding = Rounding::Floor;
};

// o_g = min(f0[l], f1[k]) for every (l, k), in rule order.
std::vector<FixedValue> evaluate_rules(std::span<const FixedValue> f0,
                                       std::span<const FixedValue> f1);

// Binary adder tree over same-format signed leaves. Adjacent pairs are
// summed level by level, each level one bit wider than the one below; an odd
// leftover is carried up unchanged. The result has the leaf format widened
// by ceil(log2(leaves)) bits, so no level can saturate.
FixedValue adder_tree(std::span<const FixedValue> leaves);

class FimEngine {
 public:
  FimEngine(const BankShape& bank, const RuleBase& rules, FimParams params);

  const FimFormats& formats() const { return formats_; }
  const MembershipBank& bank() const { return bank_; }
  std::span<const QuantizedRule> rules() const { return rules_; }
  Rounding rounding() const { return params_.rounding; }

  FixedValue quantize_input(double x) const;

  std::vector<FixedValue> fuzzify(const FixedValue& x, std::size_t input) const;

  // Length-checked wrapper around the free evaluate_rules().
  std::vector<FixedValue> evaluate_rules(std::span<const FixedValue> f0,
                                         std::span<const FixedValue> f1) const;

  // One weighted term a_g = o_g * (A_g*x0 + B_g*x1 + C_g) in sH.N. Each
  // product is floor-quantized to N fractional bits, C_g is aligned to N
  // fractional bits, the sum is formed exactly in sH.N and the final product
  // with o_g is floor-quantized again.
  FixedValue rule_term(std::size_t g, const FixedValue& o, const FixedValue& x0,
                       const FixedValue& x1) const;

  // a in sP.N.
  FixedValue numerator(std::span<const FixedValue> o, const FixedValue& x0,
                       const FixedValue& x1) const;
  // b in sQ.N.
  FixedValue denominator(std::span<const FixedValue> o) const;

  // a and b go through binary32 (round to nearest even), are divided in
  // binary32, and come back into sV.N. The result saturates to
  // +-(1 - 2^-N) so the output stays strictly inside (-1, 1). b == 0 yields
  // 0 with kFimZeroDenominator.
  FimOutput defuzzify(const FixedValue& a, const FixedValue& b) const;

  FimOutput one_shot(const FixedValue& x0, const FixedValue& x1) const;

 private:
  FimParams params_;
  FimFormats formats_;
  MembershipBank bank_;
  std::vector<QuantizedRule> rules_;
  std::size_t terms0_;
  std::size_t terms1_;
};

// Stage registers of the pipelined executor. A register bank's `valid` bit
// records whether it holds data derived from a real input (as opposed to the
// reset contents).
struct PipelineState {
  struct InputStage {
    FixedValue x0, x1;
    bool valid = false;
  };
  struct FuzzyStage {
    std::vector<FixedValue> f0, f1;
    FixedValue x0, x1;
    bool valid = false;
  };
  struct RuleStage {
    std::vector<FixedValue> o;
    FixedValue x0, x1;
    bool valid = false;
  };
  struct OutputStage {
    FixedValue v_d;
    unsigned flags = kFimOk;
    bool valid = false;
  };

  InputStage input;
  FuzzyStage fuzzy;
  RuleStage rules;
  OutputStage output;

  // All registers cleared to zero in their stage formats.
  static PipelineState reset(const FimEngine& engine);
};

// One synchronous clock: the output register is read, then every stage
// computes from the register bank before it. The emitted v_d therefore
// belongs to the input presented four calls earlier.
std::pair<PipelineState, FimOutput> fim_pipeline_step(const PipelineState& state,
                                                      const FixedValue& x0,
                                                      const FixedValue& x1,
                                                      const FimEngine& engine);

class FimPipeline {
 public:
  static constexpr int kLatency = 4;

  explicit FimPipeline(std::shared_ptr<const FimEngine> engine);

  FimOutput step(const FixedValue& x0, const FixedValue& x1);
  void reset();

  const PipelineState& state() const { return state_; }
  unsigned sticky_flags() const { return sticky_; }

 private:
  std::shared_ptr<const FimEngine> engine_;
  PipelineState state_;
  unsigned sticky_ = kFimOk;
};

}  // namespace tsfpi
