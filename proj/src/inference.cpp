// SPDX-License-Identifier: Apache-2.0

#include "tsfpi/inference.hpp"

#include <cmath>

#include "tsfpi/errors.hpp"

namespace tsfpi {

namespace {

// Clocks `state` in place. Stages are updated back to front so each one
// still sees the register contents from before this clock edge.
FimOutput advance(PipelineState& state, const FixedValue& x0, const FixedValue& x1,
                  const FimEngine& engine) {
  FimOutput emitted{state.output.v_d, state.output.flags};

  if (state.rules.valid) {
    const auto a = engine.numerator(state.rules.o, state.rules.x0, state.rules.x1);
    const auto b = engine.denominator(state.rules.o);
    const auto out = engine.defuzzify(a, b);
    state.output = {out.v_d, out.flags, true};
  } else {
    // Reset contents drain through without raising flags.
    const auto a = engine.numerator(state.rules.o, state.rules.x0, state.rules.x1);
    const auto b = engine.denominator(state.rules.o);
    state.output = {engine.defuzzify(a, b).v_d, kFimOk, false};
  }

  state.rules.o = engine.evaluate_rules(state.fuzzy.f0, state.fuzzy.f1);
  state.rules.x0 = state.fuzzy.x0;
  state.rules.x1 = state.fuzzy.x1;
  state.rules.valid = state.fuzzy.valid;

  state.fuzzy.f0 = engine.fuzzify(state.input.x0, 0);
  state.fuzzy.f1 = engine.fuzzify(state.input.x1, 1);
  state.fuzzy.x0 = state.input.x0;
  state.fuzzy.x1 = state.input.x1;
  state.fuzzy.valid = state.input.valid;

  state.input = {x0, x1, true};
  return emitted;
}

}  // namespace

RuleBase RuleBase::antisymmetric_default(const BankShape& bank) {
  if (bank.inputs.size() < 2) throw ConfigError("default rule base needs a two-input bank");
  const auto c0 = BankShape::centres(bank.inputs[0]);
  const auto c1 = BankShape::centres(bank.inputs[1]);
  RuleBase base;
  base.terms0 = c0.size();
  base.terms1 = c1.size();
  for (double l : c0) {
    for (double k : c1) base.rules.push_back({0.0, 0.0, (l + k) / 2.0});
  }
  return base;
}

void RuleBase::validate() const {
  if (terms0 == 0 || terms1 == 0) throw ConfigError("rule base has no terms");
  if (rules.size() != terms0 * terms1) {
    throw ConfigError("rule base has " + std::to_string(rules.size()) + " rules, expected " +
                      std::to_string(terms0 * terms1));
  }
  for (std::size_t g = 0; g < rules.size(); ++g) {
    const auto& r = rules[g];
    for (double v : {r.a, r.b, r.c}) {
      if (!(std::abs(v) < 1.0)) {
        throw ConfigError("rule " + std::to_string(g) + ": coefficients must lie in (-1, 1)");
      }
    }
  }
}

FimFormats FimFormats::derive(int n_bits, int t_bits, int rule_count) {
  if (n_bits < 1 || n_bits > 48) throw ContractError("N must lie in [1, 48]");
  if (t_bits < 1 || t_bits > 24) throw ContractError("T must lie in [1, 24]");
  if (rule_count < 1) throw ContractError("rule count must be positive");
  FimFormats f;
  f.n = n_bits;
  f.t = t_bits;
  f.rule_count = rule_count;
  f.tree_depth = ceil_log2(static_cast<std::uint64_t>(rule_count));
  f.v = n_bits + 1;
  f.h = n_bits + 3;
  f.p = f.h + f.tree_depth;
  f.q = n_bits + f.tree_depth + 1;
  return f;
}

std::vector<FixedValue> evaluate_rules(std::span<const FixedValue> f0,
                                       std::span<const FixedValue> f1) {
  std::vector<FixedValue> o;
  o.reserve(f0.size() * f1.size());
  for (const auto& l : f0) {
    for (const auto& k : f1) o.push_back(fx_min(l, k));
  }
  return o;
}

FixedValue adder_tree(std::span<const FixedValue> leaves) {
  if (leaves.empty()) throw ContractError("adder_tree: no leaves");
  const auto leaf_fmt = leaves.front().format();
  if (!leaf_fmt.is_signed()) throw ContractError("adder_tree: leaves must be signed");
  for (const auto& v : leaves) {
    if (v.format() != leaf_fmt) throw ContractError("adder_tree: leaves must share a format");
  }
  std::vector<FixedValue> level(leaves.begin(), leaves.end());
  auto fmt = leaf_fmt;
  while (level.size() > 1) {
    fmt = FixedFormat::s(fmt.total_bits() + 1, fmt.frac_bits());
    std::vector<FixedValue> next;
    next.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      next.push_back(fx_add(level[i], level[i + 1], fmt));
    }
    if (level.size() % 2 == 1) next.push_back(requantize(level.back(), fmt));
    level = std::move(next);
  }
  return level.front();
}

FimEngine::FimEngine(const BankShape& bank, const RuleBase& rules, FimParams params)
    : params_(params),
      formats_(FimFormats::derive(params.n_bits, params.t_bits, static_cast<int>(rules.size()))),
      bank_(bank, params.n_bits, params.t_bits, params.rounding) {
  rules.validate();
  if (bank_.input_count() < 2) throw ConfigError("inference needs a two-input membership bank");
  terms0_ = bank_.terms(0).size();
  terms1_ = bank_.terms(1).size();
  if (rules.terms0 != terms0_ || rules.terms1 != terms1_) {
    throw ConfigError("rule base is " + std::to_string(rules.terms0) + "x" +
                      std::to_string(rules.terms1) + " but the bank has " +
                      std::to_string(terms0_) + "x" + std::to_string(terms1_) + " terms");
  }
  const auto fmt = formats_.consequent();
  rules_.reserve(rules.size());
  for (const auto& r : rules.rules) {
    rules_.push_back({quantize(r.a, fmt, params.rounding), quantize(r.b, fmt, params.rounding),
                      quantize(r.c, fmt, params.rounding)});
  }
}

FixedValue FimEngine::quantize_input(double x) const {
  return quantize(x, formats_.input(), params_.rounding);
}

std::vector<FixedValue> FimEngine::fuzzify(const FixedValue& x, std::size_t input) const {
  return tsfpi::fuzzify(x, bank_, input);
}

std::vector<FixedValue> FimEngine::evaluate_rules(std::span<const FixedValue> f0,
                                                  std::span<const FixedValue> f1) const {
  if (f0.size() != terms0_ || f1.size() != terms1_) {
    throw ContractError("evaluate_rules: expected " + std::to_string(terms0_) + " and " +
                        std::to_string(terms1_) + " degrees");
  }
  return tsfpi::evaluate_rules(f0, f1);
}

FixedValue FimEngine::rule_term(std::size_t g, const FixedValue& o, const FixedValue& x0,
                                const FixedValue& x1) const {
  const auto fmt = formats_.term();
  const auto& rule = rules_.at(g);
  const auto ax = fx_mul(rule.a, x0, fmt, params_.rounding);
  const auto bx = fx_mul(rule.b, x1, fmt, params_.rounding);
  const auto c = requantize(rule.c, fmt, params_.rounding);
  const auto linear = fx_add(fx_add(ax, bx, fmt), c, fmt);
  return fx_mul(o, linear, fmt, params_.rounding);
}

FixedValue FimEngine::numerator(std::span<const FixedValue> o, const FixedValue& x0,
                                const FixedValue& x1) const {
  if (o.size() != rules_.size()) throw ContractError("numerator: wrong number of rule weights");
  std::vector<FixedValue> terms;
  terms.reserve(o.size());
  for (std::size_t g = 0; g < o.size(); ++g) terms.push_back(rule_term(g, o[g], x0, x1));
  return requantize(adder_tree(terms), formats_.numerator());
}

FixedValue FimEngine::denominator(std::span<const FixedValue> o) const {
  if (o.size() != rules_.size()) throw ContractError("denominator: wrong number of rule weights");
  const auto leaf = FixedFormat::s(formats_.n + 1, formats_.n);
  std::vector<FixedValue> leaves;
  leaves.reserve(o.size());
  for (const auto& w : o) leaves.push_back(requantize(w, leaf));
  return requantize(adder_tree(leaves), formats_.denominator());
}

FimOutput FimEngine::defuzzify(const FixedValue& a, const FixedValue& b) const {
  const auto out_fmt = formats_.input();
  if (b.is_zero()) return {FixedValue::zero(out_fmt), kFimZeroDenominator};
  const float num = fx_to_f32(a);
  const float den = fx_to_f32(b);
  const float ratio = num / den;
  auto v = f32_to_fx(ratio, out_fmt, params_.rounding);
  if (v.raw() == out_fmt.min_raw()) v = FixedValue(-out_fmt.max_raw(), out_fmt);
  return {v, kFimOk};
}

FimOutput FimEngine::one_shot(const FixedValue& x0, const FixedValue& x1) const {
  const auto f0 = fuzzify(x0, 0);
  const auto f1 = fuzzify(x1, 1);
  const auto o = tsfpi::evaluate_rules(f0, f1);
  return defuzzify(numerator(o, x0, x1), denominator(o));
}

PipelineState PipelineState::reset(const FimEngine& engine) {
  const auto& f = engine.formats();
  const auto x0 = FixedValue::zero(f.input());
  const auto mu0 = FixedValue::zero(f.degree());
  PipelineState s;
  s.input = {x0, x0, false};
  s.fuzzy = {std::vector<FixedValue>(engine.bank().terms(0).size(), mu0),
             std::vector<FixedValue>(engine.bank().terms(1).size(), mu0), x0, x0, false};
  s.rules = {std::vector<FixedValue>(static_cast<std::size_t>(f.rule_count), mu0), x0, x0, false};
  s.output = {x0, kFimOk, false};
  return s;
}

std::pair<PipelineState, FimOutput> fim_pipeline_step(const PipelineState& state,
                                                      const FixedValue& x0,
                                                      const FixedValue& x1,
                                                      const FimEngine& engine) {
  PipelineState next = state;
  const auto out = advance(next, x0, x1, engine);
  return {std::move(next), out};
}

FimPipeline::FimPipeline(std::shared_ptr<const FimEngine> engine)
    : engine_(std::move(engine)), state_(PipelineState::reset(*engine_)) {}

FimOutput FimPipeline::step(const FixedValue& x0, const FixedValue& x1) {
  const auto out = advance(state_, x0, x1, *engine_);
  sticky_ |= out.flags;
  return out;
}

void FimPipeline::reset() {
  state_ = PipelineState::reset(*engine_);
  sticky_ = kFimOk;
}

}  // namespace tsfpi
