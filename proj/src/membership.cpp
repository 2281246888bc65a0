// SPDX-License-Identifier: Apache-2.0

#include "tsfpi/membership.hpp"

#include <algorithm>
#include <cmath>

#include "tsfpi/errors.hpp"

namespace tsfpi {

namespace {

const char* const kSevenLabels[] = {"LN", "MN", "SN", "ZZ", "SP", "MP", "LP"};

void require_input(const FixedValue& x, int n_bits) {
  if (x.format().frac_bits() != n_bits || !x.format().is_signed()) {
    throw ContractError("membership input must be s" + std::to_string(n_bits + 1) + "." +
                        std::to_string(n_bits) + ", got " + x.format().to_string());
  }
}

FixedFormat difference_format(const FixedValue& x, const FixedValue& k) {
  const int frac = std::max(x.format().frac_bits(), k.format().frac_bits());
  const int ints = std::max(x.format().int_bits(), k.format().int_bits()) + 1;
  return FixedFormat::s(ints + frac + 1, frac);
}

// 1 below lo, (hi - x) * slope on [lo, hi], 0 above hi.
FixedValue falling_edge(const FixedValue& x, const FixedValue& lo, const FixedValue& hi,
                        const FixedValue& slope, int n_bits, Rounding rounding) {
  const auto out = FixedFormat::u(n_bits, n_bits);
  if (fx_compare(x, hi) > 0) return FixedValue::zero(out);
  if (fx_compare(x, lo) < 0) return FixedValue::max_of(out);
  const auto fmt = difference_format(x, hi);
  const auto diff = fx_sub(requantize(hi, fmt), requantize(x, fmt), fmt);
  return fx_mul(diff, slope, out, rounding);
}

// 0 below lo, (x - lo) * slope on [lo, hi], 1 above hi.
FixedValue rising_edge(const FixedValue& x, const FixedValue& lo, const FixedValue& hi,
                       const FixedValue& slope, int n_bits, Rounding rounding) {
  const auto out = FixedFormat::u(n_bits, n_bits);
  if (fx_compare(x, lo) < 0) return FixedValue::zero(out);
  if (fx_compare(x, hi) > 0) return FixedValue::max_of(out);
  const auto fmt = difference_format(x, lo);
  const auto diff = fx_sub(requantize(x, fmt), requantize(lo, fmt), fmt);
  return fx_mul(diff, slope, out, rounding);
}

// round(2^(2T) / span_raw) saturated into the constant format: the reciprocal
// of an edge width held with T fractional bits.
FixedValue reciprocal(const FixedValue& lo, const FixedValue& hi, FixedFormat fmt,
                      Rounding rounding) {
  const wide_t span = hi.raw() - lo.raw();
  if (span <= 0) {
    throw ConfigError("membership edge collapses after quantization to " + fmt.to_string());
  }
  const wide_t num = static_cast<wide_t>(1) << (2 * fmt.frac_bits());
  wide_t q = num / span;
  const wide_t r = num % span;
  if (rounding == Rounding::NearestEven && (2 * r > span || (2 * r == span && (q & 1) != 0))) {
    ++q;
  }
  return FixedValue::saturating(q, fmt);
}

}  // namespace

const char* to_string(TermKind kind) {
  switch (kind) {
    case TermKind::LeftTrapezoid: return "left_trapezoid";
    case TermKind::Triangle: return "triangle";
    case TermKind::RightTrapezoid: return "right_trapezoid";
    case TermKind::Lookup: return "lookup";
  }
  return "?";
}

TermKind parse_term_kind(const std::string& text) {
  if (text == "left_trapezoid") return TermKind::LeftTrapezoid;
  if (text == "triangle") return TermKind::Triangle;
  if (text == "right_trapezoid") return TermKind::RightTrapezoid;
  if (text == "lookup") return TermKind::Lookup;
  throw ConfigError("unknown membership kind '" + text + "'");
}

TermShape TermShape::right_trapezoid(std::string label, double c, double d) {
  TermShape t;
  t.kind = TermKind::RightTrapezoid;
  t.label = std::move(label);
  t.c = c;
  t.d = d;
  return t;
}

TermShape TermShape::left_trapezoid(std::string label, double e, double f) {
  TermShape t;
  t.kind = TermKind::LeftTrapezoid;
  t.label = std::move(label);
  t.e = e;
  t.f = f;
  return t;
}

TermShape TermShape::triangle(std::string label, double e, double m, double d) {
  TermShape t;
  t.kind = TermKind::Triangle;
  t.label = std::move(label);
  t.e = e;
  t.m = m;
  t.d = d;
  t.c = m;
  t.f = m;
  return t;
}

TermShape TermShape::lookup(std::string label, std::vector<std::pair<double, double>> points) {
  TermShape t;
  t.kind = TermKind::Lookup;
  t.label = std::move(label);
  t.points = std::move(points);
  return t;
}

double TermShape::evaluate(double x) const {
  switch (kind) {
    case TermKind::RightTrapezoid:
      if (x > d) return 0.0;
      if (x < c) return 1.0;
      return (d - x) / (d - c);
    case TermKind::LeftTrapezoid:
      if (x < e) return 0.0;
      if (x > f) return 1.0;
      return (x - e) / (f - e);
    case TermKind::Triangle:
      if (x < m) return x < e ? 0.0 : (x - e) / (m - e);
      return x > d ? 0.0 : (d - x) / (d - m);
    case TermKind::Lookup: {
      if (points.empty()) return 0.0;
      if (x <= points.front().first) return points.front().second;
      if (x >= points.back().first) return points.back().second;
      const auto it = std::upper_bound(points.begin(), points.end(), x,
                                       [](double v, const auto& p) { return v < p.first; });
      const auto& [x1, y1] = *it;
      const auto& [x0, y0] = *(it - 1);
      return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
    }
  }
  return 0.0;
}

void TermShape::validate() const {
  auto in_range = [](double v) { return v >= -1.0 && v <= 1.0; };
  auto fail = [&](const std::string& why) {
    return ConfigError("membership '" + label + "': " + why);
  };
  switch (kind) {
    case TermKind::RightTrapezoid:
      if (!(c < d)) throw fail("right trapezoid needs c < d");
      if (!in_range(c) || !in_range(d)) throw fail("breakpoints outside [-1, 1]");
      break;
    case TermKind::LeftTrapezoid:
      if (!(e < f)) throw fail("left trapezoid needs e < f");
      if (!in_range(e) || !in_range(f)) throw fail("breakpoints outside [-1, 1]");
      break;
    case TermKind::Triangle:
      if (!(e < m && m < d)) throw fail("triangle needs e < m < d");
      if (c != m || f != m) throw fail("triangle needs c = f = m");
      if (!in_range(e) || !in_range(d)) throw fail("breakpoints outside [-1, 1]");
      break;
    case TermKind::Lookup:
      if (points.size() < 2) throw fail("lookup needs at least two points");
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (i > 0 && !(points[i].first > points[i - 1].first)) {
          throw fail("lookup x values must increase");
        }
        if (points[i].second < 0.0 || points[i].second > 1.0) throw fail("lookup mu outside [0, 1]");
      }
      break;
  }
}

BankShape BankShape::uniform(int inputs, int count, double plateau) {
  if (count < 2) throw ConfigError("uniform bank needs at least two terms");
  const double step = 2.0 * plateau / (count - 1);
  std::vector<TermShape> terms;
  for (int j = 0; j < count; ++j) {
    std::string label = count == 7 ? kSevenLabels[j] : "T" + std::to_string(j);
    const double centre = -plateau + step * j;
    if (j == 0) {
      terms.push_back(TermShape::right_trapezoid(std::move(label), centre, centre + step));
    } else if (j == count - 1) {
      terms.push_back(TermShape::left_trapezoid(std::move(label), centre - step, centre));
    } else {
      terms.push_back(TermShape::triangle(std::move(label), centre - step, centre, centre + step));
    }
  }
  BankShape bank;
  bank.inputs.assign(static_cast<std::size_t>(inputs), terms);
  return bank;
}

BankShape BankShape::uniform_default(int inputs) { return uniform(inputs, 7, 0.75); }

std::vector<double> BankShape::centres(std::span<const TermShape> terms) {
  std::vector<double> out;
  out.reserve(terms.size());
  for (const auto& t : terms) {
    switch (t.kind) {
      case TermKind::RightTrapezoid: out.push_back(t.c); break;
      case TermKind::LeftTrapezoid: out.push_back(t.f); break;
      case TermKind::Triangle: out.push_back(t.m); break;
      case TermKind::Lookup: {
        const auto peak = std::max_element(t.points.begin(), t.points.end(),
                                           [](auto& a, auto& b) { return a.second < b.second; });
        out.push_back(peak == t.points.end() ? 0.0 : peak->first);
        break;
      }
    }
  }
  return out;
}

void BankShape::validate() const {
  if (inputs.empty()) throw ConfigError("membership bank has no inputs");
  for (const auto& terms : inputs) {
    if (terms.empty()) throw ConfigError("membership bank input has no terms");
    for (const auto& t : terms) t.validate();
  }
}

MembershipSpec MembershipSpec::from_shape(const TermShape& shape, int t_bits, int n_bits,
                                          Rounding rounding) {
  shape.validate();
  const auto fmt = FixedFormat::s(2 * t_bits + 1, t_bits);
  MembershipSpec spec;
  spec.kind = shape.kind;
  spec.label = shape.label;
  spec.c = quantize(shape.c, fmt, rounding);
  spec.d = quantize(shape.d, fmt, rounding);
  spec.e = quantize(shape.e, fmt, rounding);
  spec.f = quantize(shape.f, fmt, rounding);
  spec.m = quantize(shape.m, fmt, rounding);
  spec.fall_slope = FixedValue::zero(fmt);
  spec.rise_slope = FixedValue::zero(fmt);
  switch (shape.kind) {
    case TermKind::RightTrapezoid:
      spec.fall_slope = reciprocal(spec.c, spec.d, fmt, rounding);
      break;
    case TermKind::LeftTrapezoid:
      spec.rise_slope = reciprocal(spec.e, spec.f, fmt, rounding);
      break;
    case TermKind::Triangle:
      spec.c = spec.m;
      spec.f = spec.m;
      spec.rise_slope = reciprocal(spec.e, spec.m, fmt, rounding);
      spec.fall_slope = reciprocal(spec.m, spec.d, fmt, rounding);
      break;
    case TermKind::Lookup: {
      if (n_bits > 20) throw ConfigError("lookup membership limited to N <= 20");
      const auto in = FixedFormat::s(n_bits + 1, n_bits);
      const auto out = FixedFormat::u(n_bits, n_bits);
      spec.table.reserve(static_cast<std::size_t>(1) << (n_bits + 1));
      for (wide_t code = in.min_raw(); code <= in.max_raw(); ++code) {
        const double x = FixedValue(code, in).to_double();
        spec.table.push_back(quantize(shape.evaluate(x), out, rounding).raw());
      }
      break;
    }
  }
  return spec;
}

MembershipBank::MembershipBank(const BankShape& shape, int n_bits, int t_bits, Rounding rounding)
    : n_bits_(n_bits), t_bits_(t_bits), rounding_(rounding) {
  shape.validate();
  for (const auto& terms : shape.inputs) {
    std::vector<MembershipSpec> specs;
    specs.reserve(terms.size());
    for (const auto& t : terms) specs.push_back(MembershipSpec::from_shape(t, t_bits, n_bits, rounding));
    inputs_.push_back(std::move(specs));
  }
}

std::span<const MembershipSpec> MembershipBank::terms(std::size_t input) const {
  if (input >= inputs_.size()) throw ContractError("membership bank: input index out of range");
  return inputs_[input];
}

FixedValue mu_right_trapezoid(const FixedValue& x, const MembershipSpec& spec, int n_bits,
                              Rounding rounding) {
  if (spec.kind != TermKind::RightTrapezoid) throw ContractError("mu_right_trapezoid: wrong kind");
  require_input(x, n_bits);
  return falling_edge(x, spec.c, spec.d, spec.fall_slope, n_bits, rounding);
}

FixedValue mu_left_trapezoid(const FixedValue& x, const MembershipSpec& spec, int n_bits,
                             Rounding rounding) {
  if (spec.kind != TermKind::LeftTrapezoid) throw ContractError("mu_left_trapezoid: wrong kind");
  require_input(x, n_bits);
  return rising_edge(x, spec.e, spec.f, spec.rise_slope, n_bits, rounding);
}

FixedValue mu_triangle(const FixedValue& x, const MembershipSpec& spec, int n_bits,
                       Rounding rounding) {
  if (spec.kind != TermKind::Triangle) throw ContractError("mu_triangle: wrong kind");
  require_input(x, n_bits);
  if (fx_compare(x, spec.m) < 0) {
    return rising_edge(x, spec.e, spec.f, spec.rise_slope, n_bits, rounding);
  }
  return falling_edge(x, spec.c, spec.d, spec.fall_slope, n_bits, rounding);
}

FixedValue mu_lookup(const FixedValue& x, const MembershipSpec& spec, int n_bits) {
  if (spec.kind != TermKind::Lookup) throw ContractError("mu_lookup: wrong kind");
  require_input(x, n_bits);
  const auto index = static_cast<std::size_t>(x.raw() + (static_cast<wide_t>(1) << n_bits));
  if (index >= spec.table.size()) throw ContractError("mu_lookup: table built for another N");
  return {spec.table[index], FixedFormat::u(n_bits, n_bits)};
}

FixedValue mu(const FixedValue& x, const MembershipSpec& spec, const MembershipBank& bank) {
  switch (spec.kind) {
    case TermKind::RightTrapezoid: return mu_right_trapezoid(x, spec, bank.n_bits_, bank.rounding_);
    case TermKind::LeftTrapezoid: return mu_left_trapezoid(x, spec, bank.n_bits_, bank.rounding_);
    case TermKind::Triangle: return mu_triangle(x, spec, bank.n_bits_, bank.rounding_);
    case TermKind::Lookup: return mu_lookup(x, spec, bank.n_bits_);
  }
  throw ContractError("unknown membership kind");
}

std::vector<FixedValue> fuzzify(const FixedValue& x, const MembershipBank& bank,
                                std::size_t input_index) {
  const auto terms = bank.terms(input_index);
  std::vector<FixedValue> out;
  out.reserve(terms.size());
  for (const auto& spec : terms) out.push_back(mu(x, spec, bank));
  return out;
}

}  // namespace tsfpi
