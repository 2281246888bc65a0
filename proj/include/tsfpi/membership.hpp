// SPDX-License-Identifier: Apache-2.0

#pragma once

// Fuzzification stage. A TermShape is the real-valued definition of one
// membership function (what a configuration file or the double-precision
// reference sees); a MembershipSpec is the same function with its
// breakpoints and reciprocal slopes quantized into the sW.T constant format
// (W = 2T + 1) the hardware stores.
//
// Breakpoints:
//   RightTrapezoid  1 below c, falls linearly to 0 at d
//   LeftTrapezoid   0 below e, rises linearly to 1 at f
//   Triangle        rises on [e, m], falls on [m, d]; c = f = m
//   Lookup          arbitrary shape, tabulated over every input code

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tsfpi/fixed.hpp"

namespace tsfpi {

enum class TermKind { LeftTrapezoid, Triangle, RightTrapezoid, Lookup };

const char* to_string(TermKind kind);
TermKind parse_term_kind(const std::string& text);

struct TermShape {
  TermKind kind = TermKind::Triangle;
  std::string label;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;
  double f = 0.0;
  double m = 0.0;
  // Lookup only: piecewise-linear (x, mu) samples, x strictly increasing.
  std::vector<std::pair<double, double>> points;

  static TermShape right_trapezoid(std::string label, double c, double d);
  static TermShape left_trapezoid(std::string label, double e, double f);
  static TermShape triangle(std::string label, double e, double m, double d);
  static TermShape lookup(std::string label, std::vector<std::pair<double, double>> points);

  // Exact membership degree in double precision.
  double evaluate(double x) const;

  // Throws ConfigError on ordering violations or breakpoints outside [-1, 1].
  void validate() const;
};

// Real-valued membership functions for every controller input.
struct BankShape {
  std::vector<std::vector<TermShape>> inputs;

  // Seven functions per input (LN, MN, SN, ZZ, SP, MP, LP) centred on a
  // uniform 0.25 grid: trapezoids plateau beyond +-0.75, each triangle's feet
  // sit on its neighbours' centres. Every breakpoint is a multiple of 1/4, so
  // it is exact in sW.T for any T >= 2.
  static BankShape uniform_default(int inputs = 2);

  // Uniform partition with `count` centres spread evenly over
  // [-plateau, plateau] and trapezoids at both ends.
  static BankShape uniform(int inputs, int count, double plateau);

  // Peak location of each term, used to build the default rule table.
  static std::vector<double> centres(std::span<const TermShape> terms);

  void validate() const;
};

struct MembershipSpec {
  TermKind kind = TermKind::Triangle;
  std::string label;
  FixedValue c;
  FixedValue d;
  FixedValue e;
  FixedValue f;
  FixedValue m;
  FixedValue fall_slope;  // 1/(d - c), floor-quantized
  FixedValue rise_slope;  // 1/(f - e), floor-quantized
  // Lookup only: uN.N codes indexed by (x raw code + 2^N).
  std::vector<wide_t> table;

  // Quantizes a shape's constants with t_bits fractional bits. n_bits is
  // needed for Lookup tables only. Throws ConfigError if quantization
  // collapses an edge (e.g. c == d).
  static MembershipSpec from_shape(const TermShape& shape, int t_bits, int n_bits,
                                   Rounding rounding = Rounding::Floor);
};

// Quantized bank used by the fixed-point engine.
class MembershipBank {
 public:
  MembershipBank(const BankShape& shape, int n_bits, int t_bits,
                 Rounding rounding = Rounding::Floor);

  int n_bits() const { return n_bits_; }
  int t_bits() const { return t_bits_; }
  FixedFormat input_format() const { return FixedFormat::s(n_bits_ + 1, n_bits_); }
  FixedFormat degree_format() const { return FixedFormat::u(n_bits_, n_bits_); }
  FixedFormat constant_format() const { return FixedFormat::s(2 * t_bits_ + 1, t_bits_); }

  std::size_t input_count() const { return inputs_.size(); }
  std::span<const MembershipSpec> terms(std::size_t input) const;

 private:
  int n_bits_;
  int t_bits_;
  Rounding rounding_;
  std::vector<std::vector<MembershipSpec>> inputs_;

  friend std::vector<FixedValue> fuzzify(const FixedValue&, const MembershipBank&, std::size_t);
  friend FixedValue mu(const FixedValue&, const MembershipSpec&, const MembershipBank&);
};

// Individual membership evaluations. x must be in the bank's sV.N input
// format; results are uN.N. ContractError if the spec kind does not match.
FixedValue mu_right_trapezoid(const FixedValue& x, const MembershipSpec& spec, int n_bits,
                              Rounding rounding = Rounding::Floor);
FixedValue mu_left_trapezoid(const FixedValue& x, const MembershipSpec& spec, int n_bits,
                             Rounding rounding = Rounding::Floor);
FixedValue mu_triangle(const FixedValue& x, const MembershipSpec& spec, int n_bits,
                       Rounding rounding = Rounding::Floor);
FixedValue mu_lookup(const FixedValue& x, const MembershipSpec& spec, int n_bits);

// Dispatches on spec.kind.
FixedValue mu(const FixedValue& x, const MembershipSpec& spec, const MembershipBank& bank);

// All membership degrees of one input, in bank order.
std::vector<FixedValue> fuzzify(const FixedValue& x, const MembershipBank& bank,
                                std::size_t input_index);

}  // namespace tsfpi
