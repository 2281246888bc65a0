// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "support/fim_oracle.hpp"
#include "tsfpi/errors.hpp"
#include "tsfpi/membership.hpp"

using namespace tsfpi;

namespace {

FixedValue in(double x, int n) { return quantize(x, FixedFormat::s(n + 1, n)); }

// Random but valid two-input bank with non-dyadic breakpoints: evenly
// spread centres, each jittered by up to 0.05.
BankShape random_bank(exact::Gen& gen, int terms) {
  BankShape bank;
  for (int i = 0; i < 2; ++i) {
    std::vector<double> c;
    for (int j = 0; j < terms; ++j) {
      c.push_back(-0.9 + 1.8 * j / (terms - 1) + gen.real(-0.05, 0.05));
    }
    std::vector<TermShape> shapes;
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (j == 0) shapes.push_back(TermShape::right_trapezoid("a", c[0], c[1]));
      else if (j + 1 == c.size()) shapes.push_back(TermShape::left_trapezoid("z", c[j - 1], c[j]));
      else shapes.push_back(TermShape::triangle("m", c[j - 1], c[j], c[j + 1]));
    }
    bank.inputs.push_back(shapes);
  }
  return bank;
}

}  // namespace

TEST_CASE("shape validation") {
  CHECK_THROWS_AS(TermShape::right_trapezoid("x", 0.5, 0.5).validate(), ConfigError);
  CHECK_THROWS_AS(TermShape::left_trapezoid("x", 0.5, 0.2).validate(), ConfigError);
  CHECK_THROWS_AS(TermShape::triangle("x", 0.0, 0.0, 0.5).validate(), ConfigError);
  CHECK_THROWS_AS(TermShape::triangle("x", -1.5, 0.0, 0.5).validate(), ConfigError);
  CHECK_THROWS_AS(TermShape::lookup("x", {{0.0, 0.5}}).validate(), ConfigError);
  CHECK_THROWS_AS(TermShape::lookup("x", {{0.0, 0.5}, {0.0, 0.7}}).validate(), ConfigError);
  CHECK_THROWS_AS(parse_term_kind("gaussian"), ConfigError);
  // an edge narrower than one T step collapses
  CHECK_THROWS_AS(MembershipSpec::from_shape(TermShape::right_trapezoid("x", 0.1, 0.12), 4, 8),
                  ConfigError);
}

TEST_CASE("default bank layout") {
  const auto bank = BankShape::uniform_default();
  REQUIRE(bank.inputs.size() == 2);
  REQUIRE(bank.inputs[0].size() == 7);
  const char* labels[] = {"LN", "MN", "SN", "ZZ", "SP", "MP", "LP"};
  const auto centres = BankShape::centres(bank.inputs[0]);
  for (std::size_t j = 0; j < 7; ++j) {
    CHECK(bank.inputs[0][j].label == labels[j]);
    CHECK(centres[j] == doctest::Approx(-0.75 + 0.25 * static_cast<double>(j)));
  }
  CHECK(bank.inputs[0].front().kind == TermKind::RightTrapezoid);
  CHECK(bank.inputs[0].back().kind == TermKind::LeftTrapezoid);
}

TEST_CASE("quantized constants") {
  // W = 2T + 1; 1/(0.25) = 4 is exact
  const auto spec = MembershipSpec::from_shape(TermShape::triangle("t", -0.25, 0.0, 0.25), 4, 8);
  CHECK(spec.m.format() == FixedFormat::s(9, 4));
  CHECK(spec.rise_slope.to_double() == 4.0);
  CHECK(spec.fall_slope.to_double() == 4.0);
  CHECK(spec.c == spec.m);
  CHECK(spec.f == spec.m);
  // 1/(1/3 quantized to 5/16) = 3.2 -> floor to 51/16
  const auto odd = MembershipSpec::from_shape(TermShape::right_trapezoid("r", 0.0, 1.0 / 3), 4, 8);
  CHECK(odd.d.raw() == 5);
  CHECK(odd.fall_slope.raw() == 51);
}

TEST_CASE("trapezoids and triangles at landmarks") {
  const int n = 10;
  const MembershipBank bank(BankShape::uniform_default(), n, 6);
  const auto terms = bank.terms(0);
  const auto& ln = terms[0];
  const auto& zz = terms[3];
  const auto& lp = terms[6];
  const wide_t one = (1 << n) - 1;

  CHECK(mu_right_trapezoid(in(-0.75, n), ln, n).raw() == one);
  CHECK(mu_right_trapezoid(in(-1.0, n), ln, n).raw() == one);
  CHECK(mu_right_trapezoid(in(-0.4, n), ln, n).raw() == 0);
  CHECK(mu_right_trapezoid(in(-0.625, n), ln, n).raw() == 512);
  CHECK(mu_left_trapezoid(in(0.8, n), lp, n).raw() == one);
  CHECK(mu_left_trapezoid(in(0.4, n), lp, n).raw() == 0);
  CHECK(mu_left_trapezoid(in(0.625, n), lp, n).raw() == 512);

  CHECK(mu_triangle(in(0.0, n), zz, n).raw() == one);
  CHECK(mu_triangle(in(-0.25, n), zz, n).raw() == 0);
  CHECK(mu_triangle(in(0.25, n), zz, n).raw() == 0);
  CHECK(mu_triangle(in(-0.125, n), zz, n).raw() == 512);
  CHECK(mu_triangle(in(0.125, n), zz, n).raw() == 512);

  CHECK_THROWS_AS(mu_triangle(in(0.0, n), ln, n), ContractError);
  CHECK_THROWS_AS(mu(in(0.0, n + 1), zz, bank), ContractError);
}

TEST_CASE("fuzzify examples") {
  const int n = 12;
  const MembershipBank bank(BankShape::uniform_default(), n, 8);
  const wide_t one = (1 << n) - 1;

  auto at_zero = fuzzify(in(0.0, n), bank, 0);
  REQUIRE(at_zero.size() == 7);
  for (std::size_t j = 0; j < 7; ++j) CHECK(at_zero[j].raw() == (j == 3 ? one : 0));

  auto at_m1 = fuzzify(in(-1.0, n), bank, 1);
  for (std::size_t j = 0; j < 7; ++j) CHECK(at_m1[j].raw() == (j == 0 ? one : 0));

  // 1/6 sits between ZZ (0) and SP (0.25) at code 682; both slopes are 4,
  // so ZZ = (1024 - 682) * 4 and SP = 682 * 4
  auto sixth = fuzzify(in(1.0 / 6, n), bank, 0);
  CHECK(sixth[3].raw() == 1368);
  CHECK(sixth[4].raw() == 2728);
  double sum = 0;
  for (const auto& v : sixth) sum += v.to_double();
  CHECK(std::abs(sum - 1.0) <= std::ldexp(1.0, 2 - n) + std::ldexp(1.0, 2 - 8));
  CHECK_THROWS_AS(fuzzify(in(0.0, n), bank, 2), ContractError);
}

TEST_CASE("degrees stay in uN.N and near a partition of unity") {
  for (int n : {6, 8, 10}) {
    for (int t : {2, 4, 6}) {
      const MembershipBank bank(BankShape::uniform_default(), n, t);
      const auto fmt = bank.input_format();
      const double bound = std::ldexp(1.0, 2 - n) + std::ldexp(1.0, 2 - t);
      for (wide_t code = fmt.min_raw(); code <= fmt.max_raw(); ++code) {
        const FixedValue x(code, fmt);
        double sum = 0;
        for (const auto& v : fuzzify(x, bank, 0)) {
          CHECK(v.format() == FixedFormat::u(n, n));
          sum += v.to_double();
        }
        CHECK(std::abs(sum - 1.0) <= bound);
      }
    }
  }
}

TEST_CASE("error against the real-valued shape is bounded") {
  // Dyadic default bank: breakpoints and slopes are exact.
  for (int n : {6, 9, 12}) {
    for (int t : {2, 5, 8}) {
      const auto shape = BankShape::uniform_default();
      const MembershipBank bank(shape, n, t);
      const auto fmt = bank.input_format();
      const double bound = std::ldexp(1.0, 1 - n) + std::ldexp(1.0, 1 - t);
      for (wide_t code = fmt.min_raw(); code <= fmt.max_raw(); ++code) {
        const FixedValue x(code, fmt);
        const auto degrees = fuzzify(x, bank, 0);
        for (std::size_t j = 0; j < degrees.size(); ++j) {
          CHECK(std::abs(degrees[j].to_double() - shape.inputs[0][j].evaluate(x.to_double())) <=
                bound);
        }
      }
    }
  }
  // Off-grid breakpoints move by up to 2^-T, which the slope magnifies.
  exact::Gen gen(41);
  for (int trial = 0; trial < 20; ++trial) {
    const auto shape = random_bank(gen, 5);
    double steepest = 0;
    for (const auto& s : shape.inputs[0]) {
      if (s.kind == TermKind::RightTrapezoid) steepest = std::max(steepest, 1 / (s.d - s.c));
      if (s.kind == TermKind::LeftTrapezoid) steepest = std::max(steepest, 1 / (s.f - s.e));
      if (s.kind == TermKind::Triangle) {
        steepest = std::max({steepest, 1 / (s.m - s.e), 1 / (s.d - s.m)});
      }
    }
    for (int n : {6, 9, 12}) {
      for (int t : {5, 8}) {
        const MembershipBank bank(shape, n, t);
        const auto fmt = bank.input_format();
        const double bound = std::ldexp(1.0, 1 - n) + (1 + steepest) * std::ldexp(1.0, 1 - t);
        for (wide_t code = fmt.min_raw(); code <= fmt.max_raw(); code += 3) {
          const FixedValue x(code, fmt);
          const auto degrees = fuzzify(x, bank, 0);
          for (std::size_t j = 0; j < degrees.size(); ++j) {
            const double want = shape.inputs[0][j].evaluate(x.to_double());
            CHECK(std::abs(degrees[j].to_double() - want) <= bound);
          }
        }
      }
    }
  }
}

TEST_CASE("bit-exact against the rational membership oracle") {
  exact::Gen gen(43);
  for (int trial = 0; trial < 30; ++trial) {
    const auto shape = random_bank(gen, static_cast<int>(gen.integer(2, 6)));
    const int n = static_cast<int>(gen.integer(3, 9));
    const int t = static_cast<int>(gen.integer(4, 10));
    RuleBase rules;
    rules.terms0 = shape.inputs[0].size();
    rules.terms1 = shape.inputs[1].size();
    rules.rules.assign(rules.terms0 * rules.terms1, {});
    const exact::FimOracle oracle(shape, rules, n, t);
    const MembershipBank bank(shape, n, t);
    const auto fmt = bank.input_format();
    for (std::size_t i = 0; i < 2; ++i) {
      for (wide_t code = fmt.min_raw(); code <= fmt.max_raw(); ++code) {
        const auto degrees = fuzzify(FixedValue(code, fmt), bank, i);
        for (std::size_t j = 0; j < degrees.size(); ++j) {
          REQUIRE(degrees[j].raw() == oracle.mu(i, j, code));
        }
      }
    }
  }
}

TEST_CASE("triangle is monotone on each side") {
  const int n = 10;
  const auto shape = TermShape::triangle("t", -0.37, 0.11, 0.58);
  const auto spec = MembershipSpec::from_shape(shape, 6, n);
  const auto fmt = FixedFormat::s(n + 1, n);
  wide_t prev = -1;
  bool falling = false;
  for (wide_t code = fmt.min_raw(); code <= fmt.max_raw(); ++code) {
    const FixedValue x(code, fmt);
    const wide_t v = mu_triangle(x, spec, n).raw();
    if (!falling && fx_compare(x, spec.m) >= 0) {
      falling = true;
      prev = v;
      continue;
    }
    if (falling) CHECK(v <= prev);
    else CHECK(v >= prev);
    prev = v;
  }
}

TEST_CASE("lookup terms") {
  const int n = 6;
  const auto shape = TermShape::lookup("bump", {{-1.0, 0.0}, {0.0, 1.0}, {1.0, 0.0}});
  const auto spec = MembershipSpec::from_shape(shape, 4, n);
  CHECK(spec.table.size() == 128);
  CHECK(mu_lookup(in(0.0, n), spec, n).raw() == 63);  // 1.0 saturates in u6.6
  CHECK(mu_lookup(in(-0.5, n), spec, n).raw() == 32);
  CHECK(mu_lookup(in(-1.0, n), spec, n).raw() == 0);
  CHECK_THROWS_AS(mu_lookup(in(0.0, n + 1), spec, n + 1), ContractError);
  CHECK_THROWS_AS(MembershipSpec::from_shape(shape, 4, 21), ConfigError);
}
