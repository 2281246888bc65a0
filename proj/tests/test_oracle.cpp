// SPDX-License-Identifier: Apache-2.0

#include <array>
#include <cmath>

#include "doctest.h"
#include "support/exact.hpp"
#include "tsfpi/oracle.hpp"

using namespace tsfpi;

namespace {

const BankShape kBank = BankShape::uniform_default();
const RuleBase kRules = RuleBase::antisymmetric_default(kBank);

}  // namespace

TEST_CASE("reference inference by hand") {
  // x0 = 0.3: SP 0.8, MP 0.2. x1 = -0.1: SN 0.4, ZZ 0.6.
  // weights 0.4, 0.6, 0.2, 0.2 on C = 0, 0.125, 0.125, 0.25 -> 0.15 / 1.4
  const auto r = fim_reference(0.3, -0.1, kBank, kRules);
  CHECK(r.v_d == doctest::Approx(0.15 / 1.4).epsilon(1e-14));
  CHECK_FALSE(r.zero_denominator);
  CHECK(fim_reference(0.0, 0.0, kBank, kRules).v_d == 0.0);
  CHECK(fim_reference(0.125, 0.0, kBank, kRules).v_d == doctest::Approx(0.0625));
  CHECK(fim_reference(1.0, 1.0, kBank, kRules).v_d == doctest::Approx(0.75));
  CHECK(fim_reference(-1.0, -1.0, kBank, kRules).v_d == doctest::Approx(-0.75));
}

TEST_CASE("reference with linear consequents") {
  BankShape bank;
  for (int i = 0; i < 2; ++i) {
    bank.inputs.push_back({TermShape::right_trapezoid("lo", -0.5, 0.5),
                           TermShape::left_trapezoid("hi", -0.5, 0.5)});
  }
  RuleBase rules;
  rules.terms0 = rules.terms1 = 2;
  rules.rules = {{0.5, 0.0, 0.0}, {0.0, 0.5, 0.0}, {0.0, 0.0, 0.25}, {-0.5, -0.5, 0.1}};
  // x = (0.1, -0.3): lo0 0.4, hi0 0.6, lo1 0.8, hi1 0.2
  const double w[] = {0.4, 0.2, 0.6, 0.2};
  const double y[] = {0.05, -0.15, 0.25, 0.2};
  double num = 0, den = 0;
  for (int g = 0; g < 4; ++g) {
    num += w[g] * y[g];
    den += w[g];
  }
  CHECK(fim_reference(0.1, -0.3, bank, rules).v_d == doctest::Approx(num / den).epsilon(1e-14));
}

TEST_CASE("reference reports an empty rule base") {
  BankShape bank;
  for (int i = 0; i < 2; ++i) {
    bank.inputs.push_back({TermShape::right_trapezoid("lo", -0.75, -0.5),
                           TermShape::left_trapezoid("hi", 0.5, 0.75)});
  }
  RuleBase rules;
  rules.terms0 = rules.terms1 = 2;
  rules.rules.assign(4, {0, 0, 0.25});
  const auto r = fim_reference(0.0, 0.0, bank, rules);
  CHECK(r.zero_denominator);
  CHECK(r.v_d == 0.0);
}

TEST_CASE("grid axis") {
  const auto g = grid_axis(100);
  REQUIRE(g.size() == 100);
  CHECK(g.front() == -1.0);
  CHECK(g.back() == 1.0);
  CHECK(g[1] == doctest::Approx(-1.0 + 2.0 / 99));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(grid_axis(2) == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("grid MSE at the default configuration") {
  // Frozen from the first run; the fixed-point side is bit-exact and the
  // reference is plain double arithmetic.
  const auto r8 = mse_report(8, 4, kBank, kRules);
  CHECK(r8.grid_points == 10000);
  CHECK(r8.mse == doctest::Approx(1.9715862478126756e-05).epsilon(1e-9));
  CHECK(r8.max_abs_err == doctest::Approx(0.011683558558558543).epsilon(1e-9));
  CHECK(r8.max_abs_output == 0.75390625);
  CHECK(r8.zero_denominators == 0);

  const auto r10 = mse_report(10, 4, kBank, kRules);
  CHECK(r10.mse == doctest::Approx(1.2647728108534009e-06).epsilon(1e-9));

  MseOptions q;
  q.reference_input = ReferenceInput::Quantized;
  CHECK(mse_report(8, 4, kBank, kRules, q).mse ==
        doctest::Approx(8.7718857488402823e-06).epsilon(1e-9));
}

TEST_CASE("sweep order and determinism") {
  const std::array<int, 2> ns{8, 10};
  const std::array<int, 2> ts{4, 6};
  MseOptions opts;
  opts.points_per_axis = 40;
  const auto a = mse_sweep(ns, ts, kBank, kRules, opts);
  REQUIRE(a.size() == 4);
  CHECK(a[0].n_bits == 8);
  CHECK(a[0].t_bits == 4);
  CHECK(a[1].n_bits == 8);
  CHECK(a[1].t_bits == 6);
  CHECK(a[2].n_bits == 10);
  for (const auto& r : a) {
    const auto single = mse_report(r.n_bits, r.t_bits, kBank, kRules, opts);
    CHECK(single.mse == r.mse);
    CHECK(r.grid_points == 1600);
  }
}

TEST_CASE("reference controller") {
  ControllerConfig cfg;
  ReferenceController ctl(cfg, kBank, kRules);
  // first step from rest: e = 0.1, e_d = 0.1, x0 = 200 -> clipped to 1
  const double r0 = ctl.step(0.0, 0.1);
  const double want0 = fim_reference(1.0, 0.01, kBank, kRules).v_d;
  CHECK(r0 == doctest::Approx(want0));
  const double r1 = ctl.step(0.0, 0.1);
  CHECK(r1 == doctest::Approx(want0 + fim_reference(0.0, 0.01, kBank, kRules).v_d));
  for (int i = 0; i < 100; ++i) ctl.step(-1.0, 1.0);
  CHECK(ctl.step(-1.0, 1.0) == cfg.v_max);
  ctl.reset();
  CHECK(ctl.step(0.0, 0.0) == 0.0);
}
