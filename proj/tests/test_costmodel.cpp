// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "doctest.h"
#include "tsfpi/costmodel.hpp"
#include "tsfpi/errors.hpp"

using namespace tsfpi;

TEST_CASE("plane coefficients") {
  const auto& os = plane(Variant::OneShot, Quantity::Nlut);
  CHECK(os.intercept == 1682.0);
  CHECK(os.coef_n == 532.2);
  CHECK(os.coef_t == 6.493e-13);
  CHECK(os(8, 4) == doctest::Approx(1682.0 + 532.2 * 8));
  const auto& prs = plane(Variant::Pipeline, Quantity::Rs);
  CHECK(prs.intercept == 18.48);
  CHECK(prs.coef_n == -0.09704);
  CHECK(plane(Variant::OneShot, Quantity::Rs).coef_n == -0.1163);
  CHECK(plane(Variant::Pipeline, Quantity::Nlut).coef_n == 491.1);
}

TEST_CASE("estimates") {
  const auto e = estimate(Variant::OneShot, 8, 4);
  CHECK(e.nlut == doctest::Approx(5939.6));
  CHECK(e.rs_msps == doctest::Approx(12.3096));
  CHECK(e.mflips == doctest::Approx(49 * 12.3096));
  CHECK_FALSE(e.extrapolated);

  const auto p = estimate(Variant::Pipeline, 16, 10, 25);
  CHECK(p.nlut == doctest::Approx(1171.0 + 491.1 * 16));
  CHECK(p.mflips == doctest::Approx(25 * p.rs_msps));

  CHECK(estimate(Variant::Pipeline, 20, 4).extrapolated);
  CHECK(estimate(Variant::OneShot, 12, 2).extrapolated);
  CHECK(in_fit_domain(16, 10));
  CHECK_FALSE(in_fit_domain(7.9, 6));
  CHECK_THROWS_AS(estimate(Variant::OneShot, std::nan(""), 4), ContractError);
  CHECK_THROWS_AS(estimate(Variant::OneShot, 8, 4, 0), ContractError);
}

TEST_CASE("embedded synthesis tables") {
  for (auto v : {Variant::OneShot, Variant::Pipeline}) {
    const auto table = synthesis_table(v);
    REQUIRE(table.size() == 20);
    for (std::size_t i = 0; i < table.size(); ++i) {
      CHECK(table[i].n == 8 + 2 * static_cast<int>(i / 4));
      CHECK(table[i].t == 4 + 2 * static_cast<int>(i % 4));
    }
    CHECK(register_table(v).size() == 5);
  }
  CHECK(synthesis_table(Variant::OneShot)[0].nlut == 6339);
  CHECK(synthesis_table(Variant::OneShot)[0].rs_msps == 12.54);
  CHECK(synthesis_table(Variant::Pipeline)[0].nlut == 5326);
  CHECK(synthesis_table(Variant::Pipeline)[0].rs_msps == 17.62);
  CHECK(register_table(Variant::OneShot)[4].registers == 488);
  CHECK(register_table(Variant::OneShot)[4].nlut == 10595);
  CHECK(register_table(Variant::Pipeline)[4].registers == 1537);
  CHECK(register_table(Variant::Pipeline)[4].rs_msps == 13.41);
}

TEST_CASE("pipelining trades LUTs for throughput") {
  const auto os = synthesis_table(Variant::OneShot);
  const auto p = synthesis_table(Variant::Pipeline);
  for (std::size_t i = 0; i < os.size(); ++i) {
    CHECK(p[i].rs_msps > os[i].rs_msps);
    CHECK(p[i].nlut < os[i].nlut);
  }
}

TEST_CASE("dynamic power saving") {
  CHECK(dynamic_power_saving(451, 66.251, 11779, 6.63) == doctest::Approx(38.2036).epsilon(1e-5));
  CHECK(dynamic_power_saving(100, 2, 100, 2) == 1.0);
  // cubic in frequency
  CHECK(dynamic_power_saving(100, 4, 100, 2) == doctest::Approx(8.0));
  CHECK_THROWS_AS(dynamic_power_saving(0, 1, 1, 1), ContractError);
  CHECK_THROWS_AS(dynamic_power_saving(1, 1, 1, -1), ContractError);
}

TEST_CASE("variant names") {
  CHECK(parse_variant("os") == Variant::OneShot);
  CHECK(parse_variant("pipeline") == Variant::Pipeline);
  CHECK(std::string(to_string(Variant::Pipeline)) == "p");
  CHECK_THROWS_AS(parse_variant("x"), ConfigError);
}
