// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>

#include "doctest.h"
#include "support/exact.hpp"
#include "tsfpi/errors.hpp"
#include "tsfpi/fixed.hpp"

using namespace tsfpi;
using exact::Rational;

namespace {

FixedValue fv(double x, const char* fmt) { return quantize(x, FixedFormat::parse(fmt)); }

}  // namespace

TEST_CASE("format bounds and parsing") {
  const auto s = FixedFormat::parse("s9.8");
  CHECK(s.total_bits() == 9);
  CHECK(s.frac_bits() == 8);
  CHECK(s.is_signed());
  CHECK(s.int_bits() == 0);
  CHECK(s.min_raw() == -256);
  CHECK(s.max_raw() == 255);
  CHECK(s.to_string() == "s9.8");

  const auto u = FixedFormat::parse("u8.8");
  CHECK(u.min_raw() == 0);
  CHECK(u.max_raw() == 255);
  CHECK(u.lsb() == doctest::Approx(1.0 / 256));

  CHECK_THROWS_AS(FixedFormat::parse("q9.8"), ContractError);
  CHECK_THROWS_AS(FixedFormat::parse("s9"), ContractError);
  CHECK_THROWS_AS(FixedFormat::s(9, 9), ContractError);
  CHECK_THROWS_AS(FixedFormat::u(65, 0), ContractError);
  CHECK_NOTHROW(FixedFormat::u(8, 8));
  CHECK_THROWS_AS(FixedValue(256, FixedFormat::s(9, 8)), ContractError);
}

TEST_CASE("quantize") {
  const auto s98 = FixedFormat::s(9, 8);
  CHECK(quantize(0.5, s98).raw() == 128);
  CHECK(quantize(-0.5, s98).raw() == -128);
  // floor, not truncation toward zero
  CHECK(quantize(-0.001, s98).raw() == -1);
  CHECK(quantize(0.3, s98).raw() == 76);
  CHECK(quantize(0.3, s98, Rounding::NearestEven).raw() == 77);
  CHECK(quantize(2.0, s98).raw() == 255);
  CHECK(quantize(-2.0, s98).raw() == -256);
  CHECK(quantize(-0.25, FixedFormat::u(8, 8)).raw() == 0);
  CHECK(quantize(std::numeric_limits<double>::infinity(), s98).raw() == 255);
  CHECK_THROWS_AS(quantize(std::nan(""), s98), NumericError);

  // ties to even
  CHECK(quantize(2.5 / 256, s98, Rounding::NearestEven).raw() == 2);
  CHECK(quantize(3.5 / 256, s98, Rounding::NearestEven).raw() == 4);
}

TEST_CASE("quantize is monotone") {
  exact::Gen gen(11);
  const auto fmt = FixedFormat::s(7, 4);
  for (int i = 0; i < 20000; ++i) {
    const double a = gen.real(-6.0, 6.0);
    const double b = gen.real(-6.0, 6.0);
    const auto lo = std::min(a, b), hi = std::max(a, b);
    CHECK(quantize(lo, fmt).raw() <= quantize(hi, fmt).raw());
    CHECK(quantize(lo, fmt, Rounding::NearestEven).raw() <=
          quantize(hi, fmt, Rounding::NearestEven).raw());
  }
}

TEST_CASE("requantize") {
  const auto a = fv(-0.3, "s9.8");  // -77
  CHECK(a.raw() == -77);
  CHECK(requantize(a, FixedFormat::s(12, 11)).raw() == -77 * 8);
  CHECK(requantize(a, FixedFormat::s(5, 4)).raw() == -5);  // floor(-4.8125)
  CHECK(requantize(a, FixedFormat::s(5, 4), Rounding::NearestEven).raw() == -5);
  CHECK(requantize(a, FixedFormat::u(4, 4)).raw() == 0);
  CHECK(requantize(FixedValue::max_of(FixedFormat::s(12, 8)), FixedFormat::s(9, 8)).raw() == 255);
}

TEST_CASE("fx_add") {
  CHECK(fx_add(fv(0.25, "u8.8"), fv(0.5, "u8.8"), FixedFormat::u(9, 8)).to_double() == 0.75);
  const auto s98 = FixedFormat::s(9, 8);
  CHECK(fx_add(FixedValue::max_of(s98), FixedValue::max_of(s98), s98) == FixedValue::max_of(s98));
  CHECK(fx_add(fv(-0.5, "s9.8"), fv(0.5, "s9.8"), FixedFormat::s(10, 8)).is_zero());
  CHECK(fx_sub(FixedValue::min_of(s98), FixedValue::max_of(s98), s98) == FixedValue::min_of(s98));
  CHECK_THROWS_AS(fx_add(fv(0.5, "s9.8"), fv(0.5, "s10.9"), s98), ContractError);
}

TEST_CASE("fx_mul") {
  const auto x = fv(-0.59375, "s9.8");
  CHECK(fx_mul(x, fv(1.0, "s10.8"), FixedFormat::s(9, 8)) == x);
  CHECK(fx_mul(fv(0.5, "u8.8"), fv(0.5, "u8.8"), FixedFormat::u(8, 8)).to_double() == 0.25);

  // 0.3 -> 76 / 256; 76 * 76 = 5776, shifted by 8 with floor -> 22
  const auto p = fv(0.3, "s9.8");
  CHECK(fx_mul(p, p, FixedFormat::s(9, 8)).raw() == 22);
  // 5776 / 256 = 22.5625 -> 23 to nearest
  CHECK(fx_mul(p, p, FixedFormat::s(9, 8), Rounding::NearestEven).raw() == 23);
}

TEST_CASE("fx_mul by a negative operand floors") {
  // -0.3 quantizes to -77; 76 * -77 = -5852; -5852 / 256 = -22.86 -> -23
  CHECK(fv(-0.3, "s9.8").raw() == -77);
  CHECK(fx_mul(fv(0.3, "s9.8"), fv(-0.3, "s9.8"), FixedFormat::s(9, 8)).raw() == -23);
}

TEST_CASE("fx_scale is exact before the single rounding") {
  const auto e = FixedValue(3, FixedFormat::s(14, 12));
  // 3 * 2^-12 * 2000 = 1.46484375, code 6000; s13.12 tops out at 4095
  CHECK(fx_scale(e, 2000.0, FixedFormat::s(14, 12)).raw() == 6000);
  CHECK(fx_scale(e, 2000.0, FixedFormat::s(13, 12)).raw() == 4095);
  // 3 * 0.1 = 0.3 LSB: floor gives 0, and -1 for the negative input
  CHECK(fx_scale(e, 0.1, FixedFormat::s(13, 12)).raw() == 0);
  CHECK(fx_scale(FixedValue(-3, FixedFormat::s(14, 12)), 0.1, FixedFormat::s(13, 12)).raw() == -1);
  CHECK_THROWS_AS(fx_scale(e, std::nan(""), FixedFormat::s(13, 12)), NumericError);
}

TEST_CASE("fx_min / fx_max") {
  const auto a = fv(0.5, "u8.8"), b = fv(0.25, "u8.8"), z = fv(0.0, "u8.8");
  CHECK(fx_min(a, b) == b);
  CHECK(fx_max(a, b) == a);
  CHECK(fx_min(a, a) == a);
  CHECK(fx_min(z, a) == z);
  CHECK_THROWS_AS(fx_min(a, fv(0.5, "s10.9")), ContractError);

  exact::Gen gen(5);
  const auto fmt = FixedFormat::u(6, 6);
  for (int i = 0; i < 2000; ++i) {
    const FixedValue x(gen.integer(0, 63), fmt), y(gen.integer(0, 63), fmt),
        w(gen.integer(0, 63), fmt);
    CHECK(fx_min(x, y) == fx_min(y, x));
    CHECK(fx_min(x, fx_min(y, w)) == fx_min(fx_min(x, y), w));
  }
}

TEST_CASE("fx_compare crosses formats exactly") {
  CHECK(fx_compare(fv(0.5, "s9.8"), fv(0.5, "u4.1")) == std::strong_ordering::equal);
  CHECK(fx_compare(FixedValue(1, FixedFormat::s(40, 38)), FixedValue(0, FixedFormat::s(2, 0))) ==
        std::strong_ordering::greater);
  CHECK(fx_compare(fv(-1.0, "s9.8"), fv(0.25, "u8.8")) == std::strong_ordering::less);
}

TEST_CASE("binary32 conversions") {
  CHECK(fx_to_f32(fv(0.75, "s9.8")) == 0.75f);
  // 2^24 + 1 is not a binary32; ties to even goes down to 2^24
  CHECK(fx_to_f32(FixedValue((1 << 24) + 1, FixedFormat::s(32, 0))) == 16777216.0f);
  // 2^24 + 3 ties up to 2^24 + 4
  CHECK(fx_to_f32(FixedValue((1 << 24) + 3, FixedFormat::s(32, 0))) == 16777220.0f);

  const auto s98 = FixedFormat::s(9, 8);
  CHECK(f32_to_fx(0.3f, s98).raw() == 76);
  CHECK(f32_to_fx(-0.3f, s98).raw() == -77);
  CHECK(f32_to_fx(std::numeric_limits<float>::infinity(), s98).raw() == 255);
  CHECK(f32_to_fx(-std::numeric_limits<float>::infinity(), s98).raw() == -256);
  CHECK_THROWS_AS(f32_to_fx(std::nanf(""), s98), NumericError);
}

TEST_CASE("binary32 round trip up to 24 bits") {
  exact::Gen gen(17);
  for (int i = 0; i < 20000; ++i) {
    const int total = static_cast<int>(gen.integer(2, 24));
    const int frac = static_cast<int>(gen.integer(0, std::min(23, total - 1)));
    const auto fmt = FixedFormat::s(total, frac);
    const FixedValue a(gen.integer(static_cast<std::int64_t>(fmt.min_raw()),
                                   static_cast<std::int64_t>(fmt.max_raw())),
                       fmt);
    CHECK(f32_to_fx(fx_to_f32(a), fmt) == a);
  }
}

TEST_CASE("fx_to_f32 rounds like the rational oracle") {
  exact::Gen gen(23);
  const auto fmt = FixedFormat::s(48, 20);
  for (int i = 0; i < 20000; ++i) {
    const FixedValue a(gen.integer(-(std::int64_t{1} << 46), std::int64_t{1} << 46), fmt);
    const Rational want = exact::round_f32(Rational::dyadic(a.raw(), 20));
    CHECK(Rational::from_double(static_cast<double>(fx_to_f32(a))) == want);
  }
}

TEST_CASE("shift_right and ceil_log2") {
  CHECK(shift_right(-5, 1, Rounding::Floor) == -3);
  CHECK(shift_right(5, 1, Rounding::Floor) == 2);
  CHECK(shift_right(5, 1, Rounding::NearestEven) == 2);
  CHECK(shift_right(7, 1, Rounding::NearestEven) == 4);
  CHECK(shift_right(-7, 1, Rounding::NearestEven) == -4);
  CHECK(shift_right(9, 0, Rounding::Floor) == 9);

  CHECK(ceil_log2(1) == 0);
  CHECK(ceil_log2(2) == 1);
  CHECK(ceil_log2(4) == 2);
  CHECK(ceil_log2(49) == 6);
  CHECK(ceil_log2(64) == 6);
  CHECK(ceil_log2(65) == 7);
  CHECK(to_string(static_cast<wide_t>(-1234567890123LL) * 1000000) == "-1234567890123000000");
}
