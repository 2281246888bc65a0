// SPDX-License-Identifier: Apache-2.0

#pragma once

// Parametric fixed-point formats in the [sT.W] / [uT.W] notation: T total
// bits, W of them fractional, signed or unsigned. Every operation works on an
// explicit output format supplied by the caller (the datapath node) and
// saturates into it; nothing wraps.
//
// Raw codes are carried in 128-bit integers so that no sum or product of the
// widths used by the controller (at most 64 data bits) overflows before the
// explicit saturation step.

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace tsfpi {

using wide_t = __int128;

// How dropped fractional bits are handled. The hardware model uses Floor
// (two's-complement truncation); NearestEven exists for sensitivity studies.
enum class Rounding { Floor, NearestEven };

class FixedFormat {
 public:
  // Throws ContractError unless 1 <= total <= 64 and
  // 0 <= frac <= total - (is_signed ? 1 : 0).
  FixedFormat(int total_bits, int frac_bits, bool is_signed);

  static FixedFormat s(int total_bits, int frac_bits) { return {total_bits, frac_bits, true}; }
  static FixedFormat u(int total_bits, int frac_bits) { return {total_bits, frac_bits, false}; }

  // Accepts "s9.8" / "u8.8".
  static FixedFormat parse(std::string_view text);

  int total_bits() const { return total_; }
  int frac_bits() const { return frac_; }
  bool is_signed() const { return signed_; }
  int int_bits() const { return total_ - frac_ - (signed_ ? 1 : 0); }

  wide_t min_raw() const;
  wide_t max_raw() const;
  double lsb() const;

  std::string to_string() const;

  friend bool operator==(const FixedFormat&, const FixedFormat&) = default;

 private:
  int total_;
  int frac_;
  bool signed_;
};

// A sample in a fixed-point format. real value == raw * 2^-frac_bits exactly.
class FixedValue {
 public:
  FixedValue() : FixedValue(0, FixedFormat::s(2, 0)) {}

  // Throws ContractError if raw does not fit the format.
  FixedValue(wide_t raw, FixedFormat format);

  static FixedValue zero(FixedFormat format) { return {0, format}; }
  static FixedValue max_of(FixedFormat format) { return {format.max_raw(), format}; }
  static FixedValue min_of(FixedFormat format) { return {format.min_raw(), format}; }
  // Clamps raw into the format instead of rejecting it.
  static FixedValue saturating(wide_t raw, FixedFormat format);

  wide_t raw() const { return raw_; }
  std::int64_t raw64() const { return static_cast<std::int64_t>(raw_); }
  const FixedFormat& format() const { return format_; }

  double to_double() const;
  bool is_zero() const { return raw_ == 0; }

  friend bool operator==(const FixedValue&, const FixedValue&) = default;

 private:
  wide_t raw_;
  FixedFormat format_;
};

// raw = saturate(round(x * 2^frac)). Throws NumericError on NaN.
FixedValue quantize(double x, FixedFormat fmt, Rounding rounding = Rounding::Floor);

// Moves a value into another format: exact when frac bits grow, rounded when
// they shrink, saturated in both cases.
FixedValue requantize(const FixedValue& a, FixedFormat out_fmt,
                      Rounding rounding = Rounding::Floor);

// Exact sum / difference saturated into out_fmt. Both operands and out_fmt
// must share frac_bits (ContractError otherwise).
FixedValue fx_add(const FixedValue& a, const FixedValue& b, FixedFormat out_fmt);
FixedValue fx_sub(const FixedValue& a, const FixedValue& b, FixedFormat out_fmt);

// Full-precision product shifted right by (a.frac + b.frac - out.frac) with
// the given rounding, then saturated.
FixedValue fx_mul(const FixedValue& a, const FixedValue& b, FixedFormat out_fmt,
                  Rounding rounding = Rounding::Floor);

// Multiplies by a real gain as an exact rational (a double is a dyadic
// rational), then rounds and saturates into out_fmt.
FixedValue fx_scale(const FixedValue& a, double gain, FixedFormat out_fmt,
                    Rounding rounding = Rounding::Floor);

// The smaller of the two by real value. Operands must share frac_bits.
FixedValue fx_min(const FixedValue& a, const FixedValue& b);
FixedValue fx_max(const FixedValue& a, const FixedValue& b);

// Exact comparison of real values across arbitrary formats.
std::strong_ordering fx_compare(const FixedValue& a, const FixedValue& b);

// Nearest binary32 to the value, ties to even.
float fx_to_f32(const FixedValue& a);

// quantize() applied to a binary32 value. NaN throws NumericError, +-Inf
// saturates.
FixedValue f32_to_fx(float v, FixedFormat fmt, Rounding rounding = Rounding::Floor);

// Right shift of a wide integer with the selected rounding (shift >= 0).
wide_t shift_right(wide_t v, int shift, Rounding rounding);

// Number of bits needed to index `count` items, i.e. ceil(log2(count)).
int ceil_log2(std::uint64_t count);

std::string to_string(wide_t v);

}  // namespace tsfpi
