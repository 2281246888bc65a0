// SPDX-License-Identifier: Apache-2.0

#include "tsfpi/fixed.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>

#include "tsfpi/errors.hpp"

namespace tsfpi {

namespace {

wide_t pow2(int k) { return static_cast<wide_t>(1) << k; }

int bit_length(wide_t v) {
  unsigned __int128 m = v < 0 ? static_cast<unsigned __int128>(-(v + 1)) + 1
                              : static_cast<unsigned __int128>(v);
  int n = 0;
  while (m != 0) {
    m >>= 1;
    ++n;
  }
  return n;
}

wide_t clamp_raw(wide_t raw, const FixedFormat& fmt) {
  return std::clamp(raw, fmt.min_raw(), fmt.max_raw());
}

// v * 2^-right_shift, rounded, then clamped into fmt. right_shift may be
// negative (left shift), in which case the result is exact or saturated.
FixedValue place(wide_t v, int right_shift, Rounding rounding, const FixedFormat& fmt) {
  if (right_shift >= 0) {
    return FixedValue::saturating(shift_right(v, right_shift, rounding), fmt);
  }
  const int left = -right_shift;
  if (v == 0) return FixedValue::zero(fmt);
  if (bit_length(v) + left > 120) {
    return v > 0 ? FixedValue::max_of(fmt) : FixedValue::min_of(fmt);
  }
  return FixedValue::saturating(v * pow2(left), fmt);
}

void require_same_frac(const FixedValue& a, const FixedValue& b, const FixedFormat& out,
                       const char* op) {
  if (a.format().frac_bits() != b.format().frac_bits() ||
      a.format().frac_bits() != out.frac_bits()) {
    throw ContractError(std::string(op) + ": operands " + a.format().to_string() + ", " +
                        b.format().to_string() + " and output " + out.to_string() +
                        " must share frac bits");
  }
}

}  // namespace

FixedFormat::FixedFormat(int total_bits, int frac_bits, bool is_signed)
    : total_(total_bits), frac_(frac_bits), signed_(is_signed) {
  if (total_bits < 1 || total_bits > 64) {
    throw ContractError("fixed format: total bits " + std::to_string(total_bits) +
                        " outside [1, 64]");
  }
  if (frac_bits < 0 || frac_bits > total_bits - (is_signed ? 1 : 0)) {
    throw ContractError("fixed format: frac bits " + std::to_string(frac_bits) +
                        " invalid for " + std::to_string(total_bits) + "-bit " +
                        (is_signed ? "signed" : "unsigned") + " format");
  }
}

FixedFormat FixedFormat::parse(std::string_view text) {
  auto fail = [&] { return ContractError("cannot parse fixed format '" + std::string(text) + "'"); };
  if (text.size() < 4 || (text[0] != 's' && text[0] != 'u')) throw fail();
  const auto dot = text.find('.');
  if (dot == std::string_view::npos) throw fail();
  int total = 0;
  int frac = 0;
  const auto* first = text.data() + 1;
  const auto* mid = text.data() + dot;
  const auto* last = text.data() + text.size();
  auto r1 = std::from_chars(first, mid, total);
  if (r1.ec != std::errc{} || r1.ptr != mid) throw fail();
  auto r2 = std::from_chars(mid + 1, last, frac);
  if (r2.ec != std::errc{} || r2.ptr != last) throw fail();
  return FixedFormat(total, frac, text[0] == 's');
}

wide_t FixedFormat::min_raw() const { return signed_ ? -pow2(total_ - 1) : 0; }

wide_t FixedFormat::max_raw() const {
  return signed_ ? pow2(total_ - 1) - 1 : pow2(total_) - 1;
}

double FixedFormat::lsb() const { return std::ldexp(1.0, -frac_); }

std::string FixedFormat::to_string() const {
  return (signed_ ? "s" : "u") + std::to_string(total_) + "." + std::to_string(frac_);
}

FixedValue::FixedValue(wide_t raw, FixedFormat format) : raw_(raw), format_(format) {
  if (raw < format.min_raw() || raw > format.max_raw()) {
    throw ContractError("raw code " + tsfpi::to_string(raw) + " does not fit " +
                        format.to_string());
  }
}

FixedValue FixedValue::saturating(wide_t raw, FixedFormat format) {
  return {clamp_raw(raw, format), format};
}

double FixedValue::to_double() const {
  return std::ldexp(static_cast<double>(raw_), -format_.frac_bits());
}

wide_t shift_right(wide_t v, int shift, Rounding rounding) {
  if (shift < 0) throw ContractError("shift_right: negative shift");
  if (shift == 0) return v;
  if (rounding == Rounding::Floor) {
    return shift >= 127 ? (v < 0 ? -1 : 0) : (v >> shift);
  }
  if (shift > 120) {
    // Fold the bits below the rounding position into a sticky bit; the final
    // rounding only needs to know whether they were nonzero.
    const int pre = shift - 120;
    const wide_t head = pre >= 127 ? (v < 0 ? -1 : 0) : (v >> pre);
    const bool sticky = pre >= 127 ? v != head : (v - head * pow2(pre)) != 0;
    return shift_right(head | (sticky ? 1 : 0), 120, rounding);
  }
  const wide_t q = v >> shift;
  const wide_t rem = v - q * pow2(shift);
  const wide_t half = pow2(shift - 1);
  if (rem > half || (rem == half && (q & 1) != 0)) return q + 1;
  return q;
}

FixedValue quantize(double x, FixedFormat fmt, Rounding rounding) {
  if (std::isnan(x)) throw NumericError("quantize: NaN input");
  const double scaled = std::ldexp(x, fmt.frac_bits());
  const double r = rounding == Rounding::Floor ? std::floor(scaled) : std::nearbyint(scaled);
  const int top = fmt.is_signed() ? fmt.total_bits() - 1 : fmt.total_bits();
  if (r >= std::ldexp(1.0, top)) return FixedValue::max_of(fmt);
  if (fmt.is_signed() ? r < -std::ldexp(1.0, top) : r < 0.0) return FixedValue::min_of(fmt);
  return {static_cast<wide_t>(r), fmt};
}

FixedValue requantize(const FixedValue& a, FixedFormat out_fmt, Rounding rounding) {
  return place(a.raw(), a.format().frac_bits() - out_fmt.frac_bits(), rounding, out_fmt);
}

FixedValue fx_add(const FixedValue& a, const FixedValue& b, FixedFormat out_fmt) {
  require_same_frac(a, b, out_fmt, "fx_add");
  return FixedValue::saturating(a.raw() + b.raw(), out_fmt);
}

FixedValue fx_sub(const FixedValue& a, const FixedValue& b, FixedFormat out_fmt) {
  require_same_frac(a, b, out_fmt, "fx_sub");
  return FixedValue::saturating(a.raw() - b.raw(), out_fmt);
}

FixedValue fx_mul(const FixedValue& a, const FixedValue& b, FixedFormat out_fmt,
                  Rounding rounding) {
  if (a.format().total_bits() + b.format().total_bits() > 126) {
    throw ContractError("fx_mul: product of " + a.format().to_string() + " and " +
                        b.format().to_string() + " exceeds the 128-bit carrier");
  }
  const int shift = a.format().frac_bits() + b.format().frac_bits() - out_fmt.frac_bits();
  return place(a.raw() * b.raw(), shift, rounding, out_fmt);
}

FixedValue fx_scale(const FixedValue& a, double gain, FixedFormat out_fmt, Rounding rounding) {
  if (std::isnan(gain)) throw NumericError("fx_scale: NaN gain");
  if (a.raw() == 0 || gain == 0.0) return FixedValue::zero(out_fmt);
  if (std::isinf(gain)) {
    return (gain > 0) == (a.raw() > 0) ? FixedValue::max_of(out_fmt) : FixedValue::min_of(out_fmt);
  }
  int exponent = 0;
  const double mantissa = std::frexp(gain, &exponent);
  const auto m = static_cast<std::int64_t>(std::ldexp(mantissa, 53));
  // gain == m * 2^(exponent - 53) exactly.
  const int product_frac = a.format().frac_bits() + 53 - exponent;
  return place(a.raw() * static_cast<wide_t>(m), product_frac - out_fmt.frac_bits(), rounding,
               out_fmt);
}

FixedValue fx_min(const FixedValue& a, const FixedValue& b) {
  require_same_frac(a, b, a.format(), "fx_min");
  return fx_compare(b, a) < 0 ? b : a;
}

FixedValue fx_max(const FixedValue& a, const FixedValue& b) {
  require_same_frac(a, b, a.format(), "fx_max");
  return fx_compare(b, a) > 0 ? b : a;
}

std::strong_ordering fx_compare(const FixedValue& a, const FixedValue& b) {
  const int fa = a.format().frac_bits();
  const int fb = b.format().frac_bits();
  if (fa == fb) return a.raw() <=> b.raw();
  // Bring the finer operand down to the coarser grid; the remainder breaks ties.
  const bool a_finer = fa > fb;
  const wide_t fine = a_finer ? a.raw() : b.raw();
  const wide_t coarse = a_finer ? b.raw() : a.raw();
  const int s = std::abs(fa - fb);
  const wide_t q = fine >> s;
  const bool has_rem = fine != q * pow2(s);
  std::strong_ordering fine_vs_coarse = q <=> coarse;
  if (fine_vs_coarse == 0 && has_rem) fine_vs_coarse = std::strong_ordering::greater;
  if (a_finer) return fine_vs_coarse;
  return 0 <=> fine_vs_coarse;
}

float fx_to_f32(const FixedValue& a) {
  float f;
  if (a.raw() > static_cast<wide_t>(INT64_MAX)) {
    f = static_cast<float>(static_cast<std::uint64_t>(a.raw()));
  } else {
    f = static_cast<float>(static_cast<std::int64_t>(a.raw()));
  }
  return std::ldexp(f, -a.format().frac_bits());
}

FixedValue f32_to_fx(float v, FixedFormat fmt, Rounding rounding) {
  if (std::isnan(v)) throw NumericError("f32_to_fx: NaN input");
  return quantize(static_cast<double>(v), fmt, rounding);
}

int ceil_log2(std::uint64_t count) {
  if (count <= 1) return 0;
  return 64 - std::countl_zero(count - 1);
}

std::string to_string(wide_t v) {
  if (v == 0) return "0";
  const bool neg = v < 0;
  unsigned __int128 m = neg ? static_cast<unsigned __int128>(-(v + 1)) + 1
                            : static_cast<unsigned __int128>(v);
  std::string out;
  while (m != 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(m % 10)));
    m /= 10;
  }
  if (neg) out.push_back('-');
  return {out.rbegin(), out.rend()};
}

}  // namespace tsfpi
