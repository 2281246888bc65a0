// SPDX-License-Identifier: Apache-2.0

#pragma once

// Exact arithmetic for test oracles. Nothing here calls into the library's
// fixed-point code: values are plain rationals over __int128 and every
// quantization step is spelled out again from its definition.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>

namespace exact {

using i128 = __int128;

inline i128 iabs(i128 v) { return v < 0 ? -v : v; }

inline i128 gcd(i128 a, i128 b) {
  a = iabs(a);
  b = iabs(b);
  while (b != 0) {
    const i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// floor(a / b) for b > 0.
inline i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

inline i128 pow2(int k) { return static_cast<i128>(1) << k; }

struct Rational {
  i128 num = 0;
  i128 den = 1;

  Rational() = default;
  Rational(i128 n) : num(n), den(1) {}  // NOLINT: implicit from integers on purpose
  Rational(i128 n, i128 d) : num(n), den(d) {
    if (den == 0) throw std::domain_error("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const i128 g = gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  // raw * 2^-frac
  static Rational dyadic(i128 raw, int frac) { return {raw, pow2(frac)}; }

  // Every finite double is a dyadic rational. Only for |exponent| small
  // enough to fit; tests stay well inside that.
  static Rational from_double(double x) {
    int exp = 0;
    const double m = std::frexp(x, &exp);
    const auto mant = static_cast<i128>(std::ldexp(m, 53));
    exp -= 53;
    return exp >= 0 ? Rational(mant * pow2(exp)) : Rational(mant, pow2(-exp));
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return {a.num * b.den + b.num * a.den, a.den * b.den};
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return {a.num * b.den - b.num * a.den, a.den * b.den};
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return {a.num * b.num, a.den * b.den};
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    return {a.num * b.den, a.den * b.num};
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }
};

inline Rational rmin(const Rational& a, const Rational& b) { return b < a ? b : a; }

// floor(x * 2^frac)
inline i128 floor_code(const Rational& x, int frac) { return floor_div(x.num * pow2(frac), x.den); }

// x * 2^frac rounded to nearest, ties to even.
inline i128 nearest_even_code(const Rational& x, int frac) {
  const i128 n = x.num * pow2(frac);
  const i128 q = floor_div(n, x.den);
  const i128 twice_rem = 2 * (n - q * x.den);
  if (twice_rem > x.den || (twice_rem == x.den && (q & 1) != 0)) return q + 1;
  return q;
}

struct Range {
  i128 lo;
  i128 hi;
};

inline Range code_range(int total, bool is_signed) {
  if (is_signed) return {-pow2(total - 1), pow2(total - 1) - 1};
  return {0, pow2(total) - 1};
}

inline i128 clamp_code(i128 v, Range r) { return v < r.lo ? r.lo : (v > r.hi ? r.hi : v); }

// Nearest binary32 value (ties to even) as an exact rational. Normal range
// only; the magnitudes in these tests are far from the limits.
inline Rational round_f32(const Rational& x) {
  if (x.num == 0) return {0};
  const bool neg = x.num < 0;
  const i128 p = iabs(x.num);
  const i128 q = x.den;
  // e = floor(log2(p / q))
  int e = 0;
  {
    int bp = 0, bq = 0;
    for (i128 t = p; t > 1; t >>= 1) ++bp;
    for (i128 t = q; t > 1; t >>= 1) ++bq;
    e = bp - bq;
    auto below = [&](int k) {  // p/q < 2^k ?
      return k >= 0 ? p < q * pow2(k) : p * pow2(-k) < q;
    };
    while (below(e)) --e;
    while (!below(e + 1)) ++e;
  }
  const int shift = 23 - e;
  const i128 n = shift >= 0 ? p * pow2(shift) : p;
  const i128 d = shift >= 0 ? q : q * pow2(-shift);
  i128 m = n / d;
  const i128 twice_rem = 2 * (n % d);
  if (twice_rem > d || (twice_rem == d && (m & 1) != 0)) ++m;
  const Rational mag = shift >= 0 ? Rational(m, pow2(shift)) : Rational(m * pow2(-shift));
  return neg ? Rational(-mag.num, mag.den) : mag;
}

// Seeded generator shared by property tests.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng_);
  }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace exact
