#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace cpsarch {

/// Exact rational with int64 numerator/denominator, always normalized
/// (positive denominator, reduced). Used so that corpus averages and
/// percentage differences stay exact until display.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational of(long long n, long long d = 1) {
    if (d == 0) throw std::domain_error("rational: zero denominator");
    Rational r{n, d};
    r.normalize();
    return r;
  }

  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    long long g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  bool is_zero() const { return num == 0; }
  double to_double() const {
    return static_cast<double>(num) / static_cast<double>(den);
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return from128(static_cast<__int128>(a.num) * b.den +
                       static_cast<__int128>(b.num) * a.den,
                   static_cast<__int128>(a.den) * b.den);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + Rational{-b.num, b.den};
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return from128(static_cast<__int128>(a.num) * b.num,
                   static_cast<__int128>(a.den) * b.den);
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num == 0) throw std::domain_error("rational: division by zero");
    return from128(static_cast<__int128>(a.num) * b.den,
                   static_cast<__int128>(a.den) * b.num);
  }
  friend bool operator==(const Rational&, const Rational&) = default;

  /// Fixed-point decimal string with `places` digits, rounding half away
  /// from zero: 349.125 at 2 places -> "349.13".
  std::string to_decimal(int places) const {
    __int128 pow10 = 1;
    for (int i = 0; i < places; ++i) pow10 *= 10;
    __int128 scaled = static_cast<__int128>(num) * pow10;
    __int128 q = scaled / den;
    __int128 r = scaled % den;
    if (r < 0) r = -r;
    if (2 * r >= den) q += (scaled < 0 ? -1 : 1);

    bool negative = q < 0;
    if (negative) q = -q;
    __int128 whole = q / pow10;
    __int128 frac = q % pow10;

    std::string digits;
    if (whole == 0) {
      digits = "0";
    } else {
      while (whole > 0) {
        digits.insert(digits.begin(),
                      static_cast<char>('0' + static_cast<int>(whole % 10)));
        whole /= 10;
      }
    }
    std::string out = (negative ? "-" : "") + digits;
    if (places > 0) {
      std::string f(static_cast<std::size_t>(places), '0');
      for (int i = places - 1; i >= 0 && frac > 0; --i) {
        f[static_cast<std::size_t>(i)] =
            static_cast<char>('0' + static_cast<int>(frac % 10));
        frac /= 10;
      }
      out += "." + f;
    }
    return out;
  }

 private:
  static Rational from128(__int128 n, __int128 d) {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    __int128 an = n < 0 ? -n : n;
    __int128 g = gcd128(an, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    constexpr __int128 kMax = INT64_MAX;
    if (n > kMax || n < -kMax || d > kMax) {
      throw std::overflow_error("rational: overflow");
    }
    return Rational{static_cast<long long>(n), static_cast<long long>(d)};
  }

  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a == 0 ? 1 : a;
  }
};

}  // namespace cpsarch
