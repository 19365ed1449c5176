#include "erk/dlss_chain.hpp"

#include <cctype>
#include <string>

#include <fmt/format.h>

#include "erk/error.hpp"

namespace erk {

namespace {

Rational frac(long long p, long long q) { return Rational(p) / Rational(q); }

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorKind::validation, fmt::format("cannot parse '{}' as an exact rational", text));
}

boost::multiprecision::cpp_int digits_value(std::string_view s, std::string_view whole) {
  if (s.empty()) bad_number(whole);
  boost::multiprecision::cpp_int v = 0;
  for (char ch : s) {
    if (!std::isdigit(static_cast<unsigned char>(ch))) bad_number(whole);
    v = v * 10 + (ch - '0');
  }
  return v;
}

Rational pow10(long long e) {
  boost::multiprecision::cpp_int p = 1;
  for (long long k = 0; k < (e < 0 ? -e : e); ++k) p *= 10;
  return e < 0 ? Rational(1) / Rational(p) : Rational(p);
}

// A decimal without a fraction bar: [sign] digits [. digits] [e [sign] digits].
Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long long exponent = 0;
  if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view ex = s.substr(e + 1);
    bool neg_ex = false;
    if (!ex.empty() && (ex.front() == '-' || ex.front() == '+')) {
      neg_ex = ex.front() == '-';
      ex.remove_prefix(1);
    }
    if (ex.empty() || ex.size() > 6) bad_number(whole);
    exponent = static_cast<long long>(digits_value(ex, whole));
    if (neg_ex) exponent = -exponent;
    s = s.substr(0, e);
  }
  std::string digits;
  if (const auto dot = s.find('.'); dot != std::string_view::npos) {
    const std::string_view ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (ip.empty() && fp.empty()) bad_number(whole);
    digits = std::string(ip) + std::string(fp);
    exponent -= static_cast<long long>(fp.size());
  } else {
    digits = std::string(s);
  }
  Rational v = Rational(digits_value(digits, whole)) * pow10(exponent);
  return negative ? Rational(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) bad_number(text);
  if (const auto bar = s.find('/'); bar != std::string_view::npos) {
    const Rational num = parse_decimal(s.substr(0, bar), text);
    const Rational den = parse_decimal(s.substr(bar + 1), text);
    if (den == 0) throw Error(ErrorKind::validation, fmt::format("'{}' has a zero denominator", text));
    return num / den;
  }
  return parse_decimal(s, text);
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

Rational dlss_c8_star() { return frac(17, 172); }

Rational dlss_b12(const Rational& c8) { return frac(-86, 3) * c8 * c8 + frac(17, 3) * c8 - frac(1, 8); }

Rational dlss_db12(const Rational& c8) { return frac(-172, 3) * c8 + frac(17, 3); }

Rational dlss_c1_cubic(const Rational& c3) {
  return ((frac(449307, 175) * c3 + frac(741681, 2150)) * c3 + frac(35780649411LL, 2393160700LL)) * c3 +
         frac(34135130165539LL, 163091166664200LL);
}

namespace {

struct Reduced {
  Rational b2_without_c1;  // b2 - 28 c1
  Rational b4, b7, b12;
};

std::array<Rational, 8> eliminate(const Rational& c3, const Rational& c8, const Rational& c1) {
  std::array<Rational, 8> c;
  c[0] = c1;
  c[2] = c3;
  c[7] = c8;
  c[5] = -2 * c8;
  c[4] = 8 * c8 * c8 - 6 * c8;
  c[6] = frac(-20, 3) * c8 * c8 + frac(8, 3) * c8;
  c[3] = -2 * c3 - 16 * c8 * c8 * c8 + 16 * c8 * c8 - 5 * c8;
  c[1] = c3 - 4 * c3 * c8;
  return c;
}

std::array<Rational, 15> a_coefficients(const std::array<Rational, 8>& c) {
  return {
      4 * c[0],
      28 * c[0] + 4 * c[1],
      4 * c[1] + 4 * c[2],
      2 + 20 * c[1] + 4 * c[3],
      4 * c[2],
      8 + 16 * c[2] + 8 * c[3] + 4 * c[4],
      5 + 12 * c[3] + 4 * c[6],
      4 + 4 * c[4],
      8 + 4 * c[4] + 4 * c[5],
      10 + 8 * c[4] + 12 * c[6] + 4 * c[7],
      8 + 8 * c[5],
      3 + 4 * c[6],
      5 + 4 * c[7],
      4 * c[5] + 8 * c[7],
      Rational(2),
  };
}

DlssChain complete(const std::array<Rational, 8>& c) {
  DlssChain out;
  out.c = c;
  out.a = a_coefficients(c);
  const auto& a = out.a;
  const Rational& a15 = a[14];
  out.b1 = a[0] - a[4] * a[4] / (4 * a15);
  out.b2 = a[1] - a[4] * a[7] / (2 * a15);
  out.b4 = a[3] - a[7] * a[7] / (4 * a15) - a[4] * a[12] / (2 * a15);
  out.b7 = a[6] - a[7] * a[12] / (2 * a15);
  out.b12 = a[11] - a[12] * a[12] / (4 * a15);
  if (out.b7 == 0) throw Error(ErrorKind::domain, "b7 vanishes; p(c3) is undefined");
  out.p = out.b1 - out.b2 * out.b2 * out.b12 / (out.b7 * out.b7);
  return out;
}

}  // namespace

DlssChain dlss_chain(const Rational& c3, const Rational& c8, const Rational& c1) {
  return complete(eliminate(c3, c8, c1));
}

DlssChain dlss_chain(const Rational& c3, const Rational& c8) {
  // b4, b7, b12 do not involve c1 and b2 is affine in it with slope 28.
  const DlssChain base = dlss_chain(c3, c8, Rational(0));
  if (base.b12 == 0) throw Error(ErrorKind::domain, "b12 vanishes; c1 is undefined");
  const Rational& b7 = base.b7;
  const Rational c1 =
      (base.b4 * b7 - 2 * base.b2 * base.b12 - b7 * b7 * b7 / (4 * base.b12)) / (56 * base.b12);
  return dlss_chain(c3, c8, c1);
}

}  // namespace erk
