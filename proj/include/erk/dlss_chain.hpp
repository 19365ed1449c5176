#pragma once

#include <array>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace erk {

using Rational = boost::multiprecision::cpp_rational;

/// Exact parse of "p/q", "-0.029", "12", "2.5e-3".
/// Throws Error(validation) on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

double to_double(const Rational& r);

/// c8 = 17/172, the maximiser of b12.
Rational dlss_c8_star();

/// b12(c8) = -(86/3)c8² + (17/3)c8 - 1/8 and its derivative.
Rational dlss_b12(const Rational& c8);
Rational dlss_db12(const Rational& c8);

/// The cubic c1(c3) obtained at c8 = 17/172.
Rational dlss_c1_cubic(const Rational& c3);

struct DlssChain {
  /// c[k - 1] = c_k.
  std::array<Rational, 8> c;
  /// a[k - 1] = a_k.
  std::array<Rational, 15> a;
  Rational b1, b2, b4, b7, b12;
  /// b1 - b2² b12 / b7².
  Rational p;
};

/// Eliminates c2, c4..c7 from (c3, c8), takes c1 from b4b7 - 2b2b12 - b7³/(4b12) = 0
/// (linear in c1), and completes the chain. The b's are formed from the a's by the
/// square completions, not from closed forms.
/// Throws Error(domain) when b12 or b7 vanishes.
DlssChain dlss_chain(const Rational& c3, const Rational& c8);

/// Same chain with c1 given explicitly.
DlssChain dlss_chain(const Rational& c3, const Rational& c8, const Rational& c1);

}  // namespace erk
