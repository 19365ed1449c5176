#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace erk {

/// Coefficients (a_ij, b_i, c_i) of an s-stage Runge-Kutta method.
struct ButcherTableau {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd c;

  int stages() const { return static_cast<int>(b.size()); }

  /// True when a_ij = 0 for all j >= i, so stages can be evaluated in order.
  bool is_explicit() const;
};

/// Consistency report; empty `violations` means the tableau is usable.
struct ValidationReport {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Checks sum_j a_ij = c_i for every row and sum_i b_i = 1, both to 1e-14.
ValidationReport validate(const ButcherTableau& t);

/// 2 * sum_i b_i (1 - c_i). Throws Error(validation) for inconsistent tableaux.
double c_rk(const ButcherTableau& t);

namespace tableaus {
ButcherTableau explicit_euler();
ButcherTableau implicit_euler();
ButcherTableau trapezoidal();
}  // namespace tableaus

/// The rule u - u_prev = -(tau/6)(A[u] + 4A[(u + u_prev)/2] + A[u_prev]).
/// It evaluates A at the state average rather than at stage values, so it
/// has no Butcher form; it behaves as an order >= 2 method (C_RK = 1).
struct CompositeSimpson {};

class Scheme {
 public:
  /// Validates `t`; throws Error(validation) listing the violated sums.
  static Scheme from_tableau(std::string name, ButcherTableau t);
  static Scheme composite_simpson(std::string name = "simpson");

  const std::string& name() const { return name_; }
  double c_rk_effective() const { return c_rk_; }

  bool is_tableau() const { return std::holds_alternative<ButcherTableau>(rule_); }
  /// Throws Error(validation) for the composite rule.
  const ButcherTableau& tableau() const;

 private:
  Scheme(std::string name, std::variant<ButcherTableau, CompositeSimpson> rule, double c_rk)
      : name_(std::move(name)), rule_(std::move(rule)), c_rk_(c_rk) {}

  std::string name_;
  std::variant<ButcherTableau, CompositeSimpson> rule_;
  double c_rk_;
};

/// Named schemes: explicit_euler, implicit_euler, trapezoidal, simpson, plus
/// anything added through add().
class SchemeRegistry {
 public:
  SchemeRegistry();

  /// Replaces an existing entry of the same name.
  void add(Scheme scheme);

  /// Throws Error(lookup) naming the valid schemes.
  const Scheme& lookup(std::string_view name) const;

  std::vector<std::string> names() const;

 private:
  std::vector<Scheme> schemes_;
};

/// Registry holding only the four built-in schemes.
const SchemeRegistry& builtin_schemes();

}  // namespace erk
