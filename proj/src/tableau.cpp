#include "erk/tableau.hpp"

#include <cmath>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "erk/error.hpp"

namespace erk {

namespace {

constexpr double kConsistencyTol = 1e-14;

}  // namespace

bool ButcherTableau::is_explicit() const {
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i; j < a.cols(); ++j)
      if (a(i, j) != 0.0) return false;
  return true;
}

ValidationReport validate(const ButcherTableau& t) {
  ValidationReport report;
  const int s = t.stages();
  if (s < 1) {
    report.violations.push_back("tableau has no stages");
    return report;
  }
  if (t.a.rows() != s || t.a.cols() != s || t.c.size() != s) {
    report.violations.push_back(
        fmt::format("shape mismatch: a is {}x{}, b has {}, c has {}", t.a.rows(), t.a.cols(), s,
                    t.c.size()));
    return report;
  }
  for (int i = 0; i < s; ++i) {
    const double row = t.a.row(i).sum();
    if (!(std::abs(row - t.c(i)) <= kConsistencyTol))
      report.violations.push_back(fmt::format("row {}: Σa={}≠c={}", i + 1, row, t.c(i)));
  }
  const double bsum = t.b.sum();
  if (!(std::abs(bsum - 1.0) <= kConsistencyTol))
    report.violations.push_back(fmt::format("Σb={}", bsum));
  return report;
}

double c_rk(const ButcherTableau& t) {
  const auto report = validate(t);
  if (!report.ok())
    throw Error(ErrorKind::validation,
                fmt::format("inconsistent tableau: {}", fmt::join(report.violations, "; ")));
  double sum = 0.0;
  for (int i = 0; i < t.stages(); ++i) sum += t.b(i) * (1.0 - t.c(i));
  return 2.0 * sum;
}

namespace tableaus {

ButcherTableau explicit_euler() {
  ButcherTableau t;
  t.a = Eigen::MatrixXd::Zero(1, 1);
  t.b = Eigen::VectorXd::Ones(1);
  t.c = Eigen::VectorXd::Zero(1);
  return t;
}

ButcherTableau implicit_euler() {
  ButcherTableau t;
  t.a = Eigen::MatrixXd::Ones(1, 1);
  t.b = Eigen::VectorXd::Ones(1);
  t.c = Eigen::VectorXd::Ones(1);
  return t;
}

ButcherTableau trapezoidal() {
  ButcherTableau t;
  t.a.resize(2, 2);
  t.a << 0.0, 0.0,
         0.5, 0.5;
  t.b.resize(2);
  t.b << 0.5, 0.5;
  t.c.resize(2);
  t.c << 0.0, 1.0;
  return t;
}

}  // namespace tableaus

Scheme Scheme::from_tableau(std::string name, ButcherTableau t) {
  const double value = c_rk(t);
  return Scheme(std::move(name), std::move(t), value);
}

Scheme Scheme::composite_simpson(std::string name) {
  return Scheme(std::move(name), CompositeSimpson{}, 1.0);
}

const ButcherTableau& Scheme::tableau() const {
  if (const auto* t = std::get_if<ButcherTableau>(&rule_)) return *t;
  throw Error(ErrorKind::validation, fmt::format("scheme '{}' has no Butcher tableau", name_));
}

SchemeRegistry::SchemeRegistry() {
  schemes_.push_back(Scheme::from_tableau("explicit_euler", tableaus::explicit_euler()));
  schemes_.push_back(Scheme::from_tableau("implicit_euler", tableaus::implicit_euler()));
  schemes_.push_back(Scheme::from_tableau("trapezoidal", tableaus::trapezoidal()));
  schemes_.push_back(Scheme::composite_simpson("simpson"));
}

void SchemeRegistry::add(Scheme scheme) {
  for (auto& existing : schemes_) {
    if (existing.name() == scheme.name()) {
      existing = std::move(scheme);
      return;
    }
  }
  schemes_.push_back(std::move(scheme));
}

const Scheme& SchemeRegistry::lookup(std::string_view name) const {
  for (const auto& s : schemes_)
    if (s.name() == name) return s;
  throw Error(ErrorKind::lookup, fmt::format("unknown scheme '{}' (valid: {})", name,
                                             fmt::join(names(), ", ")));
}

std::vector<std::string> SchemeRegistry::names() const {
  std::vector<std::string> out;
  out.reserve(schemes_.size());
  for (const auto& s : schemes_) out.push_back(s.name());
  return out;
}

const SchemeRegistry& builtin_schemes() {
  static const SchemeRegistry registry;
  return registry;
}

}  // namespace erk
