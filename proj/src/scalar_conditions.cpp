#include "erk/scalar_conditions.hpp"

#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include "erk/error.hpp"

namespace erk {

ConditionFunctions heat_log_preset() {
  return {
      [](double u) { return u; },
      [](double) { return 1.0; },
      [](double) { return 0.0; },
      [](double u) { return 1.0 / u; },
  };
}

ConditionFunctions pme_power_preset(double alpha, double beta) {
  const double e = beta - alpha;
  return {
      [=](double u) { return beta * std::pow(u, e); },
      [=](double u) { return beta * e * std::pow(u, e - 1.0); },
      [=](double u) { return beta * e * (e - 1.0) * std::pow(u, e - 2.0); },
      [=](double u) { return std::pow(u, alpha - 1.0); },
  };
}

std::vector<ConditionRow> scalar_conditions(const ConditionFunctions& fns,
                                            const std::vector<double>& u_grid, int d, double c_rk) {
  if (!fns.mu || !fns.dmu || !fns.d2mu || !fns.d2h)
    throw Error(ErrorKind::validation, "all four condition functions are required");
  if (d < 1) throw Error(ErrorKind::validation, fmt::format("d must be >= 1, got {}", d));
  if (u_grid.empty()) throw Error(ErrorKind::validation, "u grid is empty");
  for (std::size_t k = 0; k < u_grid.size(); ++k) {
    if (!(u_grid[k] > 0.0) || !std::isfinite(u_grid[k]))
      throw Error(ErrorKind::validation, fmt::format("u grid entry {} = {} is not positive", k, u_grid[k]));
    if (k > 0 && !(u_grid[k] > u_grid[k - 1]))
      throw Error(ErrorKind::validation, fmt::format("u grid is not ascending at entry {}", k));
  }

  constexpr double abs_tol = 1e-10;
  auto integrand = [&](double v) { return fns.mu(v) * fns.dmu(v) * fns.d2h(v); };
  const double spatial = (d - 1.0) / d;

  std::vector<ConditionRow> rows;
  rows.reserve(u_grid.size());
  double integral = 0.0;
  for (std::size_t k = 0; k < u_grid.size(); ++k) {
    const double u = u_grid[k];
    if (k > 0) {
      double err = 0.0;
      const double piece = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
          integrand, u_grid[k - 1], u, 15, 1e-13, &err);
      if (!std::isfinite(piece) || err > abs_tol)
        throw ConvergenceError(err, 0,
                               fmt::format("quadrature of b(u) failed at u={} (error estimate {})", u, err));
      integral += piece;
    }
    ConditionRow row;
    row.u = u;
    row.b_theorem = (2.0 / 3.0) * (c_rk + 1.0) * integral;
    row.b_proof = (2.0 / 3.0) * (c_rk + 2.0) * integral;
    const double mu = fns.mu(u);
    const double lead = (c_rk + 1.0) * fns.d2h(u) * mu * mu;
    row.cond2_theorem = lead - spatial * row.b_theorem;
    row.cond2_proof = lead - spatial * row.b_proof;
    const double dmu = fns.dmu(u);
    row.cond3 = (c_rk + 2.0) * mu * fns.d2mu(u) + (c_rk - 1.0) * dmu * dmu;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace erk
