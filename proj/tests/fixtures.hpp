#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "cli/config.hpp"
#include "erk/operators.hpp"

namespace fixture {

inline erk::StateField barenblatt_state(const erk::Grid1D& g, double beta) {
  erk::StateField u(1, g.n());
  for (int i = 0; i < g.n(); ++i) u(0, i) = erk::cli::barenblatt(g.x(i), beta, 0.01, 0.25);
  return u;
}

inline erk::StateField random_positive(int species, int n, std::mt19937_64& rng, double lo = 0.5,
                                       double hi = 1.5) {
  std::uniform_real_distribution<double> dist(lo, hi);
  erk::StateField u(species, n);
  for (auto& v : u.values()) v = dist(rng);
  return u;
}

/// mean + a1 cos(2πx/L) + a2 sin(4πx/L)
inline erk::StateField smooth_state(const erk::Grid1D& g, double mean, double a1, double a2) {
  erk::StateField u(1, g.n());
  const double k = 2.0 * std::numbers::pi / g.length();
  for (int i = 0; i < g.n(); ++i)
    u(0, i) = mean + a1 * std::cos(k * g.x(i)) + a2 * std::sin(2.0 * k * g.x(i));
  return u;
}

inline double max_abs(const Eigen::VectorXd& v) { return v.lpNorm<Eigen::Infinity>(); }

}  // namespace fixture
