#pragma once

#include <functional>
#include <string>
#include <vector>

namespace erk {

using ScalarFn = std::function<double(double)>;

/// μ(u) = a(u) h''(u) and its first two derivatives, plus h''.
struct ConditionFunctions {
  ScalarFn mu;
  ScalarFn dmu;
  ScalarFn d2mu;
  ScalarFn d2h;
};

/// Heat equation with the logarithmic entropy: μ(u) = u, h''(u) = 1/u.
ConditionFunctions heat_log_preset();
/// ∂_t u = Δ(u^β) with h''(u) = u^{α-1}: μ(u) = βu^{β-α}.
ConditionFunctions pme_power_preset(double alpha, double beta);

struct ConditionRow {
  double u;
  /// b(u) with the (C_RK + 1) prefactor, and with (C_RK + 2).
  double b_theorem;
  double b_proof;
  /// (C_RK + 1) h''(u) μ(u)² - ((d - 1)/d) b(u) for each b variant.
  double cond2_theorem;
  double cond2_proof;
  /// (C_RK + 2) μ μ'' + (C_RK - 1) μ'².
  double cond3;

  bool cond1_theorem_ok() const { return b_theorem >= 0.0; }
  bool cond1_proof_ok() const { return b_proof >= 0.0; }
  bool cond2_theorem_ok() const { return cond2_theorem >= 0.0; }
  bool cond2_proof_ok() const { return cond2_proof >= 0.0; }
  bool cond3_ok() const { return cond3 < 0.0; }
};

/// Evaluates the three conditions on u_grid, integrating
/// b(u) = (2/3)(C_RK + k) ∫_{u0}^{u} μ μ' h'' dv from the first grid point with
/// adaptive Gauss-Kronrod quadrature (absolute tolerance 1e-10).
/// Throws Error(validation) on a non-positive or non-ascending grid and
/// Error(convergence) when the quadrature misses its tolerance.
std::vector<ConditionRow> scalar_conditions(const ConditionFunctions& fns,
                                            const std::vector<double>& u_grid, int d, double c_rk);

}  // namespace erk
