#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "erk/operators.hpp"
#include "erk/stepping.hpp"

namespace erk {

/// h(u) = u^{α+1} / (α(α+1)) for α > 0, and h(u) = u(log u - 1) at α = 0.
struct PowerEntropy {
  double alpha;
};
/// Σ_s u_s(log u_s - 1) over both species of a system.
struct LogEntropySum {};
/// h(u) = u^α, the cell-sum entropy used for the porous-medium experiments.
struct ExperimentPower {
  double alpha;
};
/// F[u] = ∫ (f(u)_x)² with f(u) = u^{α/2}.
struct FirstOrder {
  double alpha;
};

using EntropyKind = std::variant<PowerEntropy, LogEntropySum, ExperimentPower, FirstOrder>;

class EntropyFunctional {
 public:
  /// Throws Error(validation) for α < 0 (PowerEntropy) or α <= 0 (others).
  explicit EntropyFunctional(EntropyKind kind);

  const EntropyKind& kind() const { return kind_; }
  bool is_first_order() const { return std::holds_alternative<FirstOrder>(kind_); }
  /// The exponent parameter; NaN for LogEntropySum.
  double alpha() const;
  std::string name() const;

  // Zeroth-order density and derivatives. Throw Error(validation) on FirstOrder.
  double h(double u) const;
  double dh(double u) const;
  double d2h(double u) const;

  // f(u) = u^{α/2} and derivatives. Throw Error(validation) unless FirstOrder.
  double f(double u) const;
  double df(double u) const;
  double d2f(double u) const;

  /// Whether u is in the domain of the derivatives up to `order`.
  bool admits(double u, int order) const;

 private:
  EntropyKind kind_;
};

/// Σ_i h(u_i) Δx summed over species; FirstOrder: Σ_i ((f(u))_{i+1} - f(u)_i)² / Δx,
/// the periodic forward-difference gradient. Throws DomainError off the domain.
double evaluate(const EntropyFunctional& e, const StateField& u, const Grid1D& grid);

/// Dissipation rate -G'(0) = d/dτ H[v(τ)] at τ = 0, where v'(0) = A[u]:
/// Σ h'(u_i) A[u]_i Δx for zeroth-order kinds and
/// -2 Σ (D₂ f(u))_i f'(u_i) A[u]_i Δx for FirstOrder.
double production(const EntropyFunctional& e, const ProblemSpec& p, const StateField& u);

/// Σ [c_rk h'(u) DA[u](A[u]) + h''(u) A[u]²] Δx; equals -G''(0). Zeroth-order kinds only.
double i0(const EntropyFunctional& e, const ProblemSpec& p, const StateField& u, double c_rk);

/// Σ [(D₊(f'(u) A[u]))² - c_rk D₂f(u) f'(u) DA[u](A[u]) - D₂f(u) f''(u) A[u]²] Δx.
/// With F = Σ (D₊f)² Δx this is -G''(0)/2. FirstOrder only, single species.
double i1(const EntropyFunctional& e, const ProblemSpec& p, const StateField& u, double c_rk);

/// G''(0) for either entropy order: -i0, or -2 i1 for FirstOrder.
double second_derivative_at_zero(const EntropyFunctional& e, const ProblemSpec& p,
                                 const StateField& u, double c_rk);

/// Which exponent the Q(τ) denominator ‖u^k u_x⁴‖_{L¹} uses: α + 2β - 2 (default)
/// or α + 2β - 5.
enum class QExponent { num_q, text };

struct GProfile {
  std::vector<double> taus;
  std::vector<double> g;
  /// Central second differences; NaN at the two end points.
  std::vector<double> d2g;
  /// d2g divided by the porous-medium normaliser; NaN where undefined.
  std::vector<double> q;
  double base_time = 0.0;
  /// Set when a backward solve failed; the arrays then stop before this index.
  std::optional<int> failure_index;
  std::string failure_message;
};

/// G(τ_j) = H[u] - H[v(τ_j)] on τ_j = j tau_max / m, j = 0..m, with
/// v(τ) = backward_solve(u, τ). A failing solve truncates the profile.
GProfile profile_g(const EntropyFunctional& e, const ProblemSpec& p, const Scheme& s,
                   const StateField& u, double tau_max, int m, const NewtonConfig& cfg,
                   QExponent exponent = QExponent::num_q, double base_time = 0.0);

/// Linear extrapolation 2 d2g[1] - d2g[2] of the second difference to τ = 0.
double extrapolated_d2g(const GProfile& profile);

/// Σ u^k ((u_{i+1} - u_{i-1}) / 2Δx)⁴ Δx with k from `exponent`. PME only.
double q_denominator(const EntropyFunctional& e, const ProblemSpec& p, const StateField& u,
                     QExponent exponent);

/// Writes "tau,G,d2G,Q" and one row per τ_j with 17 significant digits.
void write_csv(std::ostream& out, const GProfile& profile);

struct TimeWindow {
  double begin;
  double end;
};

/// Least-squares slope of log(H - steady) against t on the window, negated.
/// Throws Error(validation) when a gap in the window is not positive or fewer
/// than two samples fall inside it.
double fit_decay_rate(std::span<const double> times, std::span<const double> entropy,
                      double steady, TimeWindow window);

double fit_decay_rate(const Trajectory& traj, const EntropyFunctional& e, TimeWindow window,
                      std::optional<double> steady = std::nullopt);

/// Entropy of the periodic steady state with the same mass as u0: the cell
/// mean per species (the common mean when the species exchange mass).
double steady_state_entropy(const EntropyFunctional& e, const ProblemSpec& p, const StateField& u0);

}  // namespace erk
