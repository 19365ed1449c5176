#pragma once

#include <functional>
#include <vector>

#include "erk/operators.hpp"
#include "erk/tableau.hpp"

namespace erk {

struct NewtonConfig {
  /// Newton stops once ‖R‖∞ <= tol * max(1, ‖x‖∞). Residuals are measured in
  /// state units (stage unknowns are the increments τK_i), so the bound does
  /// not scale with the stiffness of A.
  double tol = 1e-12;
  int max_iter = 50;

  /// Throws Error(validation) unless tol > 0 and max_iter >= 1.
  void check() const;
};

struct StepResult {
  StateField state;
  int iterations = 0;
  double residual = 0.0;
};

/// One step u_prev -> u of the scheme with step size tau.
///
/// Tableau schemes solve for the stage increments Z_i = τK_i from
/// Z_i + τA[u_prev + Σ_j a_ij Z_j] = 0 (sequentially when the tableau is
/// explicit, by Newton on the stacked system otherwise), starting from
/// Z_i = -τA[u_prev]. The composite Simpson rule is solved directly for u.
/// Throws ConvergenceError when Newton does not reach cfg.tol.
StepResult forward_step(const ProblemSpec& p, const Scheme& s, const StateField& u_prev,
                        double tau, const NewtonConfig& cfg);

/// The previous state v(τ) whose forward step with size tau lands on u.
///
/// Tableau schemes run Newton jointly on (Z_1, ..., Z_s, v) with residuals
/// v - u + Σ b_i Z_i and Z_i + τA[v + Σ_j a_ij Z_j], starting from
/// Z_i = -τA[u], v = u, or from v = *guess with Z_i = u - v when a guess is
/// given. tau == 0 returns u unchanged.
StepResult backward_solve(const ProblemSpec& p, const Scheme& s, const StateField& u, double tau,
                          const NewtonConfig& cfg, const StateField* guess = nullptr);

struct Trajectory {
  std::vector<double> times;
  std::vector<StateField> states;
  /// Newton iterations per step; entry k belongs to the step producing states[k + 1].
  std::vector<int> newton_iterations;
  Scheme scheme;
  ProblemSpec problem;
  double tau;
};

/// Called after every accepted step with the step index k >= 1, t^k and u^k.
using StepObserver = std::function<void(int k, double t, const StateField& u, int iterations)>;

/// ceil(t_end / tau) steps from u0. A failing step is rethrown with its index
/// attached (ConvergenceError::step, or "step k:" prefixed for domain errors).
Trajectory run(const ProblemSpec& p, const Scheme& s, const StateField& u0, double tau,
               double t_end, const NewtonConfig& cfg, const StepObserver& observer = {});

/// Number of steps run() takes for the given horizon.
int step_count(double tau, double t_end);

}  // namespace erk
