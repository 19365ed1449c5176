#include "erk/stepping.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "erk/error.hpp"

namespace erk {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;
using Vector = Eigen::VectorXd;

// Appends `scale * m` into the (row_block, col_block) block of a stacked matrix.
void add_block(std::vector<Triplet>& t, const SparseMatrix& m, Eigen::Index row_block,
               Eigen::Index col_block, double scale) {
  if (scale == 0.0) return;
  const Eigen::Index ro = row_block * m.rows();
  const Eigen::Index co = col_block * m.cols();
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      t.emplace_back(ro + it.row(), co + it.col(), scale * it.value());
}

void add_identity(std::vector<Triplet>& t, Eigen::Index size, Eigen::Index row_block,
                  Eigen::Index col_block, double scale) {
  if (scale == 0.0) return;
  for (Eigen::Index i = 0; i < size; ++i)
    t.emplace_back(row_block * size + i, col_block * size + i, scale);
}

double inf_norm(const Vector& r) {
  double m = 0.0;
  for (double v : r) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(v));
  }
  return m;
}

// Plain Newton until ‖R‖∞ <= tol * max(1, ‖x‖∞).
template <class Residual, class Jacobian>
StepResult newton(Vector x, Residual residual, Jacobian jac, const NewtonConfig& cfg,
                  const char* what) {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  for (int iter = 0;; ++iter) {
    const Vector r = residual(x);
    const double norm = inf_norm(r);
    const double bound = cfg.tol * std::max(1.0, x.lpNorm<Eigen::Infinity>());
    if (norm <= bound) return {StateField(1, static_cast<int>(x.size()), x), iter, norm};
    if (!std::isfinite(norm) || iter == cfg.max_iter)
      throw ConvergenceError(norm, iter,
                             fmt::format("{}: Newton stopped after {} iterations with residual {:.3e} "
                                         "(bound {:.3e})",
                                         what, iter, norm, bound));
    lu.compute(jac(x));
    if (lu.info() != Eigen::Success)
      throw ConvergenceError(norm, iter, fmt::format("{}: singular Newton matrix", what));
    x -= lu.solve(r);
  }
}

// Y_i = base + Σ_j a_ij Z_j
Vector stage_state(const ButcherTableau& t, const Vector& base, const Vector& z, int i,
                   Eigen::Index size) {
  Vector y = base;
  for (int j = 0; j < t.stages(); ++j)
    if (t.a(i, j) != 0.0) y += t.a(i, j) * z.segment(j * size, size);
  return y;
}

StepResult tableau_forward(const ProblemSpec& p, const ButcherTableau& t, const StateField& u_prev,
                           double tau, const NewtonConfig& cfg) {
  const int s = t.stages();
  const Eigen::Index size = u_prev.size();
  const Vector& base = u_prev.values();
  auto A = [&](const Vector& y) { return apply(p, u_prev.with_values(y)).values(); };

  Vector z(s * size);
  int iterations = 0;
  double residual = 0.0;
  if (t.is_explicit()) {
    for (int i = 0; i < s; ++i) z.segment(i * size, size) = -tau * A(stage_state(t, base, z, i, size));
  } else {
    const Vector k0 = -tau * A(base);
    for (int i = 0; i < s; ++i) z.segment(i * size, size) = k0;
    auto res = [&](const Vector& x) {
      Vector r(s * size);
      for (int i = 0; i < s; ++i)
        r.segment(i * size, size) = x.segment(i * size, size) + tau * A(stage_state(t, base, x, i, size));
      return r;
    };
    auto jac = [&](const Vector& x) {
      std::vector<Triplet> trip;
      for (int i = 0; i < s; ++i) {
        add_identity(trip, size, i, i, 1.0);
        bool coupled = false;
        for (int j = 0; j < s; ++j) coupled = coupled || t.a(i, j) != 0.0;
        if (!coupled) continue;
        const SparseMatrix ji = jacobian(p, u_prev.with_values(stage_state(t, base, x, i, size)));
        for (int j = 0; j < s; ++j) add_block(trip, ji, i, j, tau * t.a(i, j));
      }
      SparseMatrix m(s * size, s * size);
      m.setFromTriplets(trip.begin(), trip.end());
      return m;
    };
    const StepResult r = newton(z, res, jac, cfg, "forward step");
    z = r.state.values();
    iterations = r.iterations;
    residual = r.residual;
  }
  Vector u = base;
  for (int i = 0; i < s; ++i) u += t.b(i) * z.segment(i * size, size);
  return {u_prev.with_values(std::move(u)), iterations, residual};
}

StepResult tableau_backward(const ProblemSpec& p, const ButcherTableau& t, const StateField& u,
                            double tau, const NewtonConfig& cfg, const StateField* guess) {
  const int s = t.stages();
  const Eigen::Index size = u.size();
  auto A = [&](const Vector& y) { return apply(p, u.with_values(y)).values(); };

  // Unknowns (Z_1, ..., Z_s, v).
  Vector y((s + 1) * size);
  const Vector k0 = guess ? Vector(u.values() - guess->values()) : Vector(-tau * A(u.values()));
  for (int i = 0; i < s; ++i) y.segment(i * size, size) = k0;
  y.segment(s * size, size) = guess ? guess->values() : u.values();

  auto res = [&](const Vector& x) {
    const Vector v = x.segment(s * size, size);
    Vector r((s + 1) * size);
    for (int i = 0; i < s; ++i)
      r.segment(i * size, size) = x.segment(i * size, size) + tau * A(stage_state(t, v, x, i, size));
    Vector r0 = v - u.values();
    for (int i = 0; i < s; ++i) r0 += t.b(i) * x.segment(i * size, size);
    r.segment(s * size, size) = r0;
    return r;
  };
  auto jac = [&](const Vector& x) {
    const Vector v = x.segment(s * size, size);
    std::vector<Triplet> trip;
    for (int i = 0; i < s; ++i) {
      add_identity(trip, size, i, i, 1.0);
      const SparseMatrix ji = jacobian(p, u.with_values(stage_state(t, v, x, i, size)));
      for (int j = 0; j < s; ++j) add_block(trip, ji, i, j, tau * t.a(i, j));
      add_block(trip, ji, i, s, tau);
      add_identity(trip, size, s, i, t.b(i));
    }
    add_identity(trip, size, s, s, 1.0);
    SparseMatrix m((s + 1) * size, (s + 1) * size);
    m.setFromTriplets(trip.begin(), trip.end());
    return m;
  };
  StepResult r = newton(y, res, jac, cfg, "backward solve");
  return {u.with_values(r.state.values().segment(s * size, size)), r.iterations, r.residual};
}

// R(x) = x_new - x_old + (τ/6)(A[x_new] + 4A[(x_new + x_old)/2] + A[x_old]) with either
// x_new (forward) or x_old (backward) unknown.
StepResult simpson_solve(const ProblemSpec& p, const StateField& known, double tau,
                         const NewtonConfig& cfg, bool forward, const StateField* guess = nullptr) {
  const Eigen::Index size = known.size();
  auto A = [&](const Vector& y) { return apply(p, known.with_values(y)).values(); };
  const Vector a_known = A(known.values());
  const double w = tau / 6.0;

  auto split = [&](const Vector& x) -> std::pair<Vector, Vector> {
    return forward ? std::pair{x, known.values()} : std::pair{known.values(), x};
  };
  auto res = [&](const Vector& x) {
    const auto [unew, uold] = split(x);
    const Vector mid = 0.5 * (unew + uold);
    return Vector(unew - uold + w * (A(unew) + 4.0 * A(mid) + A(uold)));
  };
  auto jac = [&](const Vector& x) {
    const auto [unew, uold] = split(x);
    const Vector mid = 0.5 * (unew + uold);
    SparseMatrix m = 2.0 * w * jacobian(p, known.with_values(mid));
    m += w * jacobian(p, known.with_values(x));
    SparseMatrix id(size, size);
    id.setIdentity();
    if (forward)
      m += id;
    else
      m -= id;
    return m;
  };
  const Vector x0 = guess     ? guess->values()
                    : forward ? Vector(known.values() - tau * a_known)
                              : known.values();
  StepResult r = newton(x0, res, jac, cfg, forward ? "forward step" : "backward solve");
  return {known.with_values(r.state.values()), r.iterations, r.residual};
}

void check_tau(double tau, bool allow_zero) {
  if (!(allow_zero ? tau >= 0.0 : tau > 0.0) || !std::isfinite(tau))
    throw Error(ErrorKind::validation, fmt::format("invalid step size tau={}", tau));
}

}  // namespace

void NewtonConfig::check() const {
  if (!(tol > 0.0)) throw Error(ErrorKind::validation, fmt::format("newton tol must be > 0, got {}", tol));
  if (max_iter < 1)
    throw Error(ErrorKind::validation, fmt::format("newton max_iter must be >= 1, got {}", max_iter));
}

StepResult forward_step(const ProblemSpec& p, const Scheme& s, const StateField& u_prev, double tau,
                        const NewtonConfig& cfg) {
  check_tau(tau, false);
  cfg.check();
  if (s.is_tableau()) return tableau_forward(p, s.tableau(), u_prev, tau, cfg);
  return simpson_solve(p, u_prev, tau, cfg, true);
}

StepResult backward_solve(const ProblemSpec& p, const Scheme& s, const StateField& u, double tau,
                          const NewtonConfig& cfg, const StateField* guess) {
  check_tau(tau, true);
  cfg.check();
  if (tau == 0.0) {
    apply(p, u);  // admissibility check only
    return {u, 0, 0.0};
  }
  if (guess && (guess->species() != u.species() || guess->n() != u.n()))
    throw Error(ErrorKind::validation, "backward-solve guess has the wrong shape");
  if (s.is_tableau()) return tableau_backward(p, s.tableau(), u, tau, cfg, guess);
  return simpson_solve(p, u, tau, cfg, false, guess);
}

int step_count(double tau, double t_end) {
  return static_cast<int>(std::ceil(t_end / tau * (1.0 - 1e-12)));
}

Trajectory run(const ProblemSpec& p, const Scheme& s, const StateField& u0, double tau,
               double t_end, const NewtonConfig& cfg, const StepObserver& observer) {
  check_tau(tau, false);
  if (!(t_end >= tau * (1.0 - 1e-12)))
    throw Error(ErrorKind::validation, fmt::format("t_end={} must be >= tau={}", t_end, tau));
  const int steps = step_count(tau, t_end);
  Trajectory traj{{0.0}, {u0}, {}, s, p, tau};
  traj.times.reserve(steps + 1);
  traj.states.reserve(steps + 1);
  for (int k = 1; k <= steps; ++k) {
    StepResult r;
    try {
      r = forward_step(p, s, traj.states.back(), tau, cfg);
      apply(p, r.state);  // rejects non-finite or inadmissible results
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(e.residual(), e.iterations(), fmt::format("step {}: {}", k, e.what()), k);
    } catch (const DomainError& e) {
      throw DomainError(e.species(), e.cell(), e.value(), fmt::format("step {}: {}", k, e.what()));
    }
    const double t = k * tau;
    traj.times.push_back(t);
    traj.states.push_back(std::move(r.state));
    traj.newton_iterations.push_back(r.iterations);
    if (observer) observer(k, t, traj.states.back(), r.iterations);
  }
  return traj;
}

}  // namespace erk
