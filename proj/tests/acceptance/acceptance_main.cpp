// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli/config.hpp"
#include "erk/dlss_chain.hpp"
#include "erk/entropy.hpp"
#include "erk/error.hpp"
#include "erk/regions.hpp"
#include "erk/stepping.hpp"
#include "erk/tableau.hpp"
#include "oracles.hpp"

using namespace erk;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome()> body;
};

const char* const kSchemes[] = {"explicit_euler", "implicit_euler", "trapezoidal", "simpson"};

StateField barenblatt_state(const Grid1D& g, double beta) {
  StateField u(1, g.n());
  for (int i = 0; i < g.n(); ++i) u(0, i) = cli::barenblatt(g.x(i), beta, 0.01, 0.25);
  return u;
}

StateField smooth_state(const Grid1D& g, double mean, double a1, double a2) {
  StateField u(1, g.n());
  for (int i = 0; i < g.n(); ++i) {
    const double x = 2.0 * std::numbers::pi * g.x(i) / g.length();
    u(0, i) = mean + a1 * std::cos(x) + a2 * std::sin(2.0 * x);
  }
  return u;
}

Outcome crk_table() {
  const auto& reg = builtin_schemes();
  const double ee = c_rk(reg.lookup("explicit_euler").tableau());
  const double ie = c_rk(reg.lookup("implicit_euler").tableau());
  const double tr = c_rk(reg.lookup("trapezoidal").tableau());
  return {ee == 2.0 && ie == 0.0 && tr == 1.0, fmt::format("explicit={} implicit={} trapezoidal={}", ee, ie, tr)};
}

Outcome r0_closed_form() {
  int mismatches = 0, strip_mismatches = 0, compared = 0;
  for (double c : {0.0, 1.0, 2.0})
    for (int i = 1; i <= 100; ++i)
      for (int j = 1; j <= 100; ++j) {
        const double a = 0.05 * i, b = 0.05 * j, z = a - b;
        const bool got = r0_1d({a, b, 1, c});
        const bool strip = c == 0.0 ? true : c == 1.0 ? (-2.0 < z && z < 1.0) : (-1.0 < z && z < 1.0);
        strip_mismatches += got != strip;
        const double disc = oracle::pm_aux_discriminant(z, c);
        if (std::abs(disc) < 1e-9) continue;  // boundary
        ++compared;
        mismatches += got != (disc > 0.0);
      }
  return {mismatches == 0 && strip_mismatches == 0,
          fmt::format("strip mismatches={} discriminant mismatches={} of {} off-boundary cells",
                      strip_mismatches, mismatches, compared)};
}

Outcome r0_certified() {
  std::mt19937_64 rng(20240601);
  int accepted = 0, failed = 0;
  bool one_one = true;
  for (int d : {2, 10})
    for (double c : {0.0, 1.0, 2.0}) {
      one_one = one_one && r0_membership({1.0, 1.0, d, c}).member;
      for (int i = 0; i <= 20; ++i)
        for (int j = 0; j <= 20; ++j) {
          const RegionQuery q{0.2 + 0.24 * i, 0.2 + 0.24 * j, d, c};
          const Membership m = r0_membership(q);
          if (!m.member) continue;
          ++accepted;
          const auto b = r0_coefficients(q, m.witness->c1, m.witness->c2);
          if (!oracle::sample_q(b, 10000, rng).ok) ++failed;
        }
    }
  return {failed == 0 && one_one && accepted > 0,
          fmt::format("accepted={} oracle failures={} (1,1) member in all cases={}", accepted, failed, one_one)};
}

Outcome r1_region() {
  std::mt19937_64 rng(7);
  int accepted = 0, failed = 0, gate_violations = 0, cells = 0;
  for (int i = 0; i <= 28; ++i)
    for (int j = 0; j <= 28; ++j) {
      const double a = 0.5 + 0.125 * i, b = 0.5 + 0.125 * j;
      ++cells;
      const Membership m = r1_membership(a, b);
      const double z = a - 2.0 * b;
      if ((z < -2.0 || z > 1.0) && m.member) ++gate_violations;
      if (!m.member) continue;
      ++accepted;
      const auto& w = *m.witness;
      const auto coeff = r1_coefficients(a, b, 1.0, w.c1, w.c2, *w.c3);
      if (!oracle::sample_p(coeff, 10000, rng).ok) ++failed;
    }
  return {accepted > 0 && failed == 0 && gate_violations == 0,
          fmt::format("accepted={} of {} cells, oracle failures={}, gate violations={}", accepted, cells,
                      failed, gate_violations)};
}

Outcome dlss_constants() {
  const Rational c8 = dlss_c8_star();
  const bool b12 = dlss_b12(c8) == Rational(20) / Rational(129);
  const bool stationary = dlss_db12(c8) == 0;
  const double p = to_double(dlss_chain(parse_rational("-0.029"), c8).p);
  return {b12 && stationary && p > 0.004 && p < 0.005,
          fmt::format("b12=20/129:{} db12=0:{} p(-0.029)={:.6g}", b12, stationary, p)};
}

Outcome reproduction_dissipation() {
  const Grid1D g(64, 1.0);
  const ProblemSpec p(PorousMedium{2.0}, g);
  const EntropyFunctional e(ExperimentPower{5.0});
  const NewtonConfig cfg{1e-15, 50};
  const StateField u0 = barenblatt_state(g, 2.0);
  const double mass0 = u0.values().sum() * g.dx();
  std::string detail;
  bool ok = true;
  for (const char* name : kSchemes) {
    const Trajectory traj = run(p, builtin_schemes().lookup(name), u0, 1e-4, 0.01, cfg);
    int increases = 0;
    double drift = 0.0;
    double prev = evaluate(e, u0, g);
    for (std::size_t k = 1; k < traj.states.size(); ++k) {
      const double h = evaluate(e, traj.states[k], g);
      if (h > prev) ++increases;
      prev = h;
      drift = std::max(drift, std::abs(traj.states[k].values().sum() * g.dx() - mass0));
    }
    ok = ok && increases == 0 && drift <= 1e-10 && traj.states.size() == 101;
    detail += fmt::format("{}: steps={} increases={} drift={:.1e}; ", name, traj.states.size() - 1, increases,
                          drift);
  }
  return {ok, detail};
}

Outcome reproduction_profile() {
  const Grid1D g(64, 1.0);
  const ProblemSpec p(PorousMedium{2.0}, g);
  const EntropyFunctional e(ExperimentPower{5.0});
  const NewtonConfig cfg{1e-15, 50};
  const Scheme& base = builtin_schemes().lookup("implicit_euler");
  StateField u = barenblatt_state(g, 2.0);
  double t = 0.0;
  bool ok = true;
  std::string detail;
  for (double tb : {0.001, 0.003, 0.006}) {
    u = run(p, base, u, 1e-4, tb - t, cfg).states.back();
    t = tb;
    for (const char* name : kSchemes) {
      const GProfile prof = profile_g(e, p, builtin_schemes().lookup(name), u, 1e-3, 100, cfg);
      int bad_d2g = 0, bad_q = 0, checked = 0;
      for (std::size_t j = 1; j + 1 < prof.g.size(); ++j) {
        if (prof.taus[j] > 3e-4 * (1.0 + 1e-12)) break;
        ++checked;
        bad_d2g += !(prof.d2g[j] < 0.0);
        bad_q += !(prof.q[j] < 0.0);
      }
      // Every grid point up to 3e-4 needs its second difference.
      const bool covered = checked == 30;
      ok = ok && covered && bad_d2g == 0 && bad_q == 0;
      detail += fmt::format("t={} {}: d2g<0 at {}/30, Q<0 at {}/30", tb, name, checked - bad_d2g, checked - bad_q);
      if (prof.failure_index)
        detail += fmt::format(", backward solve fails from tau={:.2e}", prof.failure_index.value() * 1e-5);
      detail += "; ";
    }
  }
  return {ok, detail};
}

struct Richardson {
  double err_coarse;
  double err_fine;
  double rounding;  // size of the rounding error of a second difference at the coarse spacing
};

// |extrapolated d2g - G''(0)| at τ-grid spacing h and h/2.
Richardson richardson(const EntropyFunctional& e, const ProblemSpec& p, const Scheme& s, const StateField& u,
                      double h) {
  const NewtonConfig cfg{1e-14, 50};
  const double exact = second_derivative_at_zero(e, p, u, s.c_rk_effective());
  const double e1 = std::abs(extrapolated_d2g(profile_g(e, p, s, u, 4 * h, 4, cfg)) - exact);
  const double e2 = std::abs(extrapolated_d2g(profile_g(e, p, s, u, 2 * h, 4, cfg)) - exact);
  const double rounding = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(evaluate(e, u, p.grid())) / (h * h);
  return {e1, e2, rounding};
}

Outcome cross_oracle() {
  const Grid1D g(32, 1.0);
  const ProblemSpec p(PorousMedium{2.0}, g);
  const StateField u = smooth_state(g, 1.0, 0.3, 0.1);
  bool ok = true;
  std::string detail;
  for (const char* name : {"explicit_euler", "implicit_euler", "trapezoidal"}) {
    const Scheme& s = builtin_schemes().lookup(name);
    for (const EntropyFunctional& e : {EntropyFunctional(PowerEntropy{1.0}), EntropyFunctional(FirstOrder{1.0})}) {
      const Richardson r = richardson(e, p, s, u, 2e-5);
      const char* label = e.is_first_order() ? "i1" : "i0";
      if (r.err_coarse <= r.rounding) {
        // G is a polynomial of degree two in τ here, so the second difference has no truncation error.
        detail += fmt::format("{}/{}: exact to rounding (error {:.1e} <= {:.1e}); ", name, label, r.err_coarse,
                              r.rounding);
        continue;
      }
      const double ratio = r.err_coarse / r.err_fine;
      ok = ok && std::abs(ratio - 4.0) <= 0.5;
      detail += fmt::format("{}/{}: ratio={:.3f}; ", name, label, ratio);
    }
  }
  return {ok, detail};
}

Outcome backward_expansion() {
  const Grid1D g(32, 1.0);
  const ProblemSpec p(PorousMedium{2.0}, g);
  const StateField u = smooth_state(g, 1.0, 0.3, 0.1);
  const NewtonConfig cfg{1e-14, 50};
  const StateField a = apply(p, u);
  const StateField da = deriv_apply(p, u, a);
  bool ok = true;
  std::string detail;
  for (const char* name : {"trapezoidal", "implicit_euler"}) {
    const Scheme& s = builtin_schemes().lookup(name);
    const double c = s.c_rk_effective();
    auto remainder = [&](double tau) {
      const StateField v = backward_solve(p, s, u, tau, cfg).state;
      const Eigen::VectorXd taylor = u.values() + tau * a.values() + 0.5 * tau * tau * c * da.values();
      return (v.values() - taylor).lpNorm<Eigen::Infinity>();
    };
    const double r1 = remainder(6.25e-5), r2 = remainder(3.125e-5), r3 = remainder(1.5625e-5);
    if (c == 0.0) {
      // v(τ) = u + τA[u] exactly: the remainder vanishes up to the solver tolerance.
      const bool exact = std::max({r1, r2, r3}) <= 1e-13;
      ok = ok && exact;
      detail += fmt::format("{}: remainder identically zero (max {:.1e}); ", name, std::max({r1, r2, r3}));
    } else {
      const double q1 = r1 / r2, q2 = r2 / r3;
      ok = ok && std::abs(q1 - 8.0) <= 1.0 && std::abs(q2 - 8.0) <= 1.0;
      detail += fmt::format("{}: ratios {:.3f}, {:.3f}; ", name, q1, q2);
    }
  }
  return {ok, detail};
}

Outcome linear_system() {
  const Grid1D g(64, 1.0);
  const ProblemSpec p(LinearSystem{1.0, 1.0, 1.0}, g);
  const EntropyFunctional e(LogEntropySum{});
  const Scheme& s = builtin_schemes().lookup("trapezoidal");
  const NewtonConfig cfg{1e-12, 50};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  StateField u0(2, 64);
  for (auto& v : u0.values()) v = dist(rng);

  const Trajectory traj = run(p, s, u0, 1e-4, 0.02, cfg);
  int increases = 0, nonpositive_i0 = 0;
  double prev = evaluate(e, u0, g);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const double h = evaluate(e, traj.states[k], g);
    if (k > 0 && h > prev) ++increases;
    prev = h;
    if (!(i0(e, p, traj.states[k], 1.0) > 0.0)) ++nonpositive_i0;
  }

  StateField same(2, 64);
  for (int i = 0; i < 64; ++i) same(0, i) = same(1, i) = dist(rng);
  const Trajectory twin = run(p, s, same, 1e-4, 0.02, cfg);
  double split = 0.0;
  for (const auto& st : twin.states) split = std::max(split, (st.species_values(0) - st.species_values(1)).cwiseAbs().maxCoeff());

  return {increases == 0 && nonpositive_i0 == 0 && split <= 1e-12 && traj.states.size() == 201,
          fmt::format("steps={} entropy increases={} i0<=0 at {} states, species split={:.1e}",
                      traj.states.size() - 1, increases, nonpositive_i0, split)};
}

Outcome implicit_euler_bound() {
  const Grid1D g(64, 1.0);
  const ProblemSpec p(PorousMedium{2.0}, g);
  const Scheme& ie = builtin_schemes().lookup("implicit_euler");
  const NewtonConfig cfg{1e-12, 50};
  std::vector<StateField> states;
  const Trajectory traj = run(p, ie, barenblatt_state(g, 2.0), 1e-4, 0.005, cfg);
  for (std::size_t k = 0; k < traj.states.size(); k += 10) states.push_back(traj.states[k]);
  states.push_back(smooth_state(g, 1.0, 0.4, 0.1));

  int violations = 0, checks = 0;
  for (const EntropyFunctional& e : {EntropyFunctional(PowerEntropy{1.0}), EntropyFunctional(ExperimentPower{2.0})})
    for (const auto& u : states)
      for (double tau : {1e-4, 1e-2, 1.0}) {
        const StateField v = backward_solve(p, ie, u, tau, cfg).state;
        const double h_u = evaluate(e, u, g), h_v = evaluate(e, v, g);
        const double gtau = h_u - h_v;
        const double bound = -tau * production(e, p, u);
        ++checks;
        if (gtau > bound + 1e-12 * (std::abs(h_u) + std::abs(h_v))) ++violations;
      }
  return {violations == 0, fmt::format("G(tau) <= -tau*production in {}/{} cases", checks - violations, checks)};
}

Outcome decay_fit() {
  double worst = 0.0;
  for (double kappa : {0.5, 3.0, 40.0})
    for (double tau : {1e-3, 1e-2, 0.1}) {
      std::vector<double> t, h;
      for (int k = 0; k <= 200; ++k) {
        t.push_back(k * tau);
        h.push_back(0.7 * std::pow(1.0 + kappa * tau, -k));
      }
      const double rate = fit_decay_rate(t, h, 0.0, {t.front(), t.back()});
      const double expected = std::log1p(kappa * tau) / tau;
      worst = std::max(worst, std::abs(rate - expected) / expected);
    }
  return {worst <= 1e-10, fmt::format("max relative error {:.2e}", worst)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "C_RK table", 1.0, crk_table},
      {2, "one-dimensional zeroth-order region closed forms", 1.0, r0_closed_form},
      {3, "zeroth-order region certification d in {2,10}", 120.0, r0_certified},
      {4, "first-order region", 120.0, r1_region},
      {5, "DLSS constants", 1.0, dlss_constants},
      {6, "Barenblatt run: entropy dissipation and mass", 30.0, reproduction_dissipation},
      {7, "Barenblatt run: G'' profile and Q", 300.0, reproduction_profile},
      {8, "G''(0) cross-oracle Richardson ratio", 60.0, cross_oracle},
      {9, "backward-solve expansion remainder", 10.0, backward_expansion},
      {10, "linear system entropy and symmetry", 30.0, linear_system},
      {11, "implicit Euler unconditional bound", 10.0, implicit_euler_bound},
      {12, "decay-rate fit", 1.0, decay_fit},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.body();
    } catch (const std::exception& e) {
      out = {false, fmt::format("exception: {}", e.what())};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = out.pass && in_time;
    failures += !pass;
    std::cout << fmt::format("{} [{}] {} ({:.2f}s / {:.0f}s): {}{}\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                             c.limit_s, out.detail, in_time ? "" : " (over time limit)");
    std::cout.flush();
  }
  return failures == 0 ? 0 : 1;
}
