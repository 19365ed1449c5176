#include "erk/entropy.hpp"

#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "erk/error.hpp"

namespace erk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_integer(double v) { return std::floor(v) == v; }

// u^e is real and finite.
bool power_defined(double u, double e) {
  if (u > 0.0) return true;
  if (u == 0.0) return e >= 0.0;
  return is_integer(e);
}

void require_admissible(const EntropyFunctional& e, const StateField& u, int order) {
  for (int s = 0; s < u.species(); ++s)
    for (int i = 0; i < u.n(); ++i)
      if (!e.admits(u(s, i), order))
        throw DomainError(s, i, u(s, i),
                          fmt::format("cell {} (species {}): u={} outside the domain of {}", i, s,
                                      u(s, i), e.name()));
}

void require_single_species(const StateField& u, const char* what) {
  if (u.species() != 1)
    throw Error(ErrorKind::validation, fmt::format("{} needs a single-species state", what));
}

Eigen::VectorXd map(const Eigen::VectorXd& v, auto fn) { return v.unaryExpr(fn); }

}  // namespace

EntropyFunctional::EntropyFunctional(EntropyKind kind) : kind_(std::move(kind)) {
  std::visit(
      [](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerEntropy>) {
          if (!(k.alpha >= 0.0))
            throw Error(ErrorKind::validation, fmt::format("power entropy needs alpha >= 0, got {}", k.alpha));
        } else if constexpr (!std::is_same_v<T, LogEntropySum>) {
          if (!(k.alpha > 0.0))
            throw Error(ErrorKind::validation, fmt::format("entropy needs alpha > 0, got {}", k.alpha));
        }
      },
      kind_);
}

double EntropyFunctional::alpha() const {
  return std::visit(
      [](const auto& k) -> double {
        if constexpr (std::is_same_v<std::decay_t<decltype(k)>, LogEntropySum>)
          return kNaN;
        else
          return k.alpha;
      },
      kind_);
}

std::string EntropyFunctional::name() const {
  return std::visit(
      [](const auto& k) -> std::string {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerEntropy>) return fmt::format("power(alpha={})", k.alpha);
        if constexpr (std::is_same_v<T, LogEntropySum>) return "log_sum";
        if constexpr (std::is_same_v<T, ExperimentPower>) return fmt::format("experiment_power(alpha={})", k.alpha);
        if constexpr (std::is_same_v<T, FirstOrder>) return fmt::format("first_order(alpha={})", k.alpha);
      },
      kind_);
}

bool EntropyFunctional::admits(double u, int order) const {
  if (!std::isfinite(u)) return false;
  return std::visit(
      [&](const auto& k) -> bool {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, LogEntropySum> || std::is_same_v<T, FirstOrder>) {
          return u > 0.0;
        } else if constexpr (std::is_same_v<T, PowerEntropy>) {
          if (k.alpha == 0.0) return u > 0.0;
          for (int d = 0; d <= order; ++d)
            if (!power_defined(u, k.alpha + 1.0 - d)) return false;
          return true;
        } else {
          for (int d = 0; d <= order; ++d)
            if (!power_defined(u, k.alpha - d)) return false;
          return true;
        }
      },
      kind_);
}

double EntropyFunctional::h(double u) const {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerEntropy>) {
          if (k.alpha == 0.0) return u * (std::log(u) - 1.0);
          return std::pow(u, k.alpha + 1.0) / (k.alpha * (k.alpha + 1.0));
        } else if constexpr (std::is_same_v<T, LogEntropySum>) {
          return u * (std::log(u) - 1.0);
        } else if constexpr (std::is_same_v<T, ExperimentPower>) {
          return std::pow(u, k.alpha);
        } else {
          throw Error(ErrorKind::validation, "h(u) is undefined for a first-order entropy");
        }
      },
      kind_);
}

double EntropyFunctional::dh(double u) const {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerEntropy>) {
          if (k.alpha == 0.0) return std::log(u);
          return std::pow(u, k.alpha) / k.alpha;
        } else if constexpr (std::is_same_v<T, LogEntropySum>) {
          return std::log(u);
        } else if constexpr (std::is_same_v<T, ExperimentPower>) {
          return k.alpha * std::pow(u, k.alpha - 1.0);
        } else {
          throw Error(ErrorKind::validation, "h'(u) is undefined for a first-order entropy");
        }
      },
      kind_);
}

double EntropyFunctional::d2h(double u) const {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, PowerEntropy>) {
          return std::pow(u, k.alpha - 1.0);
        } else if constexpr (std::is_same_v<T, LogEntropySum>) {
          return 1.0 / u;
        } else if constexpr (std::is_same_v<T, ExperimentPower>) {
          return k.alpha * (k.alpha - 1.0) * std::pow(u, k.alpha - 2.0);
        } else {
          throw Error(ErrorKind::validation, "h''(u) is undefined for a first-order entropy");
        }
      },
      kind_);
}

double EntropyFunctional::f(double u) const {
  const auto* k = std::get_if<FirstOrder>(&kind_);
  if (!k) throw Error(ErrorKind::validation, "f(u) is only defined for a first-order entropy");
  return std::pow(u, 0.5 * k->alpha);
}

double EntropyFunctional::df(double u) const {
  const auto* k = std::get_if<FirstOrder>(&kind_);
  if (!k) throw Error(ErrorKind::validation, "f'(u) is only defined for a first-order entropy");
  const double e = 0.5 * k->alpha;
  return e * std::pow(u, e - 1.0);
}

double EntropyFunctional::d2f(double u) const {
  const auto* k = std::get_if<FirstOrder>(&kind_);
  if (!k) throw Error(ErrorKind::validation, "f''(u) is only defined for a first-order entropy");
  const double e = 0.5 * k->alpha;
  return e * (e - 1.0) * std::pow(u, e - 2.0);
}

double evaluate(const EntropyFunctional& e, const StateField& u, const Grid1D& grid) {
  require_admissible(e, u, 0);
  if (e.is_first_order()) {
    require_single_species(u, "first-order entropy");
    const Eigen::VectorXd grad = forward_difference(grid, map(u.values(), [&](double v) { return e.f(v); }));
    return grad.squaredNorm() * grid.dx();
  }
  double sum = 0.0;
  for (double v : u.values()) sum += e.h(v);
  return sum * grid.dx();
}

double production(const EntropyFunctional& e, const ProblemSpec& p, const StateField& u) {
  require_admissible(e, u, 1);
  const StateField a = apply(p, u);
  const double dx = p.grid().dx();
  if (e.is_first_order()) {
    require_single_species(u, "first-order entropy");
    const Eigen::VectorXd lap = second_difference(p.grid(), map(u.values(), [&](double v) { return e.f(v); }));
    double sum = 0.0;
    for (int i = 0; i < u.n(); ++i) sum += lap[i] * e.df(u(0, i)) * a(0, i);
    return -2.0 * sum * dx;
  }
  double sum = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) sum += e.dh(u.values()[k]) * a.values()[k];
  return sum * dx;
}

double i0(const EntropyFunctional& e, const ProblemSpec& p, const StateField& u, double c_rk) {
  if (e.is_first_order())
    throw Error(ErrorKind::validation, "i0 needs a zeroth-order entropy; use i1");
  require_admissible(e, u, 2);
  const StateField a = apply(p, u);
  const StateField da = deriv_apply(p, u, a);
  double sum = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double v = u.values()[k];
    const double ak = a.values()[k];
    sum += c_rk * e.dh(v) * da.values()[k] + e.d2h(v) * ak * ak;
  }
  return sum * p.grid().dx();
}

double i1(const EntropyFunctional& e, const ProblemSpec& p, const StateField& u, double c_rk) {
  if (!e.is_first_order()) throw Error(ErrorKind::validation, "i1 needs a first-order entropy; use i0");
  require_single_species(u, "i1");
  require_admissible(e, u, 2);
  const Grid1D& g = p.grid();
  const StateField a = apply(p, u);
  const StateField da = deriv_apply(p, u, a);
  const Eigen::VectorXd& v = u.values();
  const Eigen::VectorXd lap = second_difference(g, map(v, [&](double x) { return e.f(x); }));
  Eigen::VectorXd flux(u.n());
  for (int i = 0; i < u.n(); ++i) flux[i] = e.df(v[i]) * a(0, i);
  const Eigen::VectorXd grad = forward_difference(g, flux);
  double sum = 0.0;
  for (int i = 0; i < u.n(); ++i) {
    const double ai = a(0, i);
    sum += grad[i] * grad[i] - c_rk * lap[i] * e.df(v[i]) * da(0, i) - lap[i] * e.d2f(v[i]) * ai * ai;
  }
  return sum * g.dx();
}

double second_derivative_at_zero(const EntropyFunctional& e, const ProblemSpec& p,
                                 const StateField& u, double c_rk) {
  return e.is_first_order() ? -2.0 * i1(e, p, u, c_rk) : -i0(e, p, u, c_rk);
}

double q_denominator(const EntropyFunctional& e, const ProblemSpec& p, const StateField& u,
                     QExponent exponent) {
  const auto* pm = std::get_if<PorousMedium>(&p.family());
  if (!pm) throw Error(ErrorKind::validation, "Q(tau) is defined for the porous-medium family only");
  const double alpha = e.alpha();
  if (std::isnan(alpha)) throw Error(ErrorKind::validation, "Q(tau) needs an entropy exponent alpha");
  const double k = alpha + 2.0 * pm->beta - (exponent == QExponent::num_q ? 2.0 : 5.0);
  const Eigen::VectorXd ux = central_difference(p.grid(), u.values());
  double sum = 0.0;
  for (int i = 0; i < u.n(); ++i) {
    const double d2 = ux[i] * ux[i];
    sum += std::pow(u(0, i), k) * d2 * d2;
  }
  return sum * p.grid().dx();
}

GProfile profile_g(const EntropyFunctional& e, const ProblemSpec& p, const Scheme& s,
                   const StateField& u, double tau_max, int m, const NewtonConfig& cfg,
                   QExponent exponent, double base_time) {
  if (!(tau_max > 0.0) || !std::isfinite(tau_max))
    throw Error(ErrorKind::validation, fmt::format("tau_max must be > 0, got {}", tau_max));
  if (m < 3) throw Error(ErrorKind::validation, fmt::format("profile needs m >= 3, got {}", m));

  GProfile out;
  out.base_time = base_time;
  const double h0 = evaluate(e, u, p.grid());
  const double step = tau_max / m;
  // Solutions at the two previous τ_j give a linear predictor for the next solve.
  std::vector<StateField> prev;
  for (int j = 0; j <= m; ++j) {
    const double tau = j * step;
    try {
      std::optional<StateField> guess;
      if (prev.size() == 2) guess = prev[1].with_values(2.0 * prev[1].values() - prev[0].values());
      const StepResult back = backward_solve(p, s, u, tau, cfg, guess ? &*guess : nullptr);
      const double gj = j == 0 ? 0.0 : h0 - evaluate(e, back.state, p.grid());
      out.taus.push_back(tau);
      out.g.push_back(gj);
      if (prev.size() == 2) prev.erase(prev.begin());
      prev.push_back(back.state);
    } catch (const Error& err) {
      out.failure_index = j;
      out.failure_message = err.what();
      break;
    }
  }

  const std::size_t len = out.g.size();
  out.d2g.assign(len, kNaN);
  out.q.assign(len, kNaN);
  for (std::size_t j = 1; j + 1 < len; ++j)
    out.d2g[j] = (out.g[j + 1] - 2.0 * out.g[j] + out.g[j - 1]) / (step * step);

  if (std::holds_alternative<PorousMedium>(p.family()) && !std::isnan(e.alpha())) {
    const double denom = q_denominator(e, p, u, exponent);
    for (std::size_t j = 1; j + 1 < len; ++j) out.q[j] = out.d2g[j] / denom;
  }
  return out;
}

double extrapolated_d2g(const GProfile& profile) {
  if (profile.d2g.size() < 4)
    throw Error(ErrorKind::validation, "extrapolation needs d2g at indices 1 and 2");
  return 2.0 * profile.d2g[1] - profile.d2g[2];
}

void write_csv(std::ostream& out, const GProfile& profile) {
  out << "tau,G,d2G,Q\n";
  for (std::size_t j = 0; j < profile.g.size(); ++j)
    out << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g}\n", profile.taus[j], profile.g[j],
                       profile.d2g[j], profile.q[j]);
}

double fit_decay_rate(std::span<const double> times, std::span<const double> entropy, double steady,
                      TimeWindow window) {
  if (times.size() != entropy.size())
    throw Error(ErrorKind::validation, "time and entropy series differ in length");
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    if (t < window.begin || t > window.end) continue;
    const double gap = entropy[k] - steady;
    if (!(gap > 0.0))
      throw Error(ErrorKind::validation,
                  fmt::format("entropy gap {} at t={} is not positive; cannot fit a decay rate", gap, t));
    const double y = std::log(gap);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  if (count < 2)
    throw Error(ErrorKind::validation,
                fmt::format("decay fit needs >= 2 samples in [{}, {}], got {}", window.begin, window.end, count));
  const double nn = static_cast<double>(count);
  const double slope = (nn * sty - st * sy) / (nn * stt - st * st);
  return -slope;
}

double fit_decay_rate(const Trajectory& traj, const EntropyFunctional& e, TimeWindow window,
                      std::optional<double> steady) {
  const double ref = steady ? *steady : steady_state_entropy(e, traj.problem, traj.states.front());
  std::vector<double> values;
  values.reserve(traj.states.size());
  for (const auto& s : traj.states) values.push_back(evaluate(e, s, traj.problem.grid()));
  return fit_decay_rate(traj.times, values, ref, window);
}

double steady_state_entropy(const EntropyFunctional& e, const ProblemSpec& p, const StateField& u0) {
  StateField steady(u0.species(), u0.n());
  const auto* sys = std::get_if<LinearSystem>(&p.family());
  if (sys && sys->mu > 0.0) {
    steady.values().setConstant(u0.values().mean());
  } else {
    for (int s = 0; s < u0.species(); ++s) steady.species_values(s).setConstant(u0.species_values(s).mean());
  }
  return evaluate(e, steady, p.grid());
}

}  // namespace erk
