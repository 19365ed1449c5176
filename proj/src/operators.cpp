#include "erk/operators.hpp"

#include <cmath>

#include <fmt/format.h>

#include "erk/error.hpp"

namespace erk {

namespace {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

bool is_integer(double v) { return std::floor(v) == v; }

void require_finite(const StateField& u) {
  for (int s = 0; s < u.species(); ++s)
    for (int i = 0; i < u.n(); ++i)
      if (!std::isfinite(u(s, i)))
        throw DomainError(s, i, u(s, i),
                          fmt::format("non-finite value {} at cell {} (species {})", u(s, i), i, s));
}

void check_state(const ProblemSpec& p, const StateField& u) {
  if (u.species() != p.species() || u.n() != p.grid().n())
    throw Error(ErrorKind::validation,
                fmt::format("state shape {}x{} does not match problem {}x{}", u.species(), u.n(),
                            p.species(), p.grid().n()));
  require_finite(u);
  if (const auto* pm = std::get_if<PorousMedium>(&p.family())) {
    const bool fractional = !is_integer(pm->beta);
    for (int i = 0; i < u.n(); ++i) {
      const double v = u(0, i);
      if (v < 0.0 && fractional)
        throw DomainError(0, i, v,
                          fmt::format("cell {}: u={} < 0 with non-integer beta={}", i, v, pm->beta));
      if (v == 0.0 && pm->beta < 1.0)
        throw DomainError(0, i, v,
                          fmt::format("cell {}: u=0 with beta={} < 1 (singular u^(beta-1))", i,
                                      pm->beta));
    }
  } else if (std::holds_alternative<Dlss>(p.family())) {
    for (int i = 0; i < u.n(); ++i)
      if (!(u(0, i) > 0.0))
        throw DomainError(0, i, u(0, i),
                          fmt::format("cell {}: u={} is not positive (log u undefined)", i, u(0, i)));
  }
}

SparseMatrix second_difference_matrix(const Grid1D& g) {
  const int n = g.n();
  const double inv = 1.0 / (g.dx() * g.dx());
  std::vector<Triplet> t;
  t.reserve(3 * n);
  for (int i = 0; i < n; ++i) {
    t.emplace_back(i, g.wrap(i - 1), inv);
    t.emplace_back(i, i, -2.0 * inv);
    t.emplace_back(i, g.wrap(i + 1), inv);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix diagonal(const Eigen::VectorXd& d) {
  SparseMatrix m(d.size(), d.size());
  m.reserve(Eigen::VectorXi::Constant(d.size(), 1));
  for (Eigen::Index i = 0; i < d.size(); ++i) m.insert(i, i) = d[i];
  m.makeCompressed();
  return m;
}

// -(F_{i+1/2} - F_{i-1/2}) / dx² with F_{i+1/2} = coeff_{i+1/2} (f_{i+1} - f_i);
// coeff(i) returns the interface coefficient between cells i and i+1.
template <class Coeff>
Eigen::VectorXd negative_flux_divergence(const Grid1D& g, const Eigen::VectorXd& f, Coeff coeff) {
  const int n = g.n();
  const double dx2 = g.dx() * g.dx();
  Eigen::VectorXd flux(n);
  for (int i = 0; i < n; ++i) flux[i] = coeff(i) * (f[g.wrap(i + 1)] - f[i]);
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = -(flux[i] - flux[g.wrap(i - 1)]) / dx2;
  return out;
}

Eigen::VectorXd pme_mobility(const PorousMedium& pm, const Eigen::VectorXd& u) {
  return u.unaryExpr([&](double v) { return pm.beta * std::pow(v, pm.beta - 1.0); });
}

}  // namespace

Grid1D::Grid1D(int n, double length) : n_(n), length_(length), dx_(length / n) {
  if (n < 4) throw Error(ErrorKind::validation, fmt::format("grid needs n >= 4 cells, got {}", n));
  if (!(length > 0.0))
    throw Error(ErrorKind::validation, fmt::format("grid length must be positive, got {}", length));
}

StateField::StateField(int species, int n)
    : species_(species), n_(n), values_(Eigen::VectorXd::Zero(species * n)) {}

StateField::StateField(int species, int n, Eigen::VectorXd values)
    : species_(species), n_(n), values_(std::move(values)) {
  if (values_.size() != species * n)
    throw Error(ErrorKind::validation,
                fmt::format("state has {} values, expected {}x{}", values_.size(), species, n));
}

StateField StateField::constant(int species, int n, double value) {
  return {species, n, Eigen::VectorXd::Constant(species * n, value)};
}

StateField StateField::shifted(int offset) const {
  StateField out(species_, n_);
  for (int s = 0; s < species_; ++s)
    for (int i = 0; i < n_; ++i) out(s, (((i + offset) % n_) + n_) % n_) = (*this)(s, i);
  return out;
}

ProblemSpec::ProblemSpec(Family family, Grid1D grid) : family_(std::move(family)), grid_(grid) {
  if (const auto* pm = std::get_if<PorousMedium>(&family_)) {
    if (!(pm->beta > 0.0))
      throw Error(ErrorKind::validation, fmt::format("beta must be > 0, got {}", pm->beta));
  } else if (const auto* ls = std::get_if<LinearSystem>(&family_)) {
    if (!(ls->rho1 >= 0.0 && ls->rho2 >= 0.0 && ls->mu >= 0.0))
      throw Error(ErrorKind::validation,
                  fmt::format("rho1, rho2, mu must be >= 0, got {}, {}, {}", ls->rho1, ls->rho2,
                              ls->mu));
  } else if (const auto* sd = std::get_if<ScalarDiffusion>(&family_)) {
    if (!sd->a || !sd->da)
      throw Error(ErrorKind::validation, "scalar diffusion needs a(u) and a'(u)");
  }
}

int ProblemSpec::species() const {
  return std::holds_alternative<LinearSystem>(family_) ? 2 : 1;
}

bool ProblemSpec::is_linear() const {
  if (std::holds_alternative<LinearSystem>(family_)) return true;
  if (const auto* pm = std::get_if<PorousMedium>(&family_)) return pm->beta == 1.0;
  return false;
}

Eigen::VectorXd second_difference(const Grid1D& g, const Eigen::VectorXd& f) {
  const int n = g.n();
  const double dx2 = g.dx() * g.dx();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = (f[g.wrap(i + 1)] - 2.0 * f[i] + f[g.wrap(i - 1)]) / dx2;
  return out;
}

Eigen::VectorXd forward_difference(const Grid1D& g, const Eigen::VectorXd& f) {
  const int n = g.n();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = (f[g.wrap(i + 1)] - f[i]) / g.dx();
  return out;
}

Eigen::VectorXd central_difference(const Grid1D& g, const Eigen::VectorXd& f) {
  const int n = g.n();
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out[i] = (f[g.wrap(i + 1)] - f[g.wrap(i - 1)]) / (2.0 * g.dx());
  return out;
}

StateField apply(const ProblemSpec& p, const StateField& u) {
  check_state(p, u);
  const Grid1D& g = p.grid();
  StateField out = p.make_state();
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, PorousMedium>) {
          const Eigen::VectorXd w = u.values().unaryExpr([&](double v) { return std::pow(v, fam.beta); });
          out.values() = -second_difference(g, w);
        } else if constexpr (std::is_same_v<T, ScalarDiffusion>) {
          const Eigen::VectorXd& v = u.values();
          out.values() = negative_flux_divergence(
              g, v, [&](int i) { return fam.a(0.5 * (v[i] + v[g.wrap(i + 1)])); });
        } else if constexpr (std::is_same_v<T, LinearSystem>) {
          const Eigen::VectorXd u1 = u.species_values(0);
          const Eigen::VectorXd u2 = u.species_values(1);
          out.species_values(0) =
              negative_flux_divergence(g, u1, [&](int) { return fam.rho1; }) - fam.mu * (u2 - u1);
          out.species_values(1) =
              negative_flux_divergence(g, u2, [&](int) { return fam.rho2; }) - fam.mu * (u1 - u2);
        } else {
          const Eigen::VectorXd logu = u.values().array().log().matrix();
          const Eigen::VectorXd inner = u.values().cwiseProduct(second_difference(g, logu));
          out.values() = second_difference(g, inner);
        }
      },
      p.family());
  return out;
}

StateField deriv_apply(const ProblemSpec& p, const StateField& u, const StateField& w) {
  check_state(p, u);
  if (w.species() != u.species() || w.n() != u.n())
    throw Error(ErrorKind::validation, "direction and state shapes differ");
  const Grid1D& g = p.grid();
  StateField out = p.make_state();
  std::visit(
      [&](const auto& fam) {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, PorousMedium>) {
          out.values() = -second_difference(g, pme_mobility(fam, u.values()).cwiseProduct(w.values()));
        } else if constexpr (std::is_same_v<T, ScalarDiffusion>) {
          const Eigen::VectorXd& v = u.values();
          const Eigen::VectorXd& dv = w.values();
          const int n = g.n();
          const double dx2 = g.dx() * g.dx();
          Eigen::VectorXd dflux(n);
          for (int i = 0; i < n; ++i) {
            const int ip = g.wrap(i + 1);
            const double m = 0.5 * (v[i] + v[ip]);
            dflux[i] = fam.da(m) * 0.5 * (dv[i] + dv[ip]) * (v[ip] - v[i]) + fam.a(m) * (dv[ip] - dv[i]);
          }
          for (int i = 0; i < n; ++i) out.values()[i] = -(dflux[i] - dflux[g.wrap(i - 1)]) / dx2;
        } else if constexpr (std::is_same_v<T, LinearSystem>) {
          out = apply(p, w);
        } else {
          const Eigen::VectorXd logu = u.values().array().log().matrix();
          const Eigen::VectorXd ratio = w.values().cwiseQuotient(u.values());
          const Eigen::VectorXd inner = w.values().cwiseProduct(second_difference(g, logu)) +
                                        u.values().cwiseProduct(second_difference(g, ratio));
          out.values() = second_difference(g, inner);
        }
      },
      p.family());
  return out;
}

Eigen::SparseMatrix<double> jacobian(const ProblemSpec& p, const StateField& u) {
  check_state(p, u);
  const Grid1D& g = p.grid();
  const int n = g.n();
  const SparseMatrix d2 = second_difference_matrix(g);
  return std::visit(
      [&](const auto& fam) -> SparseMatrix {
        using T = std::decay_t<decltype(fam)>;
        if constexpr (std::is_same_v<T, PorousMedium>) {
          SparseMatrix j = -(d2 * diagonal(pme_mobility(fam, u.values())));
          return j;
        } else if constexpr (std::is_same_v<T, ScalarDiffusion>) {
          const Eigen::VectorXd& v = u.values();
          const double inv = 1.0 / (g.dx() * g.dx());
          std::vector<Triplet> t;
          t.reserve(4 * n);
          for (int i = 0; i < n; ++i) {
            // Flux F_{i+1/2} enters row i with -1/dx² and row i+1 with +1/dx².
            const int ip = g.wrap(i + 1);
            const double m = 0.5 * (v[i] + v[ip]);
            const double slope = 0.5 * fam.da(m) * (v[ip] - v[i]);
            const double dfi = slope - fam.a(m);
            const double dfip = slope + fam.a(m);
            t.emplace_back(i, i, -inv * dfi);
            t.emplace_back(i, ip, -inv * dfip);
            t.emplace_back(ip, i, inv * dfi);
            t.emplace_back(ip, ip, inv * dfip);
          }
          SparseMatrix j(n, n);
          j.setFromTriplets(t.begin(), t.end());
          return j;
        } else if constexpr (std::is_same_v<T, LinearSystem>) {
          std::vector<Triplet> t;
          t.reserve(8 * n);
          const double rho[2] = {fam.rho1, fam.rho2};
          for (int s = 0; s < 2; ++s) {
            const int off = s * n;
            const int other = (1 - s) * n;
            for (int k = 0; k < d2.outerSize(); ++k)
              for (SparseMatrix::InnerIterator it(d2, k); it; ++it)
                t.emplace_back(off + it.row(), off + it.col(), -rho[s] * it.value());
            for (int i = 0; i < n; ++i) {
              t.emplace_back(off + i, off + i, fam.mu);
              t.emplace_back(off + i, other + i, -fam.mu);
            }
          }
          SparseMatrix j(2 * n, 2 * n);
          j.setFromTriplets(t.begin(), t.end());
          return j;
        } else {
          const Eigen::VectorXd logu = u.values().array().log().matrix();
          const Eigen::VectorXd inv_u = u.values().cwiseInverse();
          SparseMatrix inner = diagonal(second_difference(g, logu));
          inner += diagonal(u.values()) * d2 * diagonal(inv_u);
          SparseMatrix j = d2 * inner;
          return j;
        }
      },
      p.family());
}

}  // namespace erk
