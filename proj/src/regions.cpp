#include "erk/regions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "erk/error.hpp"

namespace erk {

namespace {

struct Quadratic {
  double c2;  // leading
  double c1;
  double c0;
};

// Exact (up to rounding) recovery of a quadratic from its values at -1, 0, 1.
Quadratic fit_quadratic(double fm, double f0, double fp) {
  return {0.5 * (fp + fm) - f0, 0.5 * (fp - fm), f0};
}

double eval(const Quadratic& q, double x) { return (q.c2 * x + q.c1) * x + q.c0; }

void check_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw Error(ErrorKind::validation, fmt::format("{} must be > 0, got {}", name, v));
}

}  // namespace

void RegionQuery::check() const {
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  if (d < 1) throw Error(ErrorKind::validation, fmt::format("d must be >= 1, got {}", d));
  if (c_rk != 0.0 && c_rk != 1.0 && c_rk != 2.0)
    throw Error(ErrorKind::validation, fmt::format("c_rk must be 0, 1 or 2, got {}", c_rk));
}

bool r0_1d(const RegionQuery& q) {
  q.check();
  if (q.d != 1)
    throw Error(ErrorKind::validation, fmt::format("closed-form region needs d = 1, got {}", q.d));
  const double z = q.alpha - q.beta;
  if (q.c_rk == 0.0) return true;
  if (q.c_rk == 1.0) return -2.0 < z && z < 1.0;
  return -1.0 < z && z < 1.0;
}

std::array<double, 6> r0_coefficients(const RegionQuery& q, double c1, double c2) {
  const double a = q.alpha, b = q.beta, d = q.d, c = q.c_rk;
  const double w = 1.0 - 1.0 / d;
  return {
      (c + 1.0) + w * c1,
      (c + 2.0) * (b - a) + w * (2.0 * b - a - 1.0) * c1 - (2.0 / d + 1.0) * c2,
      (b - a) * (b - a) - (2.0 * b - 2.0 * a - 1.0) * c2,
      -(d - 1.0) * ((2.0 * b - a - 1.0) * c1 + 2.0 * c2),
      -c1,
      -d * (d - 1.0) * c1,
  };
}

double r0_polynomial(const std::array<double, 6>& b, const std::array<double, 4>& eta) {
  const auto [g, l, r, s] = eta;
  const double g2 = g * g;
  return b[0] * l * l + b[1] * l * g2 + b[2] * g2 * g2 + b[3] * s * g2 + b[4] * r * r + b[5] * s * s;
}

Membership r0_membership(const RegionQuery& q, const R0Search& search) {
  q.check();
  if (q.d < 2)
    throw Error(ErrorKind::validation, fmt::format("d = {}: use the closed-form region for d = 1", q.d));
  if (search.lambda_points < 1)
    throw Error(ErrorKind::validation, "lambda grid needs at least one point");

  const double w = 1.0 - 1.0 / q.d;
  Membership best;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= search.lambda_points; ++k) {
    const double lambda = static_cast<double>(k) / (search.lambda_points + 1);
    const double c1 = -lambda * (q.c_rk + 1.0) / w;
    auto r = [&](double c2) {
      const auto b = r0_coefficients(q, c1, c2);
      return 4.0 * b[0] * b[5] * b[2] - b[5] * b[1] * b[1] - b[0] * b[3] * b[3];
    };
    const Quadratic p = fit_quadratic(r(-1.0), r(0.0), r(1.0));

    double c2;
    if (p.c2 < 0.0) {
      const double disc = p.c1 * p.c1 - 4.0 * p.c2 * p.c0;
      const double scale = p.c1 * p.c1 + std::abs(4.0 * p.c2 * p.c0);
      if (disc < -search.tol * scale) continue;
      c2 = -p.c1 / (2.0 * p.c2);
    } else {
      // R is unbounded above in some direction; step far enough along it.
      const double reach = 1.0 + (std::abs(p.c1) + std::abs(p.c0)) / std::max(p.c2, 1e-300);
      c2 = (p.c2 > 0.0 || p.c1 > 0.0) ? reach : -reach;
      if (p.c2 == 0.0 && p.c1 == 0.0) c2 = 0.0;
      if (eval(p, c2) < 0.0) continue;
    }
    const auto b = r0_coefficients(q, c1, c2);
    const double margin = b[2] - b[1] * b[1] / (4.0 * b[0]) - b[3] * b[3] / (4.0 * b[5]);
    if (margin > best_margin) {
      best_margin = margin;
      best.member = true;
      best.witness = Witness{c1, c2, std::nullopt, lambda};
    }
  }
  return best;
}

std::array<double, 7> r1_a_coefficients(double alpha, double beta, double c) {
  const double a = alpha, b = beta;
  return {
      (b - 1.0) * (2.0 * c * a * a * b - 3.0 * c * a * a + 2.0 * a * b * b -
                   2.0 * (5.0 * c + 3.0) * a * b + (15.0 * c + 4.0) * a + 2.0 * b * b * b -
                   14.0 * b * b + 4.0 * (3.0 * c + 7.0) * b - 2.0 * (9.0 * c + 8.0)),
      (b - 1.0) * (4.0 * c * a * a + (8.0 * c + 7.0) * a * b - (32.0 * c + 9.0) * a + 12.0 * b * b -
                   2.0 * (8.0 * c + 25.0) * b + 6.0 * (8.0 * c + 7.0)),
      c * a * a + 2.0 * a * b - (5.0 * c + 2.0) * a + 4.0 * (c + 1.0) * b * b -
          2.0 * (5.0 * c + 8.0) * b + 12.0 * (c + 1.0),
      2.0 * (b - 1.0) * (2.0 * (4.0 * c + 1.0) * a + 9.0 * b - (16.0 * c + 13.0)),
      2.0 * (2.0 * c + 1.0) * a + 4.0 * (2.0 * c + 3.0) * b - 16.0 * (c + 1.0),
      2.0 - a,
      2.0 * (c + 1.0),
  };
}

std::array<double, 7> r1_coefficients(double alpha, double beta, double c_rk, double c1, double c2,
                                      double c3) {
  const auto a = r1_a_coefficients(alpha, beta, c_rk);
  const double s = alpha + 2.0 * beta;
  return {
      a[0] + (s - 7.0) * c3,
      a[1] + (s - 6.0) * c2 + 5.0 * c3,
      a[2] + c2,
      a[3] + (s - 5.0) * c1 + 3.0 * c2,
      a[4] + 2.0 * c1,
      a[5] + c1,
      a[6],
  };
}

double r1_polynomial(const std::array<double, 7>& b, const std::array<double, 3>& xi) {
  const auto [x1, x2, x3] = xi;
  const double x1s = x1 * x1;
  return b[0] * x1s * x1s * x1s + b[1] * x1s * x1s * x2 + b[2] * x1s * x1 * x3 +
         b[3] * x1s * x2 * x2 + b[4] * x1 * x2 * x3 + b[5] * x2 * x2 * x2 + b[6] * x3 * x3;
}

namespace {

double r1_discriminant(double alpha, double beta, double c_rk, double c2) {
  const double c1 = -r1_a_coefficients(alpha, beta, c_rk)[5];
  const auto b = r1_coefficients(alpha, beta, c_rk, c1, c2, 0.0);
  return 4.0 * b[3] * b[6] - b[4] * b[4];
}

}  // namespace

double r1_c2_star(double alpha, double beta, double c_rk) {
  const double d0 = r1_discriminant(alpha, beta, c_rk, 0.0);
  const double d1 = r1_discriminant(alpha, beta, c_rk, 1.0);
  return -d0 / (d1 - d0);
}

bool r1_gate(double alpha, double beta) {
  const double z = alpha - 2.0 * beta;
  return -2.0 <= z && z <= 1.0;
}

Membership r1_membership(double alpha, double beta, const R1Search& search) {
  check_positive(alpha, "alpha");
  check_positive(beta, "beta");
  if (search.c2_points < 1 || !(search.c2_span > 0.0))
    throw Error(ErrorKind::validation, "c2 search needs a positive span and at least one point");
  if (!r1_gate(alpha, beta)) return {};

  constexpr double c_rk = 1.0;
  const double c1 = -r1_a_coefficients(alpha, beta, c_rk)[5];
  const double c2_star = r1_c2_star(alpha, beta, c_rk);

  Membership best;
  double best_margin = -std::numeric_limits<double>::infinity();
  for (int k = 1; k <= search.c2_points; ++k) {
    const double c2 = c2_star + search.c2_span * k / search.c2_points;
    const double disc = r1_discriminant(alpha, beta, c_rk, c2);
    if (!(disc > 0.0)) continue;
    auto e = [&](double c3) {
      const auto b = r1_coefficients(alpha, beta, c_rk, c1, c2, c3);
      return b[0] * disc - b[1] * b[1] * b[6] - b[2] * b[2] * b[3] + b[1] * b[2] * b[4];
    };
    const double em = e(-1.0), e0 = e(0.0), ep = e(1.0);
    const Quadratic p = fit_quadratic(em, e0, ep);
    if (!(p.c2 < 0.0)) continue;
    const double c3 = -p.c1 / (2.0 * p.c2);
    const double value = eval(p, c3);
    const double scale = std::max({std::abs(em), std::abs(e0), std::abs(ep)});
    if (value < -search.tol * scale) continue;
    const double margin = value / disc;
    if (margin > best_margin) {
      best_margin = margin;
      best.member = true;
      best.witness = Witness{c1, c2, c3, std::nullopt};
    }
  }
  if (best.member) return best;

  // Degenerate case: 4b4b7 = b5² at c2*, with c3 fixed by 2b2b7 = b3b5.
  const auto b0 = r1_coefficients(alpha, beta, c_rk, c1, c2_star, 0.0);
  const double c3 = (b0[2] * b0[4] / (2.0 * b0[6]) - b0[1]) / 5.0;
  const auto b = r1_coefficients(alpha, beta, c_rk, c1, c2_star, c3);
  if (quad_form_nonneg(b[0], b[1], b[2], b[3], b[4], b[6]))
    return {true, Witness{c1, c2_star, c3, std::nullopt}};
  return {};
}

bool quad_form_nonneg(double A, double B, double C, double D, double E, double F) {
  if (!(F > 0.0))
    throw Error(ErrorKind::validation, fmt::format("quadratic form needs F > 0, got {}", F));
  constexpr double tol = 1e-12;
  const double disc = 4.0 * D * F - E * E;
  const double disc_scale = std::max(std::abs(4.0 * D * F), E * E);
  if (disc > tol * disc_scale) {
    const double terms[] = {A * disc, -B * B * F, -C * C * D, B * C * E};
    double value = 0.0, scale = 0.0;
    for (double t : terms) {
      value += t;
      scale += std::abs(t);
    }
    return value >= -tol * scale;
  }
  if (disc < -tol * disc_scale) return false;
  const double lin = 2.0 * B * F - C * E;
  if (std::abs(lin) > tol * (std::abs(2.0 * B * F) + std::abs(C * E))) return false;
  return 4.0 * A * F - C * C >= -tol * (std::abs(4.0 * A * F) + C * C);
}

std::vector<double> AxisRange::points() const {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(step > 0.0) || hi < lo)
    throw Error(ErrorKind::validation,
                fmt::format("invalid range [{}, {}] with step {}", lo, hi, step));
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-6)) + 1;
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + i * step;
  return out;
}

RegionMask emit_mask(RegionFamily family, const AxisRange& alpha, const AxisRange& beta, int d,
                     double c_rk, unsigned threads) {
  RegionMask mask;
  mask.alphas = alpha.points();
  mask.betas = beta.points();
  const std::size_t na = mask.alphas.size(), nb = mask.betas.size();
  if (family == RegionFamily::pme1 && c_rk != 1.0)
    throw Error(ErrorKind::validation,
                fmt::format("the first-order region is computed for c_rk = 1 only, got {}", c_rk));
  RegionQuery{1.0, 1.0, d, c_rk}.check();

  std::vector<Membership> cells(na * nb);
  auto evaluate_cell = [&](std::size_t idx) {
    const double a = mask.alphas[idx / nb], b = mask.betas[idx % nb];
    if (family == RegionFamily::pme1) {
      cells[idx] = r1_membership(a, b);
    } else if (d == 1) {
      cells[idx].member = r0_1d({a, b, d, c_rk});
    } else {
      cells[idx] = r0_membership({a, b, d, c_rk});
    }
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t idx = next++; idx < cells.size(); idx = next++) {
      if (failed) return;
      try {
        evaluate_cell(idx);
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  mask.member.assign(na, std::vector<bool>(nb, false));
  mask.witnesses.assign(na, std::vector<std::optional<Witness>>(nb));
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) {
      mask.member[i][j] = cells[i * nb + j].member;
      mask.witnesses[i][j] = cells[i * nb + j].witness;
    }
  return mask;
}

void write_csv(std::ostream& out, const RegionMask& mask) {
  out << "alpha,beta,member,witness_c1,witness_c2,witness_c3\n";
  for (std::size_t i = 0; i < mask.alphas.size(); ++i)
    for (std::size_t j = 0; j < mask.betas.size(); ++j) {
      out << fmt::format("{:.17g},{:.17g},{:d}", mask.alphas[i], mask.betas[j],
                         mask.member[i][j] ? 1 : 0);
      const auto& w = mask.witnesses[i][j];
      if (mask.member[i][j] && w) {
        out << fmt::format(",{:.17g},{:.17g},", w->c1, w->c2);
        if (w->c3) out << fmt::format("{:.17g}", *w->c3);
      } else {
        out << ",,,";
      }
      out << '\n';
    }
}

}  // namespace erk
