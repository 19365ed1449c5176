#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <vector>

namespace erk {

struct RegionQuery {
  double alpha;
  double beta;
  int d = 1;
  double c_rk = 1.0;

  /// Throws Error(validation) unless alpha, beta > 0, d >= 1, c_rk ∈ {0, 1, 2}.
  void check() const;
};

struct Witness {
  double c1;
  double c2;
  std::optional<double> c3;
  std::optional<double> lambda;
};

struct Membership {
  bool member = false;
  std::optional<Witness> witness;
};

/// Closed-form zeroth-order region in one dimension (strict inequalities).
bool r0_1d(const RegionQuery& q);

/// Coefficients b1..b6 of Q(η) = b1 ηL² + b2 ηL ηG² + b3 ηG⁴ + b4 ηS ηG² + b5 ηR² + b6 ηS².
std::array<double, 6> r0_coefficients(const RegionQuery& q, double c1, double c2);

/// Q(η) at η = (ηG, ηL, ηR, ηS).
double r0_polynomial(const std::array<double, 6>& b, const std::array<double, 4>& eta);

struct R0Search {
  /// Interior λ grid points k / (lambda_points + 1).
  int lambda_points = 1999;
  double tol = 1e-12;
};

/// Membership for d >= 2 by scanning λ and maximising R(c₂) over c₂. The
/// witness is the scanned (λ, c₂) with the largest normalised margin
/// b3 - b2²/(4b1) - b4²/(4b6). Throws Error(validation) for d < 2.
Membership r0_membership(const RegionQuery& q, const R0Search& search = {});

/// a1..a7 of the first-order polynomial for given (α, β, C_RK).
std::array<double, 7> r1_a_coefficients(double alpha, double beta, double c_rk);

/// b1..b7 with c1 = -a6 unless given explicitly.
std::array<double, 7> r1_coefficients(double alpha, double beta, double c_rk, double c1, double c2,
                                      double c3);

/// P(ξ) = b1ξ1⁶ + b2ξ1⁴ξ2 + b3ξ1³ξ3 + b4ξ1²ξ2² + b5ξ1ξ2ξ3 + b6ξ2³ + b7ξ3².
double r1_polynomial(const std::array<double, 7>& b, const std::array<double, 3>& xi);

/// The c₂ at which 4b4b7 - b5² changes sign (with c1 = -a6).
double r1_c2_star(double alpha, double beta, double c_rk = 1.0);

/// Whether G'(0) <= 0 for the first-order entropy: -2 <= α - 2β <= 1.
bool r1_gate(double alpha, double beta);

struct R1Search {
  double c2_span = 100.0;
  int c2_points = 4001;
  double tol = 1e-12;
};

/// First-order membership (C_RK = 1). The witness maximises the case-(i)
/// value at the c₃ vertex divided by 4b4b7 - b5².
Membership r1_membership(double alpha, double beta, const R1Search& search = {});

/// Nonnegativity on ℝ² of A + Bx + Cy + Dx² + Exy + Fy². Throws
/// Error(validation) unless F > 0.
bool quad_form_nonneg(double A, double B, double C, double D, double E, double F);

enum class RegionFamily { pme0, pme1 };

struct AxisRange {
  double lo;
  double hi;
  double step;
  /// lo, lo + step, ... up to hi (inclusive within step/1e6).
  std::vector<double> points() const;
};

struct RegionMask {
  std::vector<double> alphas;
  std::vector<double> betas;
  /// member[i][j] for (alphas[i], betas[j]).
  std::vector<std::vector<bool>> member;
  std::vector<std::vector<std::optional<Witness>>> witnesses;
};

/// Evaluates the family's membership over the grid on up to `threads` workers
/// (0 = hardware concurrency). d = 1 for pme0 uses the closed form.
RegionMask emit_mask(RegionFamily family, const AxisRange& alpha, const AxisRange& beta, int d,
                     double c_rk, unsigned threads = 0);

/// "alpha,beta,member,witness_c1,witness_c2,witness_c3", alpha-major rows.
void write_csv(std::ostream& out, const RegionMask& mask);

}  // namespace erk
