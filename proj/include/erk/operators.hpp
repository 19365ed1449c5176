#pragma once

#include <functional>
#include <variant>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace erk {

/// Uniform periodic cell grid on [0, length). Cell i sits at x_i = i * dx.
class Grid1D {
 public:
  /// Throws Error(validation) unless n >= 4 and length > 0.
  Grid1D(int n, double length);

  int n() const { return n_; }
  double length() const { return length_; }
  double dx() const { return dx_; }
  double x(int i) const { return i * dx_; }

  /// Cyclic index: wrap(-1) == n - 1, wrap(n) == 0.
  int wrap(int i) const { return ((i % n_) + n_) % n_; }

 private:
  int n_;
  double length_;
  double dx_;
};

/// Cell values of one or two species, stored species-major:
/// entry (s, i) lives at flat index s * n + i.
class StateField {
 public:
  StateField() = default;
  StateField(int species, int n);
  StateField(int species, int n, Eigen::VectorXd values);

  static StateField constant(int species, int n, double value);

  int species() const { return species_; }
  int n() const { return n_; }
  Eigen::Index size() const { return values_.size(); }

  double& operator()(int s, int i) { return values_[s * n_ + i]; }
  double operator()(int s, int i) const { return values_[s * n_ + i]; }

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  auto species_values(int s) const { return values_.segment(s * n_, n_); }
  auto species_values(int s) { return values_.segment(s * n_, n_); }

  StateField with_values(Eigen::VectorXd v) const { return {species_, n_, std::move(v)}; }

  /// Cyclic shift of every species by `offset` cells: out(s, i + offset) = in(s, i).
  StateField shifted(int offset) const;

 private:
  int species_ = 1;
  int n_ = 0;
  Eigen::VectorXd values_;
};

/// ∂_t u = Δ(u^β).
struct PorousMedium {
  double beta;
};

/// ∂_t u = (a(u) u_x)_x with interface coefficient a((u_i + u_{i+1})/2).
struct ScalarDiffusion {
  std::function<double(double)> a;
  std::function<double(double)> da;
};

/// ∂_t u_1 = ρ_1 Δu_1 + μ(u_2 - u_1), ∂_t u_2 = ρ_2 Δu_2 + μ(u_1 - u_2).
struct LinearSystem {
  double rho1;
  double rho2;
  double mu;
};

/// ∂_t u = -(u (log u)_xx)_xx.
struct Dlss {};

using Family = std::variant<PorousMedium, ScalarDiffusion, LinearSystem, Dlss>;

/// An equation family on a grid. Operators follow the convention
/// ∂_t u + A[u] = 0, so A is the negated right-hand side.
class ProblemSpec {
 public:
  /// Throws Error(validation) on β <= 0, negative ρ/μ, or a missing a(·).
  ProblemSpec(Family family, Grid1D grid);

  const Family& family() const { return family_; }
  const Grid1D& grid() const { return grid_; }
  int species() const;
  bool is_linear() const;

  StateField make_state() const { return {species(), grid_.n()}; }

 private:
  Family family_;
  Grid1D grid_;
};

/// A[u]. Throws DomainError for inadmissible entries (non-finite values,
/// u <= 0 for DLSS, u < 0 for non-integer β, u = 0 for β < 1).
StateField apply(const ProblemSpec& p, const StateField& u);

/// DA[u](w), the exact Jacobian-vector product of apply() at u.
StateField deriv_apply(const ProblemSpec& p, const StateField& u, const StateField& w);

/// Exact Jacobian of apply() at u: cyclic banded (bandwidth 1, or 2 for DLSS),
/// 2x2 block structure for LinearSystem.
Eigen::SparseMatrix<double> jacobian(const ProblemSpec& p, const StateField& u);

/// Periodic second difference (f_{i+1} - 2f_i + f_{i-1}) / dx².
Eigen::VectorXd second_difference(const Grid1D& grid, const Eigen::VectorXd& f);
/// Periodic forward difference (f_{i+1} - f_i) / dx.
Eigen::VectorXd forward_difference(const Grid1D& grid, const Eigen::VectorXd& f);
/// Periodic central difference (f_{i+1} - f_{i-1}) / (2 dx).
Eigen::VectorXd central_difference(const Grid1D& grid, const Eigen::VectorXd& f);

}  // namespace erk
