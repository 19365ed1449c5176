#include <doctest.h>

#include <random>

#include "erk/error.hpp"
#include "erk/tableau.hpp"

using namespace erk;

TEST_CASE("c_rk of the named tableaux") {
  CHECK(c_rk(tableaus::implicit_euler()) == 0.0);
  CHECK(c_rk(tableaus::explicit_euler()) == 2.0);
  CHECK(c_rk(tableaus::trapezoidal()) == 1.0);
}

TEST_CASE("validate reports violated sums") {
  CHECK(validate(tableaus::implicit_euler()).ok());

  ButcherTableau bad_b = tableaus::trapezoidal();
  bad_b.b << 0.6, 0.6;
  const auto r1 = validate(bad_b);
  REQUIRE(r1.violations.size() == 1);
  CHECK(r1.violations[0] == "Σb=1.2");

  ButcherTableau bad_row;
  bad_row.a.resize(2, 2);
  bad_row.a << 0.0, 0.0, 0.3, 0.0;
  bad_row.b = Eigen::Vector2d(0.5, 0.5);
  bad_row.c = Eigen::Vector2d(0.0, 1.0);
  const auto r2 = validate(bad_row);
  REQUIRE(r2.violations.size() == 1);
  CHECK(r2.violations[0] == "row 2: Σa=0.3≠c=1");

  try {
    c_rk(bad_row);
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
}

TEST_CASE("registry holds the four schemes") {
  const auto& reg = builtin_schemes();
  CHECK(reg.names() == std::vector<std::string>{"explicit_euler", "implicit_euler", "trapezoidal", "simpson"});

  const Scheme& ie = reg.lookup("implicit_euler");
  CHECK(ie.is_tableau());
  CHECK(ie.c_rk_effective() == 0.0);

  const Scheme& simpson = reg.lookup("simpson");
  CHECK_FALSE(simpson.is_tableau());
  CHECK(simpson.c_rk_effective() == 1.0);
  CHECK_THROWS_AS(simpson.tableau(), Error);

  try {
    reg.lookup("rk9000");
    FAIL("expected a lookup error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::lookup);
    CHECK(std::string(e.what()).find("trapezoidal") != std::string::npos);
  }
}

TEST_CASE("user tableaux can be registered") {
  SchemeRegistry reg;
  ButcherTableau midpoint;
  midpoint.a = Eigen::MatrixXd::Constant(1, 1, 0.5);
  midpoint.b = Eigen::VectorXd::Ones(1);
  midpoint.c = Eigen::VectorXd::Constant(1, 0.5);
  reg.add(Scheme::from_tableau("midpoint", midpoint));
  CHECK(reg.lookup("midpoint").c_rk_effective() == 1.0);
  CHECK(reg.names().size() == 5);

  ButcherTableau broken = midpoint;
  broken.c(0) = 0.7;
  CHECK_THROWS_AS(Scheme::from_tableau("broken", broken), Error);
}

TEST_CASE("second-order conditions give c_rk = 1") {
  // Two-stage explicit family: c2 = θ, b = (1 - 1/(2θ), 1/(2θ)).
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(0.1, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double theta = dist(rng);
    ButcherTableau t;
    t.a = Eigen::MatrixXd::Zero(2, 2);
    t.a(1, 0) = theta;
    t.b = Eigen::Vector2d(1.0 - 0.5 / theta, 0.5 / theta);
    t.c = Eigen::Vector2d(0.0, theta);
    CHECK(c_rk(t) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("explicit detection") {
  CHECK(tableaus::explicit_euler().is_explicit());
  CHECK_FALSE(tableaus::implicit_euler().is_explicit());
  CHECK_FALSE(tableaus::trapezoidal().is_explicit());
}
