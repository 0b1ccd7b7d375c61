#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <vector>

#include "growthdyn/errors.hpp"
#include "growthdyn/linear_system.hpp"

using namespace growthdyn;

namespace {

std::vector<LinearSystem> catalog_systems() {
  return {
      LinearSystem::scalar(catalog::constant(-1.0)),
      LinearSystem::scalar(catalog::inverse_linear()),
      LinearSystem::scalar(catalog::abs_linear(2.0)),
      LinearSystem::scalar(catalog::damped_sine()),
      LinearSystem::scalar(catalog::cosine(0.3, 1.0, 1.5)),
      LinearSystem::diagonal({catalog::constant(-1.0), catalog::inverse_linear()}),
  };
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Rotation-conjugated constant system: A = R diag(-1, 0.5) R^T.
LinearSystem rotated_constant() {
  const double c = std::cos(0.3), s = std::sin(0.3);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  Eigen::Matrix2d D = Eigen::Vector2d(-1.0, 0.5).asDiagonal();
  const Eigen::MatrixXd A = R * D * R.transpose();
  return LinearSystem::matrix(2, [A](double) { return A; });
}

}  // namespace

TEST_CASE("closed-form reference values") {
  const EvolutionOperator poly(LinearSystem::scalar(catalog::inverse_linear()));
  CHECK(poly.evaluate(1.0, 0.0)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));
  // p(-3)/p(-1) = (1/4)/(1/2)
  CHECK(poly.evaluate(-3.0, -1.0)(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  const EvolutionOperator quad(LinearSystem::scalar(catalog::abs_linear(2.0)));
  CHECK(quad.log_norm(3.0, 1.0) == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(quad.log_norm(1.0, -2.0) == doctest::Approx(1.0 + 4.0).epsilon(1e-14));
  // Far beyond double range, still finite in log space.
  CHECK(quad.log_norm(100.0, 0.0) == doctest::Approx(1e4));
}

TEST_CASE("numeric oracles agree with the closed forms") {
  // Independent oracle for 2|t|: integral of 2u from 1 to 3 by composite Simpson at h = 1e-4.
  double simpson = 0.0;
  const int n = 20000;
  const double a = 1.0, b = 3.0, h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    simpson += w * 2.0 * std::abs(a + i * h);
  }
  simpson *= h / 3.0;
  CHECK(simpson == doctest::Approx(8.0).epsilon(1e-12));

  for (const auto& sys : catalog_systems()) {
    const EvolutionOperator exact(sys), rk(sys, EvolutionMethod::RungeKutta), gl(sys, EvolutionMethod::Quadrature);
    for (auto [t, s] : std::vector<std::pair<double, double>>{{3.0, -2.0}, {-7.0, 5.0}, {12.0, -8.0}, {0.5, 0.0}}) {
      CHECK(std::abs(std::expm1(rk.log_norm(t, s) - exact.log_norm(t, s))) <= 1e-6);
      CHECK(std::abs(std::expm1(gl.log_norm(t, s) - exact.log_norm(t, s))) <= 1e-6);
    }
  }
}

TEST_CASE("identity at t = s") {
  for (const auto& sys : catalog_systems()) {
    const EvolutionOperator exact(sys), rk(sys, EvolutionMethod::RungeKutta);
    for (double s : {-4.0, 0.0, 2.5}) {
      const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(sys.dimension(), sys.dimension());
      CHECK((exact.evaluate(s, s) - I).norm() == 0.0);
      CHECK((rk.evaluate(s, s) - I).norm() <= 1e-10);
    }
  }
  const EvolutionOperator m(rotated_constant());
  CHECK((m.evaluate(1.0, 1.0) - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-10);
}

TEST_CASE("cocycle property on random triples") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-6.0, 6.0);
  for (const auto& sys : catalog_systems()) {
    const EvolutionOperator phi(sys);
    for (int i = 0; i < 50; ++i) {
      const double t = u(rng), s = u(rng), r = u(rng);
      const Eigen::MatrixXd lhs = phi.evaluate(t, s) * phi.evaluate(s, r), rhs = phi.evaluate(t, r);
      CHECK((lhs - rhs).norm() <= 1e-6 * rhs.norm());
    }
  }
  // General matrix path against the exact exponential of a constant matrix.
  const EvolutionOperator m(rotated_constant());
  const double c = std::cos(0.3), s = std::sin(0.3);
  Eigen::Matrix2d R;
  R << c, -s, s, c;
  for (double d : {-2.0, 0.7, 3.0}) {
    Eigen::Matrix2d E = Eigen::Vector2d(std::exp(-d), std::exp(0.5 * d)).asDiagonal();
    const Eigen::MatrixXd exact = R * E * R.transpose();
    CHECK((m.evaluate(1.0 + d, 1.0) - exact).norm() <= 1e-8 * exact.norm());
  }
}

TEST_CASE("translation identity") {
  // Phi_2(1,0) = Phi(3,2) = 4/3 for 1/(1+|t|)
  const auto poly = LinearSystem::scalar(catalog::inverse_linear());
  CHECK(EvolutionOperator(translate_system(poly, 2.0)).evaluate(1.0, 0.0)(0, 0) ==
        doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (const auto& sys : catalog_systems()) {
    const EvolutionOperator base(sys), base_rk(sys, EvolutionMethod::RungeKutta);
    for (int i = 0; i < 50; ++i) {
      const double t = u(rng), s = u(rng), tau = u(rng);
      const auto moved = translate_system(sys, tau);
      const double want = base.log_norm(t + tau, s + tau);
      CHECK(rel(EvolutionOperator(moved).log_norm(t, s), want) <= 1e-8);
      if (i % 10 == 0) {
        CHECK(std::abs(std::expm1(EvolutionOperator(moved, EvolutionMethod::RungeKutta).log_norm(t, s) - want)) <=
              1e-5);
      }
    }
  }
  const auto zero_shift = translate_system(poly, 0.0);
  for (double t : {-3.0, 0.0, 4.0}) CHECK(zero_shift.coefficient(t)(0, 0) == poly.coefficient(t)(0, 0));
}

TEST_CASE("shift identity for scalar, diagonal and matrix systems") {
  std::vector<LinearSystem> systems = catalog_systems();
  systems.push_back(rotated_constant());
  for (const auto& sys : systems) {
    for (const auto& rate : {GrowthRate::exponential(), GrowthRate::polynomial(), GrowthRate::subexponential(0.5)}) {
      for (double gamma : {-0.75, 1.0}) {
        const EvolutionOperator base(sys), shifted(shift_system(sys, rate, gamma));
        for (auto [t, s] : std::vector<std::pair<double, double>>{{2.0, -1.0}, {-3.0, 1.5}, {4.0, 0.25}}) {
          const double want = base.log_norm(t, s) - gamma * (rate.log_eval(t) - rate.log_eval(s));
          CHECK(std::abs(shifted.log_norm(t, s) - want) <= 1e-8 * std::max(1.0, std::abs(want)));
        }
      }
    }
  }
}

TEST_CASE("shift_system special cases") {
  const auto poly = LinearSystem::scalar(catalog::inverse_linear());
  const auto same = shift_system(poly, GrowthRate::polynomial(), 0.0);
  for (double t : {-2.0, 0.0, 5.0}) CHECK(same.coefficient(t)(0, 0) == poly.coefficient(t)(0, 0));
  // a(t) - d/dt log p(t) = 0 on t > 0
  const auto flat = shift_system(poly, GrowthRate::polynomial(), 1.0);
  for (double t : {0.1, 1.0, 7.0, 300.0}) CHECK(std::abs(flat.coefficient(t)(0, 0)) <= 1e-15);
  // d/dt log p(t) = 1/(1+|t|) on t < 0 as well
  CHECK(std::abs(flat.coefficient(-1.0)(0, 0)) <= 1e-15);
  CHECK(shift_system(poly, GrowthRate::exponential(), 1.0).coefficient(1.0)(0, 0) == doctest::Approx(-0.5));
}

TEST_CASE("catalog lookup and validation") {
  CHECK(catalog::by_name("damped_sine", {}).params.at("lambda") == 1.0);
  CHECK(catalog::by_name("constant", {{"c", -2.0}}).coefficient(5.0) == -2.0);
  CHECK_THROWS_AS(catalog::by_name("no_such_entry", {}), InputError);
  CHECK_THROWS_AS(catalog::by_name("constant", {{"bogus", 1.0}}), InputError);
  CHECK(LinearSystem::diagonal({catalog::constant(1.0), catalog::constant(2.0)}).dimension() == 2);
  CHECK(catalog::cosine(0.0, 1.0, 2.0).period.value() == doctest::Approx(M_PI));
}

TEST_CASE("tabulated systems") {
  const auto tab = from_samples({0.0, 1.0, 2.0}, {{1.0}, {3.0}, {-1.0}});
  CHECK(tab.coefficient(0.5)(0, 0) == doctest::Approx(2.0));
  CHECK(tab.coefficient(-5.0)(0, 0) == 1.0);
  CHECK(tab.coefficient(9.0)(0, 0) == -1.0);
  // integral of the piecewise-linear interpolant on [0, 2] = 2 + 1
  CHECK(EvolutionOperator(tab).log_norm(2.0, 0.0) == doctest::Approx(3.0).epsilon(1e-9));

  const auto path = std::filesystem::temp_directory_path() / "growthdyn_table.csv";
  {
    std::ofstream f(path);
    f << "t,a11,a12,a21,a22\n0,1,0,0,2\n1,3,0,0,4\n";
  }
  const auto from_file = read_csv(path.string());
  CHECK(from_file.dimension() == 2);
  CHECK(from_file.coefficient(0.5)(1, 1) == doctest::Approx(3.0));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(read_csv("/nonexistent/table.csv"), InputError);
}

TEST_CASE("matrix integration guards") {
  const auto grow = LinearSystem::matrix(2, [](double) { return Eigen::MatrixXd::Identity(2, 2) * 50.0; });
  EvolutionOptions opts;
  opts.horizon = 100.0;
  CHECK_THROWS_AS(EvolutionOperator(grow, EvolutionMethod::RungeKutta, opts).evaluate(20.0, 0.0), OverflowError);
  CHECK_THROWS_AS(EvolutionOperator(grow).evaluate(40.0, 0.0), ParameterError);
  CHECK_THROWS_AS(EvolutionOperator(LinearSystem::scalar(catalog::constant(1.0))).log_norm(NAN, 0.0), DomainError);
}

TEST_CASE("log-norm helpers") {
  Eigen::MatrixXd m(2, 2);
  m << 3.0, 0.0, 0.0, 1.0;
  CHECK(log_norm(m) == doctest::Approx(std::log(3.0)));
  CHECK(log_norm(Eigen::MatrixXd::Zero(2, 2)) == -INFINITY);
  Eigen::VectorXd l(2);
  l << 800.0, 0.0;
  CHECK(log_norm_scaled(l, Eigen::MatrixXd::Identity(2, 2)) == doctest::Approx(800.0));
}
