#include <doctest.h>

#include <cmath>
#include <tuple>
#include <vector>

#include "growthdyn/errors.hpp"
#include "growthdyn/paper_examples.hpp"
#include "growthdyn/spectrum.hpp"

using namespace growthdyn;

namespace {

LinearSystem constant(double c) { return LinearSystem::scalar(catalog::constant(c)); }

bool point_spectrum(const SpectrumEstimate& e, const std::vector<double>& points, double tol = 1e-2) {
  if (e.intervals.size() != points.size()) return false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& iv = e.intervals[i];
    if (!iv.lo.is_finite() || !iv.hi.is_finite()) return false;
    if (std::abs(iv.lo.value() - points[i]) > tol || std::abs(iv.hi.value() - points[i]) > tol) return false;
  }
  return true;
}

bool singleton(const SpectrumEstimate& e, const ExtendedReal& x) {
  return e.intervals.size() == 1 && e.intervals[0].lo == x && e.intervals[0].hi == x;
}

}  // namespace

TEST_CASE("extended reals") {
  CHECK(ExtendedReal::neg_infinity() < ExtendedReal(-1e300));
  CHECK(ExtendedReal(1e300) < ExtendedReal::pos_infinity());
  CHECK(ExtendedReal::pos_infinity().to_string() == "+inf");
  CHECK(ExtendedReal::neg_infinity().to_string() == "-inf");
  CHECK_THROWS_AS(ExtendedReal(NAN), DomainError);
}

TEST_CASE("Bohl exponents against closed forms") {
  const auto neg = bohl_exponents(constant(-1.0), GrowthRate::exponential());
  CHECK(neg.lower.value() == doctest::Approx(-1.0).epsilon(1e-2));
  CHECK(neg.upper.value() == doctest::Approx(-1.0).epsilon(1e-2));

  const auto poly = bohl_exponents(examples::polynomial_system(), GrowthRate::polynomial());
  CHECK(std::abs(poly.lower.value() - 1.0) <= 1e-2);
  CHECK(std::abs(poly.upper.value() - 1.0) <= 1e-2);

  const auto up = bohl_exponents(constant(1.0), GrowthRate::polynomial());
  CHECK(up.upper.is_pos_infinity());
  CHECK(bohl_exponents(constant(-1.0), GrowthRate::polynomial()).lower.is_neg_infinity());

  // Component selection on a diagonal system.
  const auto diag = LinearSystem::diagonal({catalog::constant(-1.0), catalog::constant(2.0)});
  CHECK(std::abs(bohl_exponents(diag, GrowthRate::exponential(), {}, 1).lower.value() - 2.0) <= 1e-2);
}

TEST_CASE("reference spectra") {
  CHECK(point_spectrum(estimate_spectrum(LinearSystem::diagonal({catalog::constant(-1.0), catalog::constant(2.0)}),
                                         GrowthRate::exponential()),
                       {-1.0, 2.0}));
  CHECK(point_spectrum(estimate_spectrum(examples::polynomial_system(), GrowthRate::polynomial()), {1.0}));
  CHECK(point_spectrum(estimate_spectrum(examples::quadratic_system(), GrowthRate::superexponential(2.0)), {1.0}));
  CHECK(point_spectrum(estimate_spectrum(constant(-1.0), GrowthRate::exponential()), {-1.0}));
  // Equal entries merge into one interval.
  const auto twice = estimate_spectrum(LinearSystem::diagonal({catalog::constant(0.5), catalog::constant(0.5)}),
                                       GrowthRate::exponential());
  CHECK(point_spectrum(twice, {0.5}));
}

TEST_CASE("bounded coefficients collapse under a fast rate") {
  for (double c : {-1.0, 0.0, 1.0}) {
    CAPTURE(c);
    CHECK(point_spectrum(estimate_spectrum(constant(c), GrowthRate::superexponential(2.0)), {0.0}));
  }
}

TEST_CASE("constant coefficients under the polynomial rate") {
  CHECK(singleton(estimate_spectrum(constant(1.0), GrowthRate::polynomial()), ExtendedReal::pos_infinity()));
  CHECK(singleton(estimate_spectrum(constant(-1.0), GrowthRate::polynomial()), ExtendedReal::neg_infinity()));
  CHECK(point_spectrum(estimate_spectrum(constant(0.0), GrowthRate::polynomial()), {0.0}));
  // A periodic coefficient with positive mean behaves like its mean.
  CHECK(singleton(estimate_spectrum(LinearSystem::scalar(catalog::cosine(0.5, 1.0, 1.0)), GrowthRate::polynomial()),
                  ExtendedReal::pos_infinity()));
}

TEST_CASE("structure and translation invariance") {
  const std::vector<std::pair<LinearSystem, GrowthRate>> cases{
      {examples::polynomial_system(), GrowthRate::polynomial()},
      {examples::quadratic_system(), GrowthRate::superexponential(2.0)},
      {constant(-1.0), GrowthRate::exponential()},
      {LinearSystem::diagonal({catalog::constant(-1.0), catalog::constant(2.0)}), GrowthRate::exponential()},
  };
  for (const auto& [sys, rate] : cases) {
    const auto base = estimate_spectrum(sys, rate);
    CHECK(well_formed(base, sys.dimension()));
    for (double tau : {-3.0, 2.0, 7.0}) {
      CAPTURE(tau);
      const auto moved = estimate_spectrum(translate_system(sys, tau), translate(rate, tau));
      CHECK(well_formed(moved, sys.dimension()));
      REQUIRE(moved.intervals.size() == base.intervals.size());
      for (std::size_t i = 0; i < base.intervals.size(); ++i) {
        CHECK(std::abs(moved.intervals[i].lo.value() - base.intervals[i].lo.value()) <= 5e-2);
        CHECK(std::abs(moved.intervals[i].hi.value() - base.intervals[i].hi.value()) <= 5e-2);
      }
    }
  }
}

TEST_CASE("well_formed rejects bad interval lists") {
  SpectrumEstimate e;
  e.intervals = {{ExtendedReal(1.0), ExtendedReal(2.0)}, {ExtendedReal(1.5), ExtendedReal(3.0)}};
  CHECK(!well_formed(e, 2));
  e.intervals = {{ExtendedReal(1.0), ExtendedReal(2.0)}, {ExtendedReal(3.0), ExtendedReal(4.0)}};
  CHECK(well_formed(e, 2));
  CHECK(!well_formed(e, 1));
  e.intervals = {{ExtendedReal(2.0), ExtendedReal(1.0)}};
  CHECK(!well_formed(e, 1));
}

TEST_CASE("resolvent test") {
  const auto contract = resolvent_test(constant(-1.0), GrowthRate::exponential(), 0.0);
  CHECK(contract.in_resolvent);
  REQUIRE(contract.certificate.has_value());
  CHECK(contract.certificate->projector().kind() == ProjectorKind::Identity);

  CHECK(!resolvent_test(examples::polynomial_system(), GrowthRate::polynomial(), 1.0).in_resolvent);

  const auto inf = resolvent_test(catalog::zero(1), GrowthRate::polynomial(), ExtendedReal::pos_infinity());
  CHECK(inf.in_resolvent);
  REQUIRE(inf.certificate.has_value());
  CHECK(inf.certificate->projector().kind() == ProjectorKind::Identity);
  CHECK(inf.tested_gamma > 0.0);

  // gaps vs interval points
  const auto saddle = LinearSystem::diagonal({catalog::constant(-1.0), catalog::constant(2.0)});
  for (double gamma : {-2.0, 0.5, 3.0}) {
    CAPTURE(gamma);
    const auto r = resolvent_test(saddle, GrowthRate::exponential(), gamma);
    CHECK(r.in_resolvent);
  }
  for (double gamma : {-1.0, 2.0}) CHECK(!resolvent_test(saddle, GrowthRate::exponential(), gamma).in_resolvent);
  const auto mid = resolvent_test(saddle, GrowthRate::exponential(), 0.5);
  REQUIRE(mid.certificate.has_value());
  CHECK(mid.certificate->projector().kind() == ProjectorKind::ConstantMatrix);
}

TEST_CASE("growth certificate implies finite spectrum") {
  const std::vector<std::tuple<LinearSystem, GrowthCertificate, GrowthRate>> cases{
      {examples::polynomial_system(), examples::polynomial_growth(), GrowthRate::polynomial()},
      {examples::quadratic_system(), examples::quadratic_growth(), GrowthRate::superexponential(2.0)},
      {examples::nonuniform_system(), examples::nonuniform_growth(), GrowthRate::exponential()},
  };
  for (const auto& [sys, cert, rate] : cases) {
    REQUIRE(verify_growth(sys, cert, examples::verification_grid()).pass);
    const auto e = estimate_spectrum(sys, rate);
    for (const auto& iv : e.intervals) {
      CHECK(iv.lo.is_finite());
      CHECK(iv.hi.is_finite());
    }
  }
  // a = 1 under p has no p-growth bound; its spectrum is {+inf}.
  CHECK(!verify_growth(constant(1.0), GrowthCertificate::make(10.0, 5.0, 0.0, GrowthRate::polynomial()),
                       examples::verification_grid())
             .pass);
}

TEST_CASE("capability gaps") {
  const auto m = LinearSystem::matrix(2, [](double) { return Eigen::MatrixXd::Identity(2, 2); });
  CHECK_THROWS_AS(estimate_spectrum(m, GrowthRate::exponential()), UnsupportedError);
}
