#include <doctest.h>

#include <cmath>
#include <vector>

#include "growthdyn/errors.hpp"
#include "growthdyn/hull.hpp"
#include "growthdyn/paper_examples.hpp"

using namespace growthdyn;

namespace {

LinearSystem abs_t() { return LinearSystem::scalar(catalog::abs_linear(1.0)); }
// 0.2 t sin t
LinearSystem t_sin_t() { return LinearSystem::scalar(catalog::damped_sine(0.0, -0.2)); }

LimitProbeReport probe(const LinearSystem& sys, double sign, int first = 3, int last = 24) {
  return pointwise_limit_probe(OrbitProbe{sys, hull_schedule(sign, first, last)});
}

// Composite Simpson for (1/t0) int_tau^{tau+t0} |0.2 u sin u| du with the
// integrand's zeros (multiples of pi) as panel edges.
double t_sin_t_window(double tau, double t0) {
  std::vector<double> cuts{tau};
  for (double k = std::ceil(tau / M_PI); k * M_PI < tau + t0; k += 1.0) {
    if (k * M_PI > tau) cuts.push_back(k * M_PI);
  }
  cuts.push_back(tau + t0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const int n = 2000;
    const double a = cuts[i], h = (cuts[i + 1] - a) / n;
    double acc = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double u = a + j * h;
      const double w = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
      acc += w * std::abs(0.2 * u * std::sin(u));
    }
    total += acc * h / 3.0;
  }
  return total / t0;
}

}  // namespace

TEST_CASE("pointwise limits") {
  for (double sign : {1.0, -1.0}) {
    const auto poly = probe(examples::polynomial_system(), sign);
    CHECK(poly.verdict == ProbeVerdict::ConvergentTo);
    for (const auto& row : poly.limit_samples) CHECK(std::abs(row[0]) < 1e-6);

    CHECK(probe(abs_t(), sign).verdict == ProbeVerdict::DivergesPointwise);
    CHECK(probe(examples::quadratic_system(), sign).verdict == ProbeVerdict::DivergesPointwise);

    const auto c = probe(LinearSystem::scalar(catalog::constant(-0.7)), sign, 3, 12);
    CHECK(c.verdict == ProbeVerdict::ConvergentTo);
    for (const auto& row : c.limit_samples) CHECK(row[0] == -0.7);
  }
  // An oscillation that neither settles nor blows up everywhere.
  CHECK(probe(LinearSystem::scalar(catalog::cosine(0.0, 1.0, 1.0)), 1.0).verdict == ProbeVerdict::NonCauchy);
}

TEST_CASE("limit system is tabulated from the last translate") {
  const auto rep = probe(LinearSystem::scalar(catalog::constant(2.5)), 1.0, 3, 12);
  REQUIRE(rep.verdict == ProbeVerdict::ConvergentTo);
  const auto lim = rep.limit_system();
  CHECK(lim.coefficient(0.3)(0, 0) == doctest::Approx(2.5));
  CHECK(lim.coefficient(1e3)(0, 0) == doctest::Approx(2.5));
  const auto none = probe(abs_t(), 1.0);
  CHECK_THROWS(none.limit_system());
}

TEST_CASE("uniform local integrability") {
  // int_tau^{tau+1} u du = tau + 1/2
  const auto at = uniform_local_integrability(abs_t(), 1.0, {4.0, 10.0});
  CHECK(std::abs(at.windows[0].value - 4.5) <= 1e-6);
  CHECK(std::abs(at.windows[1].value - 10.5) <= 1e-6);
  const auto grow = uniform_local_integrability(abs_t(), 1.0);
  CHECK(!grow.sup_estimate.has_value());
  CHECK(grow.trend == IntegrabilityTrend::Growing);

  const auto bounded = uniform_local_integrability(LinearSystem::scalar(catalog::cosine(0.0, 0.8, 3.0)), 1.0);
  REQUIRE(bounded.sup_estimate.has_value());
  CHECK(*bounded.sup_estimate <= 0.8 + 1e-9);
  CHECK(bounded.trend == IntegrabilityTrend::Plateau);

  const double t0 = 2.0 * M_PI;
  std::vector<double> taus;
  for (int k = 0; k <= 6; ++k) taus.push_back(10.0 * M_PI * k);
  const auto osc = uniform_local_integrability(t_sin_t(), t0, taus);
  for (const auto& w : osc.windows) {
    CAPTURE(w.tau);
    CHECK(w.value == doctest::Approx(t_sin_t_window(w.tau, t0)).epsilon(1e-6));
  }
  const auto osc_default = uniform_local_integrability(t_sin_t(), t0);
  CHECK(!osc_default.sup_estimate.has_value());
  // linear growth: doubling tau doubles the windowed mean
  CHECK(osc_default.growth_exponent == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("unbounded local integrals rule out limits") {
  for (const auto& sys : {abs_t(), t_sin_t()}) {
    REQUIRE(!uniform_local_integrability(sys, 1.0).sup_estimate.has_value());
    for (double sign : {1.0, -1.0}) {
      for (auto [first, last] : std::vector<std::pair<int, int>>{{3, 12}, {3, 24}, {5, 20}}) {
        const auto v = probe(sys, sign, first, last).verdict;
        CHECK(v != ProbeVerdict::ConvergentTo);
      }
    }
  }
}

TEST_CASE("bounded solutions") {
  CHECK(bounded_solutions_probe(catalog::zero(2)).all_bounded);
  CHECK(!bounded_solutions_probe(LinearSystem::scalar(catalog::constant(-1.0))).all_bounded);
  const auto lim = probe(examples::polynomial_system(), 1.0).limit_system();
  CHECK(bounded_solutions_probe(lim).all_bounded);
}

TEST_CASE("classification") {
  SUBCASE("quadratic example") {
    ClassificationInputs in;
    in.dichotomy = examples::quadratic_dichotomy();
    const auto c = classify_limit_behavior(examples::quadratic_system(), in);
    CHECK(c.predicts(Prediction::EmptyLimitSets));
    CHECK(c.falsifications.empty());
    REQUIRE(c.forward_probe.has_value());
    CHECK(c.forward_probe->verdict == ProbeVerdict::DivergesPointwise);
    CHECK(c.backward_probe->verdict == ProbeVerdict::DivergesPointwise);
  }
  SUBCASE("polynomial example") {
    ClassificationInputs in;
    in.growth = examples::polynomial_growth();
    const auto c = classify_limit_behavior(examples::polynomial_system(), in);
    CHECK(c.predicts(Prediction::LimitEquationsAllBounded));
    CHECK(c.predicts(Prediction::NoDichotomyOnHull));
    CHECK(c.falsifications.empty());
    for (const auto& p : c.predictions) CHECK(!p.witnesses.empty());
  }
  SUBCASE("constant coefficient with a slow rate") {
    ClassificationInputs in;
    in.slow_rate_query = GrowthRate::polynomial();
    for (double c : {-1.0, 0.0, 1.0}) {
      const auto r = classify_limit_behavior(LinearSystem::scalar(catalog::constant(c)), in);
      CHECK(r.predicts(Prediction::SpectralIntervalsOnlyZeroOrInfinity));
      CHECK(r.falsifications.empty());
    }
  }
  SUBCASE("constant coefficient with a fast rate") {
    ClassificationInputs in;
    in.fast_rate_query = GrowthRate::superexponential(2.0);
    // |Phi(t,s)| = e^{t-s}
    in.growth = GrowthCertificate::make(1.0, 1.0, 0.0, GrowthRate::exponential());
    const auto r = classify_limit_behavior(LinearSystem::scalar(catalog::constant(1.0)), in);
    CHECK(r.predicts(Prediction::SpectrumCollapsesToZero));
    CHECK(r.falsifications.empty());
  }
  SUBCASE("unclassified rate") {
    ClassificationInputs in;
    in.growth = GrowthCertificate::make(1.0, 1.0, 0.0, GrowthRate::exponential().power(2.0));
    const auto r = classify_limit_behavior(catalog::zero(1), in);
    CHECK(r.unclassified_input);
    CHECK(r.falsifications.empty());
  }
  SUBCASE("certificates must hold") {
    ClassificationInputs in;
    in.dichotomy = DichotomyCertificate::make(Projector::identity(), 1.0, -1.0, std::nullopt, 0.0, std::nullopt,
                                              GrowthRate::exponential());
    CHECK_THROWS_AS(classify_limit_behavior(examples::polynomial_system(), in), ParameterError);
  }
}

TEST_CASE("slow-rate query with a fast rate makes no slow-rate prediction") {
  ClassificationInputs in;
  in.slow_rate_query = GrowthRate::superexponential(2.0);
  const auto r = classify_limit_behavior(LinearSystem::scalar(catalog::constant(1.0)), in);
  CHECK(!r.predicts(Prediction::SpectralIntervalsOnlyZeroOrInfinity));
}
