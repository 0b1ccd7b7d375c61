#include "growthdyn/paper_examples.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "growthdyn/errors.hpp"
#include "growthdyn/hull.hpp"
#include "growthdyn/report.hpp"
#include "growthdyn/spectrum.hpp"

namespace growthdyn {

namespace examples {

LinearSystem polynomial_system() { return LinearSystem::scalar(catalog::inverse_linear()); }
LinearSystem quadratic_system() { return LinearSystem::scalar(catalog::abs_linear(2.0)); }
LinearSystem nonuniform_system() { return LinearSystem::scalar(catalog::damped_sine(kLambda, kEta)); }

DichotomyCertificate polynomial_dichotomy() {
  return DichotomyCertificate::make(Projector::zero(), 1.0, std::nullopt, 1.0, std::nullopt, 0.0,
                                    GrowthRate::polynomial());
}

DichotomyCertificate quadratic_dichotomy() {
  return DichotomyCertificate::make(Projector::zero(), 1.0, std::nullopt, 1.0, std::nullopt, 0.0,
                                    GrowthRate::superexponential(2.0));
}

DichotomyCertificate nonuniform_dichotomy() {
  return DichotomyCertificate::make(Projector::identity(), std::exp(2.0 * kEta), -kLambda + kEta, std::nullopt,
                                    2.0 * kEta, std::nullopt, GrowthRate::exponential());
}

GrowthCertificate polynomial_growth() { return GrowthCertificate::make(1.0, 1.0, 0.0, GrowthRate::polynomial()); }

GrowthCertificate quadratic_growth() {
  return GrowthCertificate::make(1.0, 1.0, 0.0, GrowthRate::superexponential(2.0));
}

GrowthCertificate nonuniform_growth() {
  return GrowthCertificate::make(std::exp(2.0 * kEta), kLambda + kEta, 2.0 * kEta, GrowthRate::exponential());
}

PairGrid verification_grid() { return PairGrid::build(PairGridShape{}); }

}  // namespace examples

std::string to_string(Mutation mutation) {
  switch (mutation) {
    case Mutation::None: return "none";
    case Mutation::HalvedK: return "halved-K";
    case Mutation::FlippedAlphaSign: return "flipped-alpha-sign";
    case Mutation::WrongPropagationExponent: return "wrong-propagation-exponent";
  }
  return "?";
}

bool SuiteResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const SuiteCheck& c) { return c.pass; });
}

std::vector<std::string> SuiteResult::failed() const {
  std::vector<std::string> out;
  for (const auto& c : checks) {
    if (!c.pass) out.push_back(c.name);
  }
  return out;
}

namespace {

struct Example {
  std::string tag;
  LinearSystem system;
  DichotomyCertificate dichotomy;
  GrowthCertificate growth;
};

// Restores the propagation factor when the mutated suite is done.
class FactorGuard {
 public:
  explicit FactorGuard(double value) : saved_(detail::propagation_factor()) { detail::propagation_factor() = value; }
  ~FactorGuard() { detail::propagation_factor() = saved_; }
  FactorGuard(const FactorGuard&) = delete;
  FactorGuard& operator=(const FactorGuard&) = delete;

 private:
  double saved_;
};

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

void run_check(SuiteResult& out, const std::string& name, const std::function<bool(Json&)>& body) {
  SuiteCheck check;
  check.name = name;
  try {
    check.pass = body(check.detail);
  } catch (const std::exception& e) {
    check.pass = false;
    check.detail["error"] = e.what();
  }
  out.checks.push_back(std::move(check));
}

bool single_interval_at(const SpectrumEstimate& est, double at, double tol) {
  return est.intervals.size() == 1 && est.intervals[0].lo.is_finite() && est.intervals[0].hi.is_finite() &&
         std::abs(est.intervals[0].lo.value() - at) <= tol && std::abs(est.intervals[0].hi.value() - at) <= tol;
}

}  // namespace

SuiteResult paper_examples_suite(Mutation mutation) {
  FactorGuard guard(mutation == Mutation::WrongPropagationExponent ? 2.0 : 3.0);
  const PairGrid grid = examples::verification_grid();
  SuiteResult out;

  const std::vector<Example> ex{
      {"ex1", examples::polynomial_system(), examples::polynomial_dichotomy(), examples::polynomial_growth()},
      {"ex2", examples::quadratic_system(), examples::quadratic_dichotomy(), examples::quadratic_growth()},
      {"ex3", examples::nonuniform_system(), examples::nonuniform_dichotomy(), examples::nonuniform_growth()},
  };

  // Certificates.
  for (const auto& e : ex) {
    run_check(out, e.tag + ".dichotomy.verify", [&](Json& d) {
      if (e.tag != "ex3" || mutation == Mutation::None || mutation == Mutation::WrongPropagationExponent) {
        const auto rep = verify_dichotomy(e.system, e.dichotomy, grid);
        d = to_json(rep);
        return rep.pass;
      }
      // Corrupted constants: the certificate is rebuilt from raw numbers, so
      // both the definition's sign rules and the margin oracle get a say.
      double K = std::exp(2.0 * examples::kEta);
      double alpha = -examples::kLambda + examples::kEta;
      if (mutation == Mutation::HalvedK) K *= 0.5;
      if (mutation == Mutation::FlippedAlphaSign) alpha = -alpha;
      const auto raw = check_dichotomy_bounds(e.system, Projector::identity(), std::log(K), alpha, 0.0,
                                              2.0 * examples::kEta, 0.0, GrowthRate::exponential(), grid);
      d["raw_margin"] = to_json(raw);
      d["mutation"] = to_string(mutation);
      try {
        const auto cert = DichotomyCertificate::make(Projector::identity(), K, alpha, std::nullopt,
                                                     2.0 * examples::kEta, std::nullopt, GrowthRate::exponential());
        const auto rep = verify_dichotomy(e.system, cert, grid);
        d["verification"] = to_json(rep);
        return rep.pass;
      } catch (const ParameterError& err) {
        d["invalid_certificate"] = err.what();
        return false;
      }
    });
  }

  run_check(out, "ex3.dichotomy.negative-control", [&](Json& d) {
    // K = 1 must be rejected by the margin oracle.
    const auto cert = DichotomyCertificate::make(Projector::identity(), 1.0, -examples::kLambda + examples::kEta,
                                                 std::nullopt, 2.0 * examples::kEta, std::nullopt,
                                                 GrowthRate::exponential());
    const auto rep = verify_dichotomy(ex[2].system, cert, grid);
    d = to_json(rep);
    return !rep.pass && rep.worst_margin < 0.0;
  });

  for (const auto& e : ex) {
    run_check(out, e.tag + ".growth.verify", [&](Json& d) {
      const auto rep = verify_growth(e.system, e.growth, grid);
      d = to_json(rep);
      return rep.pass;
    });
  }

  // Propagation: constants against an independent evaluation, then the
  // propagated certificate on the translated system.
  for (const auto& e : ex) {
    run_check(out, e.tag + ".propagation", [&](Json& d) {
      bool ok = true;
      d = Json::array();
      for (double tau : {-3.0, 0.0, 3.0}) {
        const auto prop = propagate_dichotomy(e.dichotomy, tau);
        double expected = e.dichotomy.log_K();
        if (e.tag == "ex3") expected = 2.0 * examples::kEta + 6.0 * std::abs(tau) * examples::kEta;
        const bool constant_ok = std::abs(prop.log_K() - expected) <= 1e-12;
        const auto rep = verify_dichotomy(translate_system(e.system, tau), prop, grid);
        ok = ok && constant_ok && rep.pass;
        d.push_back({{"tau", tau},
                     {"log_K", prop.log_K()},
                     {"expected_log_K", expected},
                     {"constant_ok", constant_ok},
                     {"verification", to_json(rep)}});
      }
      return ok;
    });
  }

  run_check(out, "ex3.growth-propagation", [&](Json& d) {
    bool ok = true;
    d = Json::array();
    const double eps = 2.0 * examples::kEta;
    for (double tau : {-3.0, 0.0, 3.0}) {
      const auto prop = propagate_growth(ex[2].growth, tau);
      // log mu(tau) = tau for exp, so sgn(tau) * tau = |tau|.
      const double expected = eps + 3.0 * eps * std::abs(tau);
      const bool constant_ok = std::abs(prop.log_L() - expected) <= 1e-12 && sgn(tau) * tau == std::abs(tau);
      const auto rep = verify_growth(translate_system(ex[2].system, tau), prop, grid);
      ok = ok && constant_ok && rep.pass;
      d.push_back({{"tau", tau}, {"log_L", prop.log_L()}, {"expected_log_L", expected}, {"verification", to_json(rep)}});
    }
    return ok;
  });

  // Spectra under each example's own rate.
  run_check(out, "ex1.spectrum", [&](Json& d) {
    const auto est = estimate_spectrum(ex[0].system, GrowthRate::polynomial());
    d = to_json(est);
    return single_interval_at(est, 1.0, 1e-2);
  });
  run_check(out, "ex2.spectrum", [&](Json& d) {
    const auto est = estimate_spectrum(ex[1].system, GrowthRate::superexponential(2.0));
    d = to_json(est);
    return single_interval_at(est, 1.0, 1e-2);
  });
  run_check(out, "ex3.spectrum", [&](Json& d) {
    // The oscillating part moves the Bohl-type bounds by at most eta around -lambda.
    const auto est = estimate_spectrum(ex[2].system, GrowthRate::exponential());
    d = to_json(est);
    if (est.intervals.size() != 1) return false;
    const auto& iv = est.intervals[0];
    const double lo_limit = -examples::kLambda - 2.0 * examples::kEta;
    const double hi_limit = -examples::kLambda + 2.0 * examples::kEta;
    return iv.lo.is_finite() && iv.hi.is_finite() && iv.lo.value() <= -examples::kLambda &&
           iv.hi.value() >= -examples::kLambda && iv.lo.value() >= lo_limit && iv.hi.value() <= hi_limit;
  });

  // Hull probes.
  auto probe = [](const LinearSystem& sys, double sign) {
    return pointwise_limit_probe(OrbitProbe{sys, hull_schedule(sign)});
  };
  run_check(out, "ex1.hull.probe", [&](Json& d) {
    bool ok = true;
    for (double sign : {1.0, -1.0}) {
      const auto rep = probe(ex[0].system, sign);
      d[sign > 0 ? "forward" : "backward"] = to_json(rep);
      double sup = 0.0;
      for (const auto& row : rep.limit_samples) sup = std::max(sup, std::abs(row[0]));
      ok = ok && rep.verdict == ProbeVerdict::ConvergentTo && sup < 1e-6;
    }
    const auto bounded = bounded_solutions_probe(probe(ex[0].system, 1.0).limit_system());
    d["limit_all_bounded"] = bounded.all_bounded;
    return ok && bounded.all_bounded;
  });
  run_check(out, "ex2.hull.probe", [&](Json& d) {
    bool ok = true;
    for (double sign : {1.0, -1.0}) {
      const auto rep = probe(ex[1].system, sign);
      d[sign > 0 ? "forward" : "backward"] = to_json(rep);
      ok = ok && rep.verdict == ProbeVerdict::DivergesPointwise;
    }
    return ok;
  });
  run_check(out, "ex3.hull.probe", [&](Json& d) {
    const auto uli = uniform_local_integrability(ex[2].system, 1.0);
    d["integrability"] = to_json(uli);
    bool ok = !uli.sup_estimate.has_value();
    for (double sign : {1.0, -1.0}) {
      const auto rep = probe(ex[2].system, sign);
      d[sign > 0 ? "forward" : "backward"] = to_json(rep);
      ok = ok && rep.verdict != ProbeVerdict::ConvergentTo;
    }
    return ok;
  });

  // Classifications.
  run_check(out, "ex1.hull.classify", [&](Json& d) {
    ClassificationInputs in;
    in.dichotomy = ex[0].dichotomy;
    in.growth = ex[0].growth;
    const auto c = classify_limit_behavior(ex[0].system, in);
    d = to_json(c);
    return c.falsifications.empty() && c.predicts(Prediction::LimitEquationsAllBounded) &&
           c.predicts(Prediction::NoDichotomyOnHull);
  });
  run_check(out, "ex2.hull.classify", [&](Json& d) {
    ClassificationInputs in;
    in.dichotomy = ex[1].dichotomy;
    in.growth = ex[1].growth;
    const auto c = classify_limit_behavior(ex[1].system, in);
    d = to_json(c);
    return c.falsifications.empty() && c.predicts(Prediction::EmptyLimitSets);
  });
  run_check(out, "ex3.hull.classify", [&](Json& d) {
    ClassificationInputs in;
    in.dichotomy = ex[2].dichotomy;
    in.growth = ex[2].growth;
    const auto c = classify_limit_behavior(ex[2].system, in);
    d = to_json(c);
    return c.falsifications.empty() && c.predicts(Prediction::EmptyLimitSets);
  });

  return out;
}

}  // namespace growthdyn
