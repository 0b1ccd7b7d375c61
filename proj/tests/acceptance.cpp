// Acceptance battery: one line per criterion, pinned tolerances, exit status 0
// only if every criterion holds.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "growthdyn/dichotomy.hpp"
#include "growthdyn/growth_rate.hpp"
#include "growthdyn/hull.hpp"
#include "growthdyn/linear_system.hpp"
#include "growthdyn/paper_examples.hpp"
#include "growthdyn/spectrum.hpp"

using namespace growthdyn;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " FAILED(" << what << ")";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " exception: " << e.what();
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (budget_seconds > 0.0 && elapsed > budget_seconds) {
    o.pass = false;
    o.detail << " over budget (" << budget_seconds << " s)";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %d. %s (%.2f s):%s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), elapsed, o.detail.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

bool near(const ExtendedReal& x, double target, double tol) {
  return x.is_finite() && std::abs(x.value() - target) <= tol;
}

// Expected spectrum as a sorted list of points.
bool spectrum_is(const SpectrumEstimate& est, const std::vector<double>& points, double tol) {
  if (est.intervals.size() != points.size()) return false;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!near(est.intervals[i].lo, points[i], tol) || !near(est.intervals[i].hi, points[i], tol)) return false;
  }
  return true;
}

std::string describe(const SpectrumEstimate& est) {
  std::string s = "{";
  for (std::size_t i = 0; i < est.intervals.size(); ++i) {
    s += (i ? "," : "") + std::string("[") + est.intervals[i].lo.to_string() + "," + est.intervals[i].hi.to_string() + "]";
  }
  return s + "}";
}

}  // namespace

int main() {
  const PairGrid grid = examples::verification_grid();

  criterion(1, "example dichotomies verify with worst margin in [-1e-9, 1e-3]", 5.0, [&](Outcome& o) {
    const std::vector<std::pair<std::string, std::pair<LinearSystem, DichotomyCertificate>>> cases{
        {"i", {examples::polynomial_system(), examples::polynomial_dichotomy()}},
        {"ii", {examples::quadratic_system(), examples::quadratic_dichotomy()}},
        {"iii", {examples::nonuniform_system(), examples::nonuniform_dichotomy()}},
    };
    for (const auto& [tag, c] : cases) {
      const auto rep = verify_dichotomy(c.first, c.second, grid);
      o.detail << " (" << tag << ") margin=" << fmt(rep.worst_margin);
      o.require(rep.pass, tag + " verification");
      o.require(rep.worst_margin >= -1e-9 && rep.worst_margin <= 1e-3, tag + " margin outside [-1e-9, 1e-3]");
    }
  });

  criterion(2, "propagation constants bit-exact in log space; translated certificates verify", 0.0, [&](Outcome& o) {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> uK(1.0, 50.0), uexp(0.0, 2.0), utau(-8.0, 8.0);
    const std::vector<GrowthRate> rates{GrowthRate::exponential(), GrowthRate::polynomial(),
                                        GrowthRate::superexponential(2.0), GrowthRate::subexponential(0.5)};
    // Closed forms of log mu, written out independently of GrowthRate.
    const std::vector<std::function<double(double)>> log_mu{
        [](double t) { return t; },
        [](double t) { return ((t > 0) - (t < 0)) * std::log1p(std::abs(t)); },
        [](double t) { return ((t > 0) - (t < 0)) * std::pow(std::abs(t), 2.0); },
        [](double t) { return ((t > 0) - (t < 0)) * std::expm1(0.5 * std::log1p(std::abs(t))); },
    };
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(2, 2);
    P(0, 0) = 1.0;
    int exact = 0;
    for (int i = 0; i < 20; ++i) {
      const double K = uK(rng), theta = uexp(rng), nu = uexp(rng), tau = utau(rng);
      const std::size_t r = static_cast<std::size_t>(i) % rates.size();
      const auto cert = DichotomyCertificate::make(Projector::constant(P), K, -theta - 0.5, nu + 0.5, theta, nu,
                                                   rates[r]);
      const double sg = (tau > 0) - (tau < 0);
      const double oracle = std::log(K) + 3.0 * sg * std::max(theta, nu) * log_mu[r](tau);
      const double got = propagate_dichotomy(cert, tau).log_K();
      if (got == oracle) ++exact;
    }
    o.detail << " exact " << exact << "/20;";
    o.require(exact == 20, "bit-exact log K_tau");
    int uniform_exact = 0;
    for (double tau : {-7.5, -1.0, 0.0, 2.5, 11.0}) {
      const auto cert = DichotomyCertificate::make(Projector::constant(P), 3.5, -1.0, 1.0, 0.0, 0.0,
                                                   GrowthRate::polynomial());
      if (propagate_dichotomy(cert, tau).log_K() == cert.log_K()) ++uniform_exact;
    }
    o.detail << " K_tau = K for theta = nu = 0: " << uniform_exact << "/5;";
    o.require(uniform_exact == 5, "uniform K_tau = K");
    const std::vector<std::pair<LinearSystem, DichotomyCertificate>> cases{
        {examples::polynomial_system(), examples::polynomial_dichotomy()},
        {examples::quadratic_system(), examples::quadratic_dichotomy()},
        {examples::nonuniform_system(), examples::nonuniform_dichotomy()},
    };
    int verified = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& [sys, cert] : cases) {
      for (double tau : {-5.0, -1.0, 1.0, 5.0}) {
        const auto rep = verify_dichotomy(translate_system(sys, tau), propagate_dichotomy(cert, tau), grid);
        worst = std::min(worst, rep.worst_margin);
        if (rep.pass) ++verified;
      }
    }
    o.detail << " translated verifications " << verified << "/12 (worst margin " << fmt(worst) << ")";
    o.require(verified == 12, "translated verification");
  });

  criterion(3, "spectra of the reference systems within 1e-2", 30.0, [&](Outcome& o) {
    const double tol = 1e-2;
    auto check = [&](const std::string& tag, const LinearSystem& sys, const GrowthRate& rate,
                     const std::function<bool(const SpectrumEstimate&)>& ok) {
      const auto est = estimate_spectrum(sys, rate);
      o.detail << " " << tag << "=" << describe(est);
      o.require(ok(est), tag);
    };
    check("diag(-1,2)/exp",
          LinearSystem::diagonal({catalog::constant(-1.0), catalog::constant(2.0)}), GrowthRate::exponential(),
          [&](const SpectrumEstimate& e) { return spectrum_is(e, {-1.0, 2.0}, tol); });
    check("1/(1+|t|)/p", examples::polynomial_system(), GrowthRate::polynomial(),
          [&](const SpectrumEstimate& e) { return spectrum_is(e, {1.0}, tol); });
    check("2|t|/s_2", examples::quadratic_system(), GrowthRate::superexponential(2.0),
          [&](const SpectrumEstimate& e) { return spectrum_is(e, {1.0}, tol); });
    check("1/s_2", LinearSystem::scalar(catalog::constant(1.0)), GrowthRate::superexponential(2.0),
          [&](const SpectrumEstimate& e) { return spectrum_is(e, {0.0}, tol); });
    check("1/p", LinearSystem::scalar(catalog::constant(1.0)), GrowthRate::polynomial(),
          [&](const SpectrumEstimate& e) {
            return e.intervals.size() == 1 && e.intervals[0].lo.is_pos_infinity() &&
                   e.intervals[0].hi.is_pos_infinity();
          });
  });

  criterion(4, "randomized diagonal spectra are well formed and translation invariant within 5e-2", 0.0,
            [&](Outcome& o) {
              std::mt19937_64 rng(7);
              std::uniform_real_distribution<double> entry(-2.0, 2.0);
              std::uniform_int_distribution<int> dim(1, 4);
              int formed = 0, invariant = 0, matches = 0;
              double worst_shift = 0.0;
              for (int i = 0; i < 50; ++i) {
                const int n = dim(rng);
                std::vector<ScalarPart> parts;
                std::vector<double> values;
                for (int k = 0; k < n; ++k) {
                  values.push_back(entry(rng));
                  parts.push_back(catalog::constant(values.back()));
                }
                const LinearSystem sys = n == 1 ? LinearSystem::scalar(parts[0]) : LinearSystem::diagonal(parts);
                const auto est = estimate_spectrum(sys, GrowthRate::exponential());
                if (well_formed(est, n)) ++formed;
                // Independent oracle: every entry lies in some interval.
                bool hull_ok = est.intervals.size() <= values.size();
                for (double v : values) {
                  bool covered = false;
                  for (const auto& iv : est.intervals) {
                    covered = covered || (iv.lo.value() - 1e-2 <= v && v <= iv.hi.value() + 1e-2);
                  }
                  hull_ok = hull_ok && covered;
                }
                if (hull_ok) ++matches;
                bool inv = true;
                for (double tau : {-3.0, 2.0, 7.0}) {
                  const auto shifted = estimate_spectrum(translate_system(sys, tau), GrowthRate::exponential());
                  if (shifted.intervals.size() != est.intervals.size()) {
                    inv = false;
                    continue;
                  }
                  for (std::size_t k = 0; k < est.intervals.size(); ++k) {
                    const double d = std::max(std::abs(shifted.intervals[k].lo.value() - est.intervals[k].lo.value()),
                                              std::abs(shifted.intervals[k].hi.value() - est.intervals[k].hi.value()));
                    worst_shift = std::max(worst_shift, d);
                    inv = inv && d <= 5e-2;
                  }
                }
                if (inv) ++invariant;
              }
              o.detail << " well-formed " << formed << "/50, translation invariant " << invariant
                       << "/50 (max endpoint move " << fmt(worst_shift) << "), covers entries " << matches << "/50";
              o.require(formed == 50, "well-formed");
              o.require(invariant == 50, "translation invariance");
              o.require(matches == 50, "entry coverage");
            });

  criterion(5, "translated-rate limits", 0.0, [&](Outcome& o) {
    const auto pos = geometric_schedule(1.0), neg = geometric_schedule(-1.0);
    auto kind_of = [&](const GrowthRate& r, double t, const std::vector<double>& sched) {
      return translated_limit_probe(r, t, sched).kind;
    };
    const auto u = GrowthRate::subexponential(0.5), s2 = GrowthRate::superexponential(2.0);
    for (double t : {-2.0, 1.0}) {
      for (const auto* sched : {&pos, &neg}) {
        const auto k = kind_of(u, t, *sched);
        o.detail << " u_0.5(t=" << t << ")=" << to_string(k) << ";";
        o.require(k == LimitKind::FinitePositive, "u_0.5 finite limit");
      }
    }
    const auto up = kind_of(s2, 1.0, pos), down = kind_of(s2, -1.0, pos);
    o.detail << " s_2(t=1)=" << to_string(up) << "; s_2(t=-1)=" << to_string(down) << ";";
    o.require(up == LimitKind::DivergesToInfinity, "s_2 at t=1");
    o.require(down == LimitKind::DecaysToZero, "s_2 at t=-1");
    const auto at0 = translated_limit_probe(s2, 0.0, pos);
    o.detail << " t=0 -> [" << at0.lower_bound << "," << at0.upper_bound << "]";
    o.require(at0.kind == LimitKind::FinitePositive && at0.lower_bound == 1.0 && at0.upper_bound == 1.0, "exact 1 at t=0");
  });

  criterion(6, "strong comparison chain and rate classes", 0.0, [&](Outcome& o) {
    const std::vector<std::pair<std::string, GrowthRate>> chain{
        {"p", GrowthRate::polynomial()},          {"u_0.3", GrowthRate::subexponential(0.3)},
        {"u_0.7", GrowthRate::subexponential(0.7)}, {"exp", GrowthRate::exponential()},
        {"s_1.5", GrowthRate::superexponential(1.5)}, {"s_2.5", GrowthRate::superexponential(2.5)},
    };
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
      const auto v = compare_strong(chain[i + 1].second, chain[i].second);
      o.detail << " " << chain[i].first << "<<" << chain[i + 1].first << ":" << to_string(v.relation) << ";";
      o.require(v.relation == Relation::Faster, chain[i].first + " << " + chain[i + 1].first);
    }
    const auto slow = classify(GrowthRate::polynomial()), fast = classify(GrowthRate::superexponential(2.0)),
               expo = classify(GrowthRate::exponential());
    o.detail << " p:" << to_string(slow.kind) << " s_2:" << to_string(fast.kind) << " exp:" << to_string(expo.kind);
    o.require(slow.kind == RateClassKind::Slow, "p slow");
    o.require(fast.kind == RateClassKind::Fast, "s_2 fast");
    o.require(expo.kind == RateClassKind::ExponentialLike, "exp exponential-like");
  });

  criterion(7, "hull statements witnessed", 0.0, [&](Outcome& o) {
    const auto quad = examples::quadratic_system(), poly = examples::polynomial_system();
    for (double sign : {1.0, -1.0}) {
      const auto rep = pointwise_limit_probe(OrbitProbe{quad, hull_schedule(sign)});
      o.detail << " 2|t|(" << (sign > 0 ? "+" : "-") << ")=" << to_string(rep.verdict) << ";";
      o.require(rep.verdict == ProbeVerdict::DivergesPointwise, "2|t| diverges");
    }
    ClassificationInputs qin;
    qin.dichotomy = examples::quadratic_dichotomy();
    qin.growth = examples::quadratic_growth();
    const auto qc = classify_limit_behavior(quad, qin);
    o.require(qc.predicts(Prediction::EmptyLimitSets) && qc.falsifications.empty(), "2|t| EmptyLimitSets");

    const auto fwd = pointwise_limit_probe(OrbitProbe{poly, hull_schedule(1.0)});
    double sup = 0.0;
    for (const auto& row : fwd.limit_samples) sup = std::max(sup, std::abs(row[0]));
    o.detail << " 1/(1+|t|)=" << to_string(fwd.verdict) << " (sup|limit| " << fmt(sup) << ");";
    o.require(fwd.verdict == ProbeVerdict::ConvergentTo && sup < 1e-6, "1/(1+|t|) converges to 0");
    const auto bounded = bounded_solutions_probe(fwd.limit_system());
    o.require(bounded.all_bounded, "limit system bounded");
    ClassificationInputs pin;
    pin.dichotomy = examples::polynomial_dichotomy();
    pin.growth = examples::polynomial_growth();
    const auto pc = classify_limit_behavior(poly, pin);
    o.require(pc.predicts(Prediction::NoDichotomyOnHull) && pc.falsifications.empty(), "NoDichotomyOnHull");

    const auto abs1 = LinearSystem::scalar(catalog::abs_linear(1.0));
    const auto uli = uniform_local_integrability(abs1, 1.0);
    const auto at4 = uniform_local_integrability(abs1, 1.0, {4.0});
    // int_4^5 t dt = 4.5
    const double w = at4.windows.at(0).value;
    o.detail << " |t| ULI " << (uli.sup_estimate ? "bounded" : "unbounded") << ", window(4,1)=" << fmt(w);
    o.require(!uli.sup_estimate.has_value(), "|t| unbounded");
    o.require(std::abs(w - 4.5) <= 1e-6, "window value 4.5");
  });

  criterion(8, "numeric evolution agrees with closed forms; shift identity", 0.0, [&](Outcome& o) {
    const std::vector<LinearSystem> systems{
        LinearSystem::scalar(catalog::constant(-1.3)),  LinearSystem::scalar(catalog::inverse_linear()),
        LinearSystem::scalar(catalog::abs_linear(2.0)), LinearSystem::scalar(catalog::damped_sine()),
        LinearSystem::scalar(catalog::cosine(0.5, 1.0, 2.0)),
    };
    std::vector<std::pair<double, double>> pairs;
    for (double s : {-17.0, -10.0, -3.5, 0.0, 2.0, 9.0}) {
      for (double d : {-20.0, -7.25, -0.5, 0.5, 3.0, 11.5, 20.0}) pairs.emplace_back(s + d, s);
    }
    double worst_rel = 0.0;
    for (const auto& sys : systems) {
      const EvolutionOperator exact(sys, EvolutionMethod::ClosedForm), rk(sys, EvolutionMethod::RungeKutta);
      for (const auto& [t, s] : pairs) {
        // relative error of Phi = |exp(dlog) - 1|
        worst_rel = std::max(worst_rel, std::abs(std::expm1(rk.log_norm(t, s) - exact.log_norm(t, s))));
      }
    }
    o.detail << " worst relative error " << fmt(worst_rel) << ";";
    o.require(worst_rel <= 1e-6, "RK vs closed form");

    double worst_shift = 0.0;
    const std::vector<GrowthRate> rates{GrowthRate::exponential(), GrowthRate::polynomial(),
                                        GrowthRate::superexponential(2.0), GrowthRate::subexponential(0.5)};
    for (const auto& sys : systems) {
      for (const auto& rate : rates) {
        for (double gamma : {-1.5, 0.25, 2.0}) {
          const EvolutionOperator base(sys), shifted(shift_system(sys, rate, gamma));
          for (const auto& [t, s] : pairs) {
            const double expected = base.log_norm(t, s) - gamma * (rate.log_eval(t) - rate.log_eval(s));
            const double got = shifted.log_norm(t, s);
            worst_shift = std::max(worst_shift, std::abs(got - expected) / std::max(1.0, std::abs(expected)));
          }
        }
      }
    }
    o.detail << " worst shift-identity error " << fmt(worst_shift);
    o.require(worst_shift <= 1e-8, "shift identity");
  });

  criterion(9, "each injected corruption fails exactly its targeted check", 0.0, [&](Outcome& o) {
    const auto clean = paper_examples_suite(Mutation::None);
    o.detail << " clean " << clean.checks.size() << " checks " << (clean.all_pass() ? "all pass" : "NOT all pass")
             << ";";
    o.require(clean.all_pass() && clean.checks.size() >= 18, "clean suite");
    const std::vector<std::pair<Mutation, std::string>> targets{
        {Mutation::HalvedK, "ex3.dichotomy.verify"},
        {Mutation::FlippedAlphaSign, "ex3.dichotomy.verify"},
        {Mutation::WrongPropagationExponent, "ex3.propagation"},
    };
    for (const auto& [m, target] : targets) {
      const auto failed = paper_examples_suite(m).failed();
      std::string list;
      for (const auto& f : failed) list += (list.empty() ? "" : ",") + f;
      o.detail << " " << to_string(m) << " -> {" << list << "};";
      o.require(failed == std::vector<std::string>{target}, to_string(m));
    }
  });

  std::printf("%s: %d criterion(s) failed\n", failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED", failures);
  return failures ? 1 : 0;
}
