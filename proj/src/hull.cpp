#include "growthdyn/hull.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "growthdyn/errors.hpp"

namespace growthdyn {

std::vector<double> hull_schedule(double sign, int first, int last) { return geometric_schedule(sign, first, last); }

std::string to_string(ProbeVerdict verdict) {
  switch (verdict) {
    case ProbeVerdict::ConvergentTo: return "ConvergentTo";
    case ProbeVerdict::DivergesPointwise: return "DivergesPointwise";
    case ProbeVerdict::NonCauchy: return "NonCauchy";
  }
  return "?";
}

std::string to_string(IntegrabilityTrend trend) {
  return trend == IntegrabilityTrend::Plateau ? "Plateau" : "Growing";
}

std::string to_string(Prediction prediction) {
  switch (prediction) {
    case Prediction::EmptyLimitSets: return "EmptyLimitSets";
    case Prediction::LimitEquationsAllBounded: return "LimitEquationsAllBounded";
    case Prediction::NoDichotomyOnHull: return "NoDichotomyOnHull";
    case Prediction::SpectrumCollapsesToZero: return "SpectrumCollapsesToZero";
    case Prediction::SpectralIntervalsOnlyZeroOrInfinity: return "SpectralIntervalsOnlyZeroOrInfinity";
  }
  return "?";
}

namespace {

Eigen::MatrixXd sample(const LinearSystem& omega, double t) {
  Eigen::MatrixXd a;
  try {
    a = omega.coefficient(t);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw InputError(std::string("coefficient evaluation failed: ") + e.what());
  }
  if (!a.allFinite()) {
    std::ostringstream msg;
    msg << "coefficient is not finite at t = " << t;
    throw InputError(msg.str());
  }
  return a;
}

void check_schedule(const std::vector<double>& tau) {
  if (tau.size() < 8) throw ParameterError("tau schedule needs at least 8 entries");
  const bool up = tau[1] > tau[0];
  for (std::size_t i = 1; i < tau.size(); ++i) {
    if (up ? tau[i] <= tau[i - 1] : tau[i] >= tau[i - 1]) {
      throw ParameterError("tau schedule must be strictly monotone");
    }
  }
}

}  // namespace

LinearSystem LimitProbeReport::limit_system() const {
  if (verdict != ProbeVerdict::ConvergentTo || limit_samples.empty()) {
    throw ParameterError("only a convergent probe has a limit equation");
  }
  return from_samples(grid, limit_samples, "limit");
}

LimitProbeReport pointwise_limit_probe(const OrbitProbe& probe) {
  check_schedule(probe.tau_schedule);
  if (!(probe.compact_radius > 0.0)) throw ParameterError("compact radius T must be positive");
  if (probe.grid_points < 2) throw ParameterError("probe grid needs at least 2 points");

  LimitProbeReport report;
  const double T = probe.compact_radius;
  for (int k = 0; k < probe.grid_points; ++k) report.grid.push_back(-T + 2.0 * T * k / (probe.grid_points - 1));

  const std::size_t m = report.grid.size();
  std::vector<std::vector<Eigen::MatrixXd>> values;
  for (double tau : probe.tau_schedule) {
    std::vector<Eigen::MatrixXd> row;
    row.reserve(m);
    for (double t : report.grid) row.push_back(sample(probe.omega, t + tau));
    values.push_back(std::move(row));
  }
  for (std::size_t n = 0; n + 1 < values.size(); ++n) {
    double d = 0.0;
    for (std::size_t k = 0; k < m; ++k) d = std::max(d, (values[n + 1][k] - values[n][k]).cwiseAbs().maxCoeff());
    report.sup_distances.push_back(d);
  }

  const auto& d = report.sup_distances;
  const std::size_t nd = d.size();
  const bool cauchy = d[nd - 1] <= d[nd - 2] && d[nd - 2] <= d[nd - 3] && d[nd - 1] < probe.cauchy_tolerance &&
                      d[nd - 2] < probe.cauchy_tolerance && d[nd - 3] < probe.cauchy_tolerance;
  if (cauchy) {
    report.verdict = ProbeVerdict::ConvergentTo;
    for (const auto& a : values.back()) {
      std::vector<double> row;
      for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
      }
      report.limit_samples.push_back(std::move(row));
    }
    return report;
  }

  // Every grid point must blow past the threshold with a growing magnitude.
  const std::size_t nv = values.size();
  bool diverges = true;
  for (std::size_t k = 0; k < m && diverges; ++k) {
    const double a = values[nv - 3][k].cwiseAbs().maxCoeff();
    const double b = values[nv - 2][k].cwiseAbs().maxCoeff();
    const double c = values[nv - 1][k].cwiseAbs().maxCoeff();
    diverges = c > probe.divergence_threshold && c > b && b > a;
  }
  report.verdict = diverges ? ProbeVerdict::DivergesPointwise : ProbeVerdict::NonCauchy;
  if (!diverges) {
    std::ostringstream msg;
    msg << "last sup-distance " << d.back() << " above tolerance " << probe.cauchy_tolerance;
    report.notes = msg.str();
  }
  return report;
}

std::vector<double> default_integrability_grid() {
  std::vector<double> out{0.0};
  for (int k = 0; k <= 16; ++k) {
    out.push_back(std::exp2(k));
    out.push_back(-std::exp2(k));
  }
  return out;
}

IntegrabilityReport uniform_local_integrability(const LinearSystem& omega, double t0, std::vector<double> tau_grid,
                                                const IntegrabilityOptions& options) {
  if (!(t0 > 0.0) || !std::isfinite(t0)) throw ParameterError("window length t0 must be positive");
  if (tau_grid.empty()) throw ParameterError("tau grid must not be empty");
  const auto kinks = omega.kinks();
  auto norm_at = [&](double s) {
    const Eigen::MatrixXd a = sample(omega, s);
    if (a.size() == 1) return std::abs(a(0, 0));
    return Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
  };
  using Quadrature = boost::math::quadrature::gauss_kronrod<double, 15>;
  auto window_mean = [&](double tau) {
    std::vector<double> cuts{tau};
    for (double k : kinks) {
      if (k > tau && k < tau + t0) cuts.push_back(k);
    }
    if (omega.dimension() == 1) {
      // |a| has corners at the zeros of a; split there too.
      const int n = 256;
      auto a = [&](double s) { return sample(omega, s)(0, 0); };
      double prev_s = tau, prev_v = a(tau);
      for (int k = 1; k <= n; ++k) {
        const double s = tau + t0 * k / n, v = a(s);
        if ((prev_v < 0.0 && v > 0.0) || (prev_v > 0.0 && v < 0.0)) {
          boost::math::tools::eps_tolerance<double> tol(50);
          const auto root = boost::math::tools::bisect(a, prev_s, s, tol);
          cuts.push_back(0.5 * (root.first + root.second));
        }
        prev_s = s;
        prev_v = v;
      }
    }
    cuts.push_back(tau + t0);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      double err = 0.0;
      const double part = Quadrature::integrate(norm_at, cuts[i], cuts[i + 1], 15, 1e-10, &err);
      total += part;
      // Absolute budget per unit window, relative once the integrand is large.
      if (err > options.absolute_tolerance * t0 * std::max(1.0, std::abs(part))) {
        throw InputError("window quadrature did not reach the requested accuracy");
      }
    }
    return total / t0;
  };

  IntegrabilityReport report;
  std::sort(tau_grid.begin(), tau_grid.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b) || (std::abs(a) == std::abs(b) && a < b);
  });
  for (double tau : tau_grid) {
    if (!std::isfinite(tau)) throw DomainError("tau must be finite");
    report.windows.push_back({tau, window_mean(tau)});
  }

  // Stage k holds every tau with |tau| <= 2^k (stage -1: tau = 0 only).
  double running = 0.0;
  std::size_t next = 0;
  double radius = 0.0;
  const double reach = std::abs(report.windows.back().tau);
  while (true) {
    while (next < report.windows.size() && std::abs(report.windows[next].tau) <= radius) {
      running = std::max(running, report.windows[next].value);
      ++next;
    }
    report.stage_sups.push_back(running);
    if (radius >= reach) break;
    radius = radius == 0.0 ? 1.0 : 2.0 * radius;
  }

  const auto& s = report.stage_sups;
  if (s.size() < 3) {
    report.sup_estimate = s.back();
    return report;
  }
  const double last = s.back(), prev = s[s.size() - 2];
  const bool plateau = last - prev <= options.plateau_tolerance * std::max(1.0, last);
  if (prev > 0.0 && last > 0.0) report.growth_exponent = std::log2(last / prev);
  if (plateau) {
    report.trend = IntegrabilityTrend::Plateau;
    report.sup_estimate = last;
  } else {
    report.trend = IntegrabilityTrend::Growing;
  }
  return report;
}

BoundedSolutionsReport bounded_solutions_probe(const LinearSystem& limit_system, double horizon,
                                               std::optional<std::vector<Eigen::VectorXd>> basis) {
  SubbundleOptions opts;
  if (!limit_system.is_closed_form()) opts.method = EvolutionMethod::Quadrature;
  BoundedSolutionsReport report;
  report.detail = subbundle_probe(limit_system, horizon, std::move(basis), opts);
  report.all_bounded = report.detail.bounded_dim == static_cast<int>(report.detail.directions.size());
  return report;
}

bool LimitClassification::predicts(Prediction p) const {
  return std::any_of(predictions.begin(), predictions.end(),
                     [p](const PredictionRecord& r) { return r.prediction == p; });
}

namespace {

PredictionRecord& record(LimitClassification& out, Prediction p) {
  for (auto& r : out.predictions) {
    if (r.prediction == p) return r;
  }
  out.predictions.push_back({p, {}, {}});
  return out.predictions.back();
}

bool is_point(const SpectralInterval& iv, double at, double tol) {
  return iv.lo.is_finite() && iv.hi.is_finite() && std::abs(iv.lo.value() - at) <= tol &&
         std::abs(iv.hi.value() - at) <= tol;
}

std::string describe(const SpectrumEstimate& est) {
  std::ostringstream out;
  out << "{";
  for (std::size_t i = 0; i < est.intervals.size(); ++i) {
    out << (i ? ", " : "") << "[" << est.intervals[i].lo.to_string() << ", " << est.intervals[i].hi.to_string()
        << "]";
  }
  out << "}";
  return out.str();
}

}  // namespace

LimitClassification classify_limit_behavior(const LinearSystem& omega, const ClassificationInputs& inputs,
                                            const ClassificationConfig& config) {
  LimitClassification out;
  const PairGrid grid = PairGrid::build(config.verify_grid);

  std::optional<RateClass> dich_class, growth_class;
  if (inputs.dichotomy) {
    const auto rep = verify_dichotomy(omega, *inputs.dichotomy, grid, config.verify);
    if (!rep.pass) throw ParameterError("supplied dichotomy certificate does not verify on the system");
    dich_class = classify(inputs.dichotomy->rate(), config.rate_classes);
    out.notes.push_back("dichotomy rate " + inputs.dichotomy->rate().describe() + " classified " +
                        to_string(dich_class->kind));
  }
  if (inputs.growth) {
    const auto rep = verify_growth(omega, *inputs.growth, grid, config.verify);
    if (!rep.pass) throw ParameterError("supplied growth certificate does not verify on the system");
    growth_class = classify(inputs.growth->rate(), config.rate_classes);
    out.notes.push_back("growth rate " + inputs.growth->rate().describe() + " classified " +
                        to_string(growth_class->kind));
  }

  auto probe = [&](double sign) {
    OrbitProbe p{omega,
                 hull_schedule(sign, config.schedule_first, config.schedule_last),
                 config.compact_radius,
                 config.grid_points,
                 config.cauchy_tolerance,
                 config.divergence_threshold};
    return pointwise_limit_probe(p);
  };
  out.forward_probe = probe(1.0);
  out.backward_probe = probe(-1.0);
  out.integrability = uniform_local_integrability(omega, config.integrability_window, default_integrability_grid(),
                                                   config.integrability);

  const std::string fwd = "omega-limit probe: " + to_string(out.forward_probe->verdict);
  const std::string bwd = "alpha-limit probe: " + to_string(out.backward_probe->verdict);

  // (2) fast rate + uniform dichotomy.
  if (inputs.dichotomy && dich_class->kind == RateClassKind::Fast && inputs.dichotomy->uniform()) {
    record(out, Prediction::EmptyLimitSets).witnesses.push_back("uniform dichotomy under fast rate " +
                                                                 inputs.dichotomy->rate().describe());
  }
  // (3) slow rate + uniform growth.
  if (inputs.growth && growth_class->kind == RateClassKind::Slow && inputs.growth->epsilon() == 0.0) {
    const std::string w = "uniform growth under slow rate " + inputs.growth->rate().describe();
    record(out, Prediction::LimitEquationsAllBounded).witnesses.push_back(w);
    record(out, Prediction::NoDichotomyOnHull).witnesses.push_back(w);
    record(out, Prediction::SpectrumCollapsesToZero).witnesses.push_back(w + " (exponential spectrum of limits)");
  }
  // (4) failure of uniform local integrability.
  if (!out.integrability->sup_estimate) {
    std::ostringstream w;
    w << "windowed means of ||omega|| grow (log2 slope " << out.integrability->growth_exponent << ")";
    record(out, Prediction::EmptyLimitSets).witnesses.push_back(w.str());
  }
  // (5) uniform exponential growth + fast rate query.
  const bool exp_growth = inputs.growth && inputs.growth->epsilon() == 0.0 &&
                          (inputs.growth->rate().is_exponential_family() ||
                           growth_class->kind == RateClassKind::ExponentialLike);
  if (exp_growth && inputs.fast_rate_query &&
      classify(*inputs.fast_rate_query, config.rate_classes).kind == RateClassKind::Fast) {
    record(out, Prediction::SpectrumCollapsesToZero)
        .witnesses.push_back("uniform exponential growth with fast rate " + inputs.fast_rate_query->describe());
  }
  // (6) periodic + slow rate query.
  const auto period = inputs.period ? inputs.period : omega.period();
  if (period && inputs.slow_rate_query &&
      classify(*inputs.slow_rate_query, config.rate_classes).kind == RateClassKind::Slow) {
    std::ostringstream w;
    w << "period " << *period << " with slow rate " << inputs.slow_rate_query->describe();
    record(out, Prediction::SpectralIntervalsOnlyZeroOrInfinity).witnesses.push_back(w.str());
  }

  if (out.predictions.empty()) {
    out.unclassified_input = true;
    out.notes.push_back("inputs are neither slow nor fast and carry no applicable certificate; no prediction made");
    return out;
  }

  // Cross-checks.
  const std::vector<const LimitProbeReport*> probes{&*out.forward_probe, &*out.backward_probe};
  const std::vector<std::string> probe_names{"omega-limit", "alpha-limit"};
  for (auto& rec : out.predictions) {
    switch (rec.prediction) {
      case Prediction::EmptyLimitSets:
        for (std::size_t i = 0; i < probes.size(); ++i) {
          if (probes[i]->verdict == ProbeVerdict::ConvergentTo) {
            out.falsifications.push_back("EmptyLimitSets predicted but the " + probe_names[i] +
                                         " probe converged");
          } else {
            rec.confirmations.push_back(probe_names[i] + " probe: " + to_string(probes[i]->verdict));
          }
        }
        break;
      case Prediction::LimitEquationsAllBounded:
      case Prediction::NoDichotomyOnHull: {
        bool any = false;
        for (std::size_t i = 0; i < probes.size(); ++i) {
          if (probes[i]->verdict != ProbeVerdict::ConvergentTo) continue;
          any = true;
          const auto bounded = bounded_solutions_probe(probes[i]->limit_system(), config.bounded_horizon);
          if (bounded.all_bounded) {
            rec.confirmations.push_back(probe_names[i] + " limit equation: all solutions bounded");
          } else {
            out.falsifications.push_back(to_string(rec.prediction) + " predicted but the " + probe_names[i] +
                                         " limit equation has unbounded solutions");
          }
        }
        if (!any) rec.confirmations.push_back("no convergent limit on the tested schedules (nothing to check)");
        break;
      }
      case Prediction::SpectrumCollapsesToZero: {
        std::vector<std::pair<std::string, SpectrumEstimate>> spectra;
        if (inputs.fast_rate_query && exp_growth && omega.is_decoupled()) {
          spectra.emplace_back("system under " + inputs.fast_rate_query->describe(),
                               estimate_spectrum(omega, *inputs.fast_rate_query, config.spectrum));
        }
        // limits only carry the prediction through rule (3)
        const bool slow_growth = inputs.growth && growth_class->kind == RateClassKind::Slow && inputs.growth->epsilon() == 0.0;
        for (std::size_t i = 0; slow_growth && i < probes.size(); ++i) {
          if (probes[i]->verdict != ProbeVerdict::ConvergentTo) continue;
          const LinearSystem lim = probes[i]->limit_system();
          if (!lim.is_decoupled()) continue;
          BohlOptions opts = config.limit_spectrum;
          opts.method = EvolutionMethod::Quadrature;
          spectra.emplace_back(probe_names[i] + " limit under exp",
                               estimate_spectrum(lim, GrowthRate::exponential(), opts));
        }
        if (spectra.empty()) rec.confirmations.push_back("no spectrum to check on the tested inputs");
        for (const auto& [name, est] : spectra) {
          const bool ok = !est.intervals.empty() && std::all_of(est.intervals.begin(), est.intervals.end(),
                                                                [&](const SpectralInterval& iv) {
                                                                  return is_point(iv, 0.0, config.spectrum_tolerance);
                                                                });
          if (ok) {
            rec.confirmations.push_back(name + ": spectrum " + describe(est));
          } else {
            out.falsifications.push_back("SpectrumCollapsesToZero predicted but " + name + " has spectrum " +
                                         describe(est));
          }
        }
        break;
      }
      case Prediction::SpectralIntervalsOnlyZeroOrInfinity: {
        if (!omega.is_decoupled()) {
          rec.confirmations.push_back("general periodic matrices are not checked");
          break;
        }
        const auto est = estimate_spectrum(omega, *inputs.slow_rate_query, config.spectrum);
        const bool ok = std::all_of(est.intervals.begin(), est.intervals.end(), [&](const SpectralInterval& iv) {
          return is_point(iv, 0.0, config.spectrum_tolerance) || (iv.lo.is_pos_infinity() && iv.hi.is_pos_infinity()) ||
                 (iv.lo.is_neg_infinity() && iv.hi.is_neg_infinity());
        });
        if (ok) {
          rec.confirmations.push_back("spectrum under " + inputs.slow_rate_query->describe() + ": " + describe(est));
        } else {
          out.falsifications.push_back("only {0}, {+inf}, {-inf} allowed but spectrum is " + describe(est));
        }
        break;
      }
    }
  }
  out.notes.push_back(fwd);
  out.notes.push_back(bwd);
  return out;
}

}  // namespace growthdyn
