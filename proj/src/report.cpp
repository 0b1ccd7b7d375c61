#include "growthdyn/report.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "growthdyn/errors.hpp"
#include "growthdyn/paper_examples.hpp"

namespace growthdyn {

namespace {

// JSON has no infinities; non-finite doubles become strings.
Json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json matrix(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(number(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

Json pair_json(const std::optional<std::pair<double, double>>& p) {
  if (!p) return nullptr;
  return {{"t", p->first}, {"s", p->second}};
}

std::vector<std::string> strings(const std::vector<std::string>& v) { return v; }

}  // namespace

Json to_json(const ExtendedReal& value) {
  if (value.is_finite()) return value.value();
  return value.to_string();
}

Json to_json(const VerificationReport& r) {
  return {{"pass", r.pass},
          {"worst_margin", number(r.worst_margin)},
          {"violating_pair", pair_json(r.violating_pair)},
          {"pairs_checked", r.pairs_checked},
          {"tolerance", r.tolerance}};
}

Json to_json(const ComparisonVerdict& v) {
  return {{"relation", to_string(v.relation)},
          {"constant_estimate", v.constant_estimate ? number(*v.constant_estimate) : Json(nullptr)},
          {"evidence",
           {{"grid_points", v.evidence.grid_points},
            {"window", v.evidence.window},
            {"plateau_slope", number(v.evidence.plateau_slope)},
            {"stage_values", numbers(v.evidence.stage_values)},
            {"reverse_stage_values", numbers(v.evidence.reverse_stage_values)}}}};
}

Json to_json(const BohlExponents& b) {
  return {{"lower", to_json(b.lower)},
          {"upper", to_json(b.upper)},
          {"lower_uncertainty", b.lower_uncertainty},
          {"upper_uncertainty", b.upper_uncertainty},
          {"lower_stages", numbers(b.lower_stages)},
          {"upper_stages", numbers(b.upper_stages)}};
}

Json to_json(const SpectrumEstimate& e) {
  Json intervals = Json::array();
  for (const auto& iv : e.intervals) intervals.push_back({{"lo", to_json(iv.lo)}, {"hi", to_json(iv.hi)}});
  Json comps = Json::array();
  for (const auto& c : e.components) comps.push_back(to_json(c));
  return {{"intervals", intervals}, {"components", comps}, {"window", e.window}, {"uncertainty", e.uncertainty}};
}

Json to_json(const LimitProbeReport& r) {
  return {{"verdict", to_string(r.verdict)},
          {"sup_distances", numbers(r.sup_distances)},
          {"grid_points", r.grid.size()},
          {"has_limit_samples", !r.limit_samples.empty()},
          {"notes", r.notes}};
}

Json to_json(const IntegrabilityReport& r) {
  Json windows = Json::array();
  for (const auto& w : r.windows) windows.push_back({{"tau", w.tau}, {"value", number(w.value)}});
  return {{"sup_estimate", r.sup_estimate ? Json(*r.sup_estimate) : Json("unbounded")},
          {"trend", to_string(r.trend)},
          {"growth_exponent", number(r.growth_exponent)},
          {"stage_sups", numbers(r.stage_sups)},
          {"windows", windows}};
}

Json to_json(const LimitClassification& c) {
  Json preds = Json::array();
  for (const auto& p : c.predictions) {
    preds.push_back({{"prediction", to_string(p.prediction)},
                     {"witnesses", strings(p.witnesses)},
                     {"confirmations", strings(p.confirmations)}});
  }
  Json out{{"predictions", preds},
           {"falsifications", strings(c.falsifications)},
           {"notes", strings(c.notes)},
           {"unclassified_input", c.unclassified_input}};
  if (c.forward_probe) out["forward_probe"] = to_json(*c.forward_probe);
  if (c.backward_probe) out["backward_probe"] = to_json(*c.backward_probe);
  if (c.integrability) out["integrability"] = to_json(*c.integrability);
  return out;
}

Json to_json(const SubbundleReport& r) {
  Json dirs = Json::array();
  for (const auto& d : r.directions) {
    dirs.push_back({{"direction", std::vector<double>(d.direction.data(), d.direction.data() + d.direction.size())},
                    {"forward", to_string(d.forward)},
                    {"backward", to_string(d.backward)},
                    {"forward_sup", number(d.forward_sup)},
                    {"backward_sup", number(d.backward_sup)}});
  }
  return {{"stable_dim", r.stable_dim},
          {"unstable_dim", r.unstable_dim},
          {"bounded_dim", r.bounded_dim},
          {"directions", dirs},
          {"flags", strings(r.flags)}};
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
  return os.str();
}

void write_report(const Report& report, const std::string& dir, const std::string& format) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create " + dir + ": " + ec.message());
  const auto base = std::filesystem::path(dir);
  {
    std::ofstream f(base / "report.json");
    if (!f) throw InputError("cannot write " + (base / "report.json").string());
    f << report.document.dump(2) << '\n';
  }
  if (format != "json+csv") return;
  for (const auto& t : report.tables) {
    std::ofstream f(base / (t.name + ".csv"));
    if (!f) throw InputError("cannot write " + (base / (t.name + ".csv")).string());
    f << to_csv(t);
  }
}

namespace {

struct Outcome {
  Json results;
  bool pass = true;
  std::vector<std::string> failed_checks;
  std::vector<std::string> falsifications;
  std::vector<CsvTable> tables;
};

double field(const Json& config, const char* key) { return config.at(key).get<double>(); }

Outcome run_rates_compare(const Json& c) {
  const GrowthRate mu = parse_rate(c["rate"], "rate"), sigma = parse_rate(c["rate2"], "rate2");
  const Json& n = c["numerics"];
  Outcome o;
  o.results["mode"] = c["mode"];
  if (c["mode"] == "weak") {
    o.results["verdict"] = to_json(compare_weak(mu, sigma, weak_options(n)));
  } else {
    auto opts = strong_options(n);
    opts.weak = weak_options(n);
    o.results["verdict"] = to_json(compare_strong(mu, sigma, opts));
  }
  return o;
}

Outcome run_rates_classify(const Json& c) {
  const auto cls = classify(parse_rate(c["rate"], "rate"), classify_options(c["numerics"]));
  Outcome o;
  o.results = {{"class", to_string(cls.kind)},
               {"witness", cls.witness ? Json(*cls.witness) : Json(nullptr)},
               {"diagnostic", cls.diagnostic}};
  return o;
}

Outcome run_rates_limit_probe(const Json& c) {
  const Json& lp = c["numerics"]["limit_probe"];
  const auto schedule =
      geometric_schedule(lp["sign"].get<double>(), lp["first"].get<int>(), lp["last"].get<int>());
  const auto v = translated_limit_probe(parse_rate(c["rate"], "rate"), field(c, "t"), schedule,
                                        limit_probe_options(c["numerics"]));
  Outcome o;
  o.results = {{"kind", to_string(v.kind)},
               {"tau_schedule", schedule},
               {"log_values", numbers(v.log_values)}};
  if (v.kind == LimitKind::FinitePositive) {
    o.results["lower_bound"] = v.lower_bound;
    o.results["upper_bound"] = v.upper_bound;
  }
  return o;
}

Outcome run_system_evolve(const Json& c) {
  const LinearSystem sys = parse_system(c["system"], "system");
  const Json& n = c["numerics"];
  const EvolutionOperator phi(sys, evolution_method(n), evolution_options(n));
  const double t = field(c, "t"), s = field(c, "s");
  Outcome o;
  o.results["method"] = to_string(phi.method());
  o.results["log_norm"] = number(phi.log_norm(t, s));
  if (sys.is_decoupled()) {
    const Eigen::VectorXd l = phi.log_components(t, s);
    o.results["log_components"] = numbers(std::vector<double>(l.data(), l.data() + l.size()));
    if (l.maxCoeff() < std::log(std::numeric_limits<double>::max())) o.results["phi"] = matrix(phi.evaluate(t, s));
  } else {
    o.results["phi"] = matrix(phi.evaluate(t, s));
  }
  return o;
}

Outcome run_dichotomy_verify(const Json& c) {
  const LinearSystem sys = parse_system(c["system"], "system");
  const auto cert = parse_certificate(c["certificate"], "certificate");
  const Json& n = c["numerics"];
  const auto rep = verify_dichotomy(sys, cert, PairGrid::build(pair_grid_options(n)), verify_options(n, sys));
  Outcome o;
  o.results["verification"] = to_json(rep);
  o.pass = rep.pass;
  if (!rep.pass) o.failed_checks.push_back("dichotomy");
  return o;
}

Outcome run_dichotomy_fit(const Json& c) {
  const LinearSystem sys = parse_system(c["system"], "system");
  const auto cert = parse_certificate(c["certificate"], "certificate");
  const auto fit = fit_minimal_K(sys, cert.projector(), cert.rate(), cert.alpha(), cert.beta(),
                                 cert.theta().value_or(0.0), cert.nu().value_or(0.0), fit_options(c["numerics"], sys));
  Outcome o;
  o.results = {{"K_estimate", number(fit.K_estimate)},
               {"log_K", number(fit.log_K)},
               {"stable", fit.stable},
               {"stage_log_K", numbers(fit.stage_log_K)}};
  o.pass = fit.stable;
  if (!fit.stable) o.failed_checks.push_back("fit-unstable");
  return o;
}

Outcome run_dichotomy_propagate(const Json& c) {
  const auto cert = parse_certificate(c["certificate"], "certificate");
  const double tau = field(c, "tau");
  const auto prop = propagate_dichotomy(cert, tau);
  Outcome o;
  o.results["certificate"] = certificate_to_json(prop);
  if (c.contains("system")) {
    const LinearSystem sys = translate_system(parse_system(c["system"], "system"), tau);
    const Json& n = c["numerics"];
    const auto rep = verify_dichotomy(sys, prop, PairGrid::build(pair_grid_options(n)), verify_options(n, sys));
    o.results["verification"] = to_json(rep);
    o.pass = rep.pass;
    if (!rep.pass) o.failed_checks.push_back("propagated-dichotomy");
  }
  if (c.contains("growth_certificate")) {
    const auto g = propagate_growth(parse_growth_certificate(c["growth_certificate"], "growth_certificate"), tau);
    o.results["growth_certificate"] = growth_certificate_to_json(g);
  }
  return o;
}

Outcome run_growth_verify(const Json& c) {
  const LinearSystem sys = parse_system(c["system"], "system");
  const auto cert = parse_growth_certificate(c["growth_certificate"], "growth_certificate");
  const Json& n = c["numerics"];
  const auto rep = verify_growth(sys, cert, PairGrid::build(pair_grid_options(n)), verify_options(n, sys));
  Outcome o;
  o.results["verification"] = to_json(rep);
  o.pass = rep.pass;
  if (!rep.pass) o.failed_checks.push_back("growth");
  return o;
}

Outcome run_spectrum_estimate(const Json& c) {
  const LinearSystem sys = parse_system(c["system"], "system");
  const GrowthRate rate = parse_rate(c["rate"], "rate");
  const Json& n = c["numerics"];
  const auto est = estimate_spectrum(sys, rate, bohl_options(n));
  Outcome o;
  o.results["spectrum"] = to_json(est);
  o.pass = well_formed(est, sys.dimension());
  if (!o.pass) o.failed_checks.push_back("spectrum-well-formed");
  if (c.contains("gamma")) {
    const Json& g = c["gamma"];
    ExtendedReal gamma = g.is_string()
                             ? (g.get<std::string>() == "-inf" ? ExtendedReal::neg_infinity()
                                                                : ExtendedReal::pos_infinity())
                             : ExtendedReal(g.get<double>());
    ResolventOptions ro;
    ro.bohl = bohl_options(n);
    ro.fit = fit_options(n, sys);
    const auto res = resolvent_test(sys, rate, gamma, ro);
    o.results["resolvent"] = {{"gamma", to_json(gamma)},
                              {"in_resolvent", res.in_resolvent},
                              {"tested_gamma", res.tested_gamma},
                              {"certificate", res.certificate ? certificate_to_json(*res.certificate) : Json(nullptr)},
                              {"diagnostic", res.diagnostic}};
  }
  return o;
}

CsvTable limit_table(const std::string& name, const LimitProbeReport& r, int dimension) {
  CsvTable t;
  t.name = name;
  t.columns.push_back("t");
  for (int i = 0; i < dimension * dimension; ++i) t.columns.push_back("a" + std::to_string(i / dimension + 1) +
                                                                      std::to_string(i % dimension + 1));
  for (std::size_t k = 0; k < r.limit_samples.size() && k < r.grid.size(); ++k) {
    std::vector<double> row{r.grid[k]};
    row.insert(row.end(), r.limit_samples[k].begin(), r.limit_samples[k].end());
    t.rows.push_back(std::move(row));
  }
  return t;
}

Outcome run_hull_probe(const Json& c) {
  const LinearSystem sys = parse_system(c["system"], "system");
  const ClassificationConfig cfg = hull_config(c["numerics"], sys);
  Outcome o;
  for (double sign : {1.0, -1.0}) {
    OrbitProbe probe{sys, hull_schedule(sign, cfg.schedule_first, cfg.schedule_last)};
    probe.compact_radius = cfg.compact_radius;
    probe.grid_points = cfg.grid_points;
    probe.cauchy_tolerance = cfg.cauchy_tolerance;
    probe.divergence_threshold = cfg.divergence_threshold;
    const auto rep = pointwise_limit_probe(probe);
    const std::string key = sign > 0 ? "forward" : "backward";
    o.results[key] = to_json(rep);
    if (!rep.limit_samples.empty()) o.tables.push_back(limit_table(key + "_limit", rep, sys.dimension()));
  }
  const auto uli = uniform_local_integrability(sys, cfg.integrability_window, default_integrability_grid(),
                                               cfg.integrability);
  o.results["integrability"] = to_json(uli);
  CsvTable t{"integrability_windows", {"tau", "mean_norm"}, {}};
  for (const auto& w : uli.windows) t.rows.push_back({w.tau, w.value});
  o.tables.push_back(std::move(t));
  return o;
}

Outcome run_hull_classify(const Json& c) {
  const LinearSystem sys = parse_system(c["system"], "system");
  ClassificationInputs in;
  if (c.contains("certificate")) in.dichotomy = parse_certificate(c["certificate"], "certificate");
  if (c.contains("growth_certificate")) {
    in.growth = parse_growth_certificate(c["growth_certificate"], "growth_certificate");
  }
  const Json& h = c["hull"];
  if (!h["period"].is_null()) in.period = h["period"].get<double>();
  if (!h["fast_rate"].is_null()) in.fast_rate_query = parse_rate(h["fast_rate"], "hull.fast_rate");
  if (!h["slow_rate"].is_null()) in.slow_rate_query = parse_rate(h["slow_rate"], "hull.slow_rate");
  const auto cls = classify_limit_behavior(sys, in, hull_config(c["numerics"], sys));
  Outcome o;
  o.results["classification"] = to_json(cls);
  o.falsifications = cls.falsifications;
  o.pass = cls.falsifications.empty();
  return o;
}

Outcome run_paper_examples() {
  const auto suite = paper_examples_suite();
  Outcome o;
  Json checks = Json::array();
  for (const auto& ch : suite.checks) checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
  o.results["checks"] = checks;
  o.pass = suite.all_pass();
  o.failed_checks = suite.failed();
  CsvTable t{"checks", {"index", "pass"}, {}};
  for (std::size_t i = 0; i < suite.checks.size(); ++i) {
    t.rows.push_back({static_cast<double>(i), suite.checks[i].pass ? 1.0 : 0.0});
  }
  o.tables.push_back(std::move(t));
  return o;
}

Outcome dispatch(const Json& c) {
  const std::string cmd = c.at("command").get<std::string>();
  if (cmd == "rates-compare") return run_rates_compare(c);
  if (cmd == "rates-classify") return run_rates_classify(c);
  if (cmd == "rates-limit-probe") return run_rates_limit_probe(c);
  if (cmd == "system-evolve") return run_system_evolve(c);
  if (cmd == "dichotomy-verify") return run_dichotomy_verify(c);
  if (cmd == "dichotomy-fit") return run_dichotomy_fit(c);
  if (cmd == "dichotomy-propagate") return run_dichotomy_propagate(c);
  if (cmd == "growth-verify") return run_growth_verify(c);
  if (cmd == "spectrum-estimate") return run_spectrum_estimate(c);
  if (cmd == "hull-probe") return run_hull_probe(c);
  if (cmd == "hull-classify") return run_hull_classify(c);
  if (cmd == "paper-examples") return run_paper_examples();
  throw UsageError("command", "unknown command '" + cmd + "'");
}

}  // namespace

Report run(const Json& config) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o = dispatch(config);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Report r;
  r.pass = o.pass;
  r.tables = std::move(o.tables);
  const Json& n = config.at("numerics");
  r.document = {
      {"schema_version", kSchemaVersion},
      {"config", config},
      {"results", o.results},
      {"verdict",
       {{"status", o.pass ? "pass" : "fail"},
        {"failed_checks", o.failed_checks},
        {"falsifications", o.falsifications}}},
      {"provenance",
       {{"version", kVersion},
        {"wall_clock_seconds", elapsed},
        {"tolerances",
         {{"verify_closed_form", n.at("verify_tolerance_closed_form")},
          {"verify_numeric", n.at("verify_tolerance_numeric")}}}}},
  };
  return r;
}

}  // namespace growthdyn
