#include "growthdyn/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "growthdyn/errors.hpp"

namespace growthdyn {

const std::vector<std::string>& commands() {
  static const std::vector<std::string> list{
      "rates-compare",   "rates-classify",  "rates-limit-probe", "system-evolve",     "dichotomy-verify",
      "dichotomy-fit",   "dichotomy-propagate", "growth-verify", "spectrum-estimate", "hull-probe",
      "hull-classify",   "paper-examples"};
  return list;
}

Json default_numerics() {
  const PairGridShape grid;
  const EvolutionOptions evo;
  const WeakComparisonOptions weak;
  const StrongComparisonOptions strong;
  const ClassifyOptions cls;
  const TranslatedLimitOptions lim;
  const FitOptions fit;
  const BohlOptions bohl;
  const SubbundleOptions sub;
  const ClassificationConfig hull;
  const IntegrabilityOptions uli;

  Json n;
  n["verify_tolerance_closed_form"] = 1e-9;
  n["verify_tolerance_numeric"] = 1e-5;
  n["evolution"] = {{"method", "ClosedForm"},
                    {"step", evo.step},
                    {"panel", evo.panel},
                    {"horizon", evo.horizon},
                    {"richardson", evo.richardson}};
  n["pair_grid"] = {{"half_width", grid.half_width},
                    {"anchor_spacing", grid.anchor_spacing},
                    {"fine_offsets", grid.fine_offsets},
                    {"fine_limit", grid.fine_limit},
                    {"offsets_per_doubling", grid.offsets_per_doubling},
                    {"max_separation", 2.0 * grid.half_width},
                    {"seed", grid.seed}};
  n["weak_comparison"] = {{"window_initial", weak.window.initial},
                          {"window_stages", weak.window.stages},
                          {"core_intervals", weak.core_intervals},
                          {"plateau_tolerance", weak.plateau_tolerance},
                          {"divergence_threshold", weak.divergence_threshold}};
  n["strong_comparison"] = {{"ratio_initial", strong.ratio_initial},
                            {"ratio_max_stages", strong.ratio_max_stages},
                            {"core_intervals", strong.core_intervals},
                            {"shell_points", strong.shell_points},
                            {"decay_threshold", strong.decay_threshold},
                            {"settle_tolerance", strong.settle_tolerance}};
  n["classify"] = {{"slow_exponents", cls.slow_exponents}, {"fast_exponents", cls.fast_exponents}};
  n["limit_probe"] = {{"sign", 1.0},
                      {"first", 3},
                      {"last", 12},
                      {"stabilization_tolerance", lim.stabilization_tolerance},
                      {"divergence_threshold", lim.divergence_threshold}};
  n["fit"] = {{"window_initial", fit.window.initial},
              {"window_stages", fit.window.stages},
              {"plateau_tolerance", fit.plateau_tolerance}};
  n["bohl"] = {{"window_initial", bohl.window.initial},
               {"window_stages", bohl.window.stages},
               {"core_intervals", bohl.core_intervals},
               {"shell_points", bohl.shell_points},
               {"min_log_separation", bohl.min_log_separation},
               {"infinity_threshold", bohl.infinity_threshold},
               {"limit_window_stages", hull.limit_spectrum.window.stages}};
  n["subbundle"] = {{"threshold", sub.threshold}, {"samples", sub.samples}, {"horizon", 50.0}};
  n["hull"] = {{"compact_radius", hull.compact_radius},
               {"grid_points", hull.grid_points},
               {"schedule_first", hull.schedule_first},
               {"schedule_last", hull.schedule_last},
               {"cauchy_tolerance", hull.cauchy_tolerance},
               {"divergence_threshold", hull.divergence_threshold},
               {"integrability_window", hull.integrability_window},
               {"integrability_abs_tolerance", uli.absolute_tolerance},
               {"integrability_plateau_tolerance", uli.plateau_tolerance},
               {"bounded_horizon", hull.bounded_horizon},
               {"spectrum_tolerance", hull.spectrum_tolerance}};
  return n;
}

namespace {

std::string kind_name(const Json& j) {
  switch (j.type()) {
    case Json::value_t::null: return "null";
    case Json::value_t::boolean: return "boolean";
    case Json::value_t::string: return "string";
    case Json::value_t::array: return "array";
    case Json::value_t::object: return "object";
    default: return "number";
  }
}

// Overlay user onto defaults; only known fields with matching types pass.
Json merge(const Json& defaults, const Json& user, const std::string& path) {
  if (!user.is_object()) throw UsageError(path, "expected an object");
  Json out = defaults;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string field = path + "." + it.key();
    if (!defaults.contains(it.key())) throw UsageError(field, "unknown field");
    const Json& d = defaults[it.key()];
    const Json& v = it.value();
    if (d.is_object()) {
      out[it.key()] = merge(d, v, field);
    } else if (kind_name(d) != kind_name(v)) {
      throw UsageError(field, "expected " + kind_name(d) + ", got " + kind_name(v));
    } else if (d.is_number_integer() && !v.is_number_integer()) {
      throw UsageError(field, "expected an integer");
    } else {
      out[it.key()] = v;
    }
  }
  return out;
}

double number(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw UsageError(path + "." + key, "required field missing");
  const Json& v = j[key];
  if (!v.is_number()) throw UsageError(path + "." + key, "expected a number");
  return v.get<double>();
}

std::optional<double> optional_number(const Json& j, const std::string& key, const std::string& path) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number()) throw UsageError(path + "." + key, "expected a number or null");
  return j[key].get<double>();
}

// A constant given both directly and as a log must agree; an overflowed direct
// value defers to the log.
void consistent_log(double value, double log_value, const std::string& path) {
  if (std::isinf(value) && std::isinf(std::exp(log_value))) return;
  if (std::abs(std::log(value) - log_value) > 1e-9 * std::max(1.0, std::abs(log_value))) {
    throw UsageError(path, "disagrees with the direct value");
  }
}

std::string text(const Json& j, const std::string& key, const std::string& path) {
  if (!j.is_object() || !j.contains(key)) throw UsageError(path + "." + key, "required field missing");
  if (!j[key].is_string()) throw UsageError(path + "." + key, "expected a string");
  return j[key].get<std::string>();
}

void only_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!j.is_object()) throw UsageError(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return it.key() == a; })) {
      throw UsageError(path + "." + it.key(), "unknown field");
    }
  }
}

template <typename F>
auto wrap(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const UnsupportedError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(path, e.what());
  }
}

ScalarPart parse_part(const Json& j, const std::string& path) {
  only_keys(j, {"catalog", "params"}, path);
  const std::string name = text(j, "catalog", path);
  std::map<std::string, double> params;
  if (j.contains("params")) {
    const Json& p = j["params"];
    if (!p.is_object()) throw UsageError(path + ".params", "expected an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
      if (!it.value().is_number()) throw UsageError(path + ".params." + it.key(), "expected a number");
      params[it.key()] = it.value().get<double>();
    }
  }
  return wrap(path, [&] { return catalog::by_name(name, params); });
}

ExtendedReal parse_extended(const Json& j, const std::string& path) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return ExtendedReal::pos_infinity();
    if (s == "-inf") return ExtendedReal::neg_infinity();
    throw UsageError(path, "expected a number, \"+inf\" or \"-inf\"");
  }
  if (!j.is_number()) throw UsageError(path, "expected a number, \"+inf\" or \"-inf\"");
  return ExtendedReal(j.get<double>());
}

}  // namespace

GrowthRate parse_rate(const Json& j, const std::string& path) {
  if (!j.is_object()) throw UsageError(path, "expected a rate object");
  const std::string kind = text(j, "kind", path);
  return wrap(path, [&]() -> GrowthRate {
    if (kind == "exponential") {
      only_keys(j, {"kind"}, path);
      return GrowthRate::exponential();
    }
    if (kind == "polynomial") {
      only_keys(j, {"kind"}, path);
      return GrowthRate::polynomial();
    }
    if (kind == "superexponential") {
      only_keys(j, {"kind", "r"}, path);
      return GrowthRate::superexponential(number(j, "r", path));
    }
    if (kind == "subexponential") {
      only_keys(j, {"kind", "r"}, path);
      return GrowthRate::subexponential(number(j, "r", path));
    }
    if (kind == "translated") {
      only_keys(j, {"kind", "base", "tau"}, path);
      if (!j.contains("base")) throw UsageError(path + ".base", "required field missing");
      return parse_rate(j["base"], path + ".base").translated(number(j, "tau", path));
    }
    if (kind == "power") {
      only_keys(j, {"kind", "base", "k"}, path);
      if (!j.contains("base")) throw UsageError(path + ".base", "required field missing");
      return parse_rate(j["base"], path + ".base").power(number(j, "k", path));
    }
    throw UsageError(path + ".kind", "unknown rate kind '" + kind + "'");
  });
}

Json rate_to_json(const GrowthRate& rate) {
  switch (rate.kind()) {
    case RateKind::Exponential: return {{"kind", "exponential"}};
    case RateKind::Polynomial: return {{"kind", "polynomial"}};
    case RateKind::Superexponential: return {{"kind", "superexponential"}, {"r", rate.exponent()}};
    case RateKind::Subexponential: return {{"kind", "subexponential"}, {"r", rate.exponent()}};
    case RateKind::Translated: return {{"kind", "translated"}, {"base", rate_to_json(rate.base())}, {"tau", rate.shift()}};
    case RateKind::Power: return {{"kind", "power"}, {"base", rate_to_json(rate.base())}, {"k", rate.exponent()}};
  }
  return {};
}

LinearSystem parse_system(const Json& j, const std::string& path) {
  if (!j.is_object()) throw UsageError(path, "expected a system object");
  if (j.contains("catalog")) {
    return LinearSystem::scalar(parse_part(j, path));
  }
  if (j.contains("diagonal")) {
    only_keys(j, {"diagonal"}, path);
    const Json& d = j["diagonal"];
    if (!d.is_array() || d.empty()) throw UsageError(path + ".diagonal", "expected a non-empty array");
    std::vector<ScalarPart> parts;
    for (std::size_t i = 0; i < d.size(); ++i) {
      parts.push_back(parse_part(d[i], path + ".diagonal[" + std::to_string(i) + "]"));
    }
    return LinearSystem::diagonal(std::move(parts));
  }
  if (j.contains("csv")) {
    only_keys(j, {"csv"}, path);
    const std::string file = text(j, "csv", path);
    return wrap(path + ".csv", [&] { return read_csv(file); });
  }
  throw UsageError(path, "expected one of 'catalog', 'diagonal' or 'csv'");
}

Json system_to_json(const LinearSystem& system) {
  const char* kind = system.kind() == SystemKind::Scalar     ? "scalar"
                     : system.kind() == SystemKind::Diagonal ? "diagonal"
                                                             : "matrix";
  return {{"label", system.label()},
          {"dimension", system.dimension()},
          {"kind", kind},
          {"closed_form", system.is_closed_form()}};
}

DichotomyCertificate parse_certificate(const Json& j, const std::string& path) {
  only_keys(j, {"projector_kind", "projector", "K", "log_K", "alpha", "beta", "theta", "nu", "rate"}, path);
  const std::string kind = text(j, "projector_kind", path);
  Projector projector = Projector::zero();
  if (kind == "Identity") {
    projector = Projector::identity();
  } else if (kind == "ConstantMatrix") {
    if (!j.contains("projector") || !j["projector"].is_array()) {
      throw UsageError(path + ".projector", "ConstantMatrix needs a matrix (array of rows)");
    }
    const Json& m = j["projector"];
    const auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd p(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const Json& row = m[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
        throw UsageError(path + ".projector", "matrix must be square");
      }
      for (Eigen::Index c = 0; c < n; ++c) {
        const Json& v = row[static_cast<std::size_t>(c)];
        if (!v.is_number()) throw UsageError(path + ".projector", "entries must be numbers");
        p(r, c) = v.get<double>();
      }
    }
    projector = wrap(path + ".projector", [&] { return Projector::constant(p); });
  } else if (kind != "Zero") {
    throw UsageError(path + ".projector_kind", "expected Zero, Identity or ConstantMatrix");
  }
  if (!j.contains("rate")) throw UsageError(path + ".rate", "required field missing");
  GrowthRate rate = parse_rate(j["rate"], path + ".rate");
  const auto log_K = optional_number(j, "log_K", path);
  const double log_k = log_K ? *log_K : std::log(number(j, "K", path));
  if (log_K && j.contains("K") && !j["K"].is_null()) consistent_log(number(j, "K", path), *log_K, path + ".log_K");
  return wrap(path, [&] {
    return DichotomyCertificate::from_log_K(projector, log_k, optional_number(j, "alpha", path),
                                            optional_number(j, "beta", path), optional_number(j, "theta", path),
                                            optional_number(j, "nu", path), rate);
  });
}

Json certificate_to_json(const DichotomyCertificate& cert) {
  auto opt = [](std::optional<double> v) { return v ? Json(*v) : Json(nullptr); };
  Json j{{"projector_kind", to_string(cert.projector().kind())},
         {"K", cert.K()},
         {"log_K", cert.log_K()},
         {"alpha", opt(cert.alpha())},
         {"beta", opt(cert.beta())},
         {"theta", opt(cert.theta())},
         {"nu", opt(cert.nu())},
         {"rate", rate_to_json(cert.rate())}};
  if (cert.projector().kind() == ProjectorKind::ConstantMatrix) {
    const int n = cert.projector().dimension();
    const Eigen::MatrixXd p = cert.projector().at(0.0, n);
    Json rows = Json::array();
    for (int r = 0; r < n; ++r) {
      Json row = Json::array();
      for (int c = 0; c < n; ++c) row.push_back(p(r, c));
      rows.push_back(row);
    }
    j["projector"] = rows;
  }
  return j;
}

GrowthCertificate parse_growth_certificate(const Json& j, const std::string& path) {
  only_keys(j, {"L", "log_L", "a", "epsilon", "rate"}, path);
  if (!j.contains("rate")) throw UsageError(path + ".rate", "required field missing");
  GrowthRate rate = parse_rate(j["rate"], path + ".rate");
  const double a = number(j, "a", path), eps = number(j, "epsilon", path);
  const auto log_L = optional_number(j, "log_L", path);
  const double log_l = log_L ? *log_L : std::log(number(j, "L", path));
  if (log_L && j.contains("L") && !j["L"].is_null()) consistent_log(number(j, "L", path), *log_L, path + ".log_L");
  return wrap(path, [&] { return GrowthCertificate::from_log_L(log_l, a, eps, rate); });
}

Json growth_certificate_to_json(const GrowthCertificate& cert) {
  return {{"L", cert.L()},
          {"log_L", cert.log_L()},
          {"a", cert.a()},
          {"epsilon", cert.epsilon()},
          {"rate", rate_to_json(cert.rate())}};
}

namespace {

const std::map<std::string, std::vector<std::string>>& required_fields() {
  static const std::map<std::string, std::vector<std::string>> table{
      {"rates-compare", {"rate", "rate2"}},
      {"rates-classify", {"rate"}},
      {"rates-limit-probe", {"rate", "t"}},
      {"system-evolve", {"system", "t", "s"}},
      {"dichotomy-verify", {"system", "certificate"}},
      {"dichotomy-fit", {"system", "certificate"}},
      {"dichotomy-propagate", {"certificate", "tau"}},
      {"growth-verify", {"system", "growth_certificate"}},
      {"spectrum-estimate", {"system", "rate"}},
      {"hull-probe", {"system"}},
      {"hull-classify", {"system"}},
      {"paper-examples", {}},
  };
  return table;
}

}  // namespace

Json normalize_config(const Json& raw, const CliOverrides& overrides, const std::string& base_dir) {
  if (!raw.is_object()) throw UsageError("$", "config must be a JSON object");
  only_keys(raw,
            {"schema_version", "command", "system", "rate", "rate2", "mode", "certificate", "growth_certificate", "t",
             "s", "tau", "gamma", "hull", "numerics", "output"},
            "$");
  Json out;
  out["schema_version"] = kSchemaVersion;
  if (raw.contains("schema_version")) {
    if (!raw["schema_version"].is_string() || raw["schema_version"].get<std::string>() != kSchemaVersion) {
      throw UsageError("schema_version", std::string("unsupported schema version (expected \"") + kSchemaVersion +
                                             "\")");
    }
  }
  const std::string command = text(raw, "command", "$");
  if (std::find(commands().begin(), commands().end(), command) == commands().end()) {
    throw UsageError("command", "unknown command '" + command + "'");
  }
  out["command"] = command;
  for (const auto& field : required_fields().at(command)) {
    if (!raw.contains(field) || raw[field].is_null()) {
      throw UsageError(field, "required field missing for command '" + command + "'");
    }
  }

  if (raw.contains("system")) {
    Json sys = raw["system"];
    if (sys.is_object() && sys.contains("csv") && sys["csv"].is_string()) {
      std::filesystem::path p(sys["csv"].get<std::string>());
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      sys["csv"] = p.lexically_normal().string();
    }
    (void)parse_system(sys, "system");
    out["system"] = sys;
  }
  for (const char* key : {"rate", "rate2"}) {
    if (raw.contains(key)) out[key] = rate_to_json(parse_rate(raw[key], key));
  }
  if (raw.contains("certificate")) {
    (void)parse_certificate(raw["certificate"], "certificate");
    Json c = raw["certificate"];
    for (const char* k : {"alpha", "beta", "theta", "nu"}) {
      if (!c.contains(k)) c[k] = nullptr;
    }
    c["rate"] = rate_to_json(parse_rate(c["rate"], "certificate.rate"));
    out["certificate"] = c;
  }
  if (raw.contains("growth_certificate")) {
    const auto g = parse_growth_certificate(raw["growth_certificate"], "growth_certificate");
    Json c = raw["growth_certificate"];
    c["rate"] = rate_to_json(g.rate());
    out["growth_certificate"] = c;
  }
  for (const char* key : {"t", "s", "tau"}) {
    if (raw.contains(key)) {
      if (!raw[key].is_number() || !std::isfinite(raw[key].get<double>())) {
        throw UsageError(key, "expected a finite number");
      }
      out[key] = raw[key];
    }
  }
  if (raw.contains("gamma")) {
    (void)parse_extended(raw["gamma"], "gamma");
    out["gamma"] = raw["gamma"];
  }
  out["mode"] = "strong";
  if (raw.contains("mode")) {
    const std::string mode = text(raw, "mode", "$");
    if (mode != "weak" && mode != "strong") throw UsageError("mode", "expected \"weak\" or \"strong\"");
    out["mode"] = mode;
  }

  Json hull{{"period", nullptr}, {"fast_rate", nullptr}, {"slow_rate", nullptr}};
  if (raw.contains("hull")) {
    const Json& h = raw["hull"];
    only_keys(h, {"period", "fast_rate", "slow_rate"}, "hull");
    if (auto p = optional_number(h, "period", "hull")) {
      if (!(*p > 0.0)) throw UsageError("hull.period", "period must be positive");
      hull["period"] = *p;
    }
    for (const char* key : {"fast_rate", "slow_rate"}) {
      if (h.contains(key) && !h[key].is_null()) hull[key] = rate_to_json(parse_rate(h[key], std::string("hull.") + key));
    }
  }
  out["hull"] = hull;

  Json numerics = default_numerics();
  if (raw.contains("numerics")) numerics = merge(numerics, raw["numerics"], "numerics");
  if (overrides.seed) numerics["pair_grid"]["seed"] = *overrides.seed;
  if (overrides.window_scale) {
    const double k = *overrides.window_scale;
    if (!(k > 0.0) || !std::isfinite(k)) throw UsageError("--window-scale", "must be a positive number");
    numerics["weak_comparison"]["window_initial"] = numerics["weak_comparison"]["window_initial"].get<double>() * k;
    numerics["strong_comparison"]["ratio_initial"] = numerics["strong_comparison"]["ratio_initial"].get<double>() * k;
    numerics["bohl"]["window_initial"] = numerics["bohl"]["window_initial"].get<double>() * k;
    numerics["fit"]["window_initial"] = numerics["fit"]["window_initial"].get<double>() * k;
    numerics["pair_grid"]["half_width"] = numerics["pair_grid"]["half_width"].get<double>() * k;
    numerics["pair_grid"]["max_separation"] = numerics["pair_grid"]["max_separation"].get<double>() * k;
  }
  const std::string method = numerics["evolution"]["method"].get<std::string>();
  if (method != "ClosedForm" && method != "Quadrature" && method != "RungeKutta") {
    throw UsageError("numerics.evolution.method", "expected ClosedForm, Quadrature or RungeKutta");
  }
  out["numerics"] = numerics;

  Json output{{"dir", "."}, {"format", "json"}};
  if (raw.contains("output")) output = merge(output, raw["output"], "output");
  if (overrides.out) output["dir"] = *overrides.out;
  if (overrides.format) output["format"] = *overrides.format;
  const std::string fmt = output["format"].get<std::string>();
  if (fmt != "json" && fmt != "json+csv") throw UsageError("output.format", "expected \"json\" or \"json+csv\"");
  out["output"] = output;
  return out;
}

EvolutionMethod evolution_method(const Json& numerics) {
  const std::string m = numerics.at("evolution").at("method").get<std::string>();
  if (m == "Quadrature") return EvolutionMethod::Quadrature;
  if (m == "RungeKutta") return EvolutionMethod::RungeKutta;
  return EvolutionMethod::ClosedForm;
}

EvolutionOptions evolution_options(const Json& numerics) {
  const Json& e = numerics.at("evolution");
  EvolutionOptions o;
  o.step = e.at("step").get<double>();
  o.panel = e.at("panel").get<double>();
  o.horizon = e.at("horizon").get<double>();
  o.richardson = e.at("richardson").get<bool>();
  return o;
}

PairGridShape pair_grid_options(const Json& numerics) {
  const Json& g = numerics.at("pair_grid");
  PairGridShape s;
  s.half_width = g.at("half_width").get<double>();
  s.anchor_spacing = g.at("anchor_spacing").get<double>();
  s.fine_offsets = g.at("fine_offsets").get<int>();
  s.fine_limit = g.at("fine_limit").get<double>();
  s.offsets_per_doubling = g.at("offsets_per_doubling").get<int>();
  s.max_separation = g.at("max_separation").get<double>();
  s.seed = g.at("seed").get<std::uint64_t>();
  return s;
}

VerifyOptions verify_options(const Json& numerics, const LinearSystem& system) {
  VerifyOptions v;
  v.method = evolution_method(numerics);
  v.evolution = evolution_options(numerics);
  const bool closed = v.method == EvolutionMethod::ClosedForm && system.is_closed_form();
  v.tolerance = numerics.at(closed ? "verify_tolerance_closed_form" : "verify_tolerance_numeric").get<double>();
  return v;
}

WeakComparisonOptions weak_options(const Json& numerics) {
  const Json& w = numerics.at("weak_comparison");
  WeakComparisonOptions o;
  o.window = {w.at("window_initial").get<double>(), w.at("window_stages").get<int>()};
  o.core_intervals = w.at("core_intervals").get<int>();
  o.plateau_tolerance = w.at("plateau_tolerance").get<double>();
  o.divergence_threshold = w.at("divergence_threshold").get<double>();
  return o;
}

StrongComparisonOptions strong_options(const Json& numerics) {
  const Json& s = numerics.at("strong_comparison");
  StrongComparisonOptions o;
  o.weak = weak_options(numerics);
  o.ratio_initial = s.at("ratio_initial").get<double>();
  o.ratio_max_stages = s.at("ratio_max_stages").get<int>();
  o.core_intervals = s.at("core_intervals").get<int>();
  o.shell_points = s.at("shell_points").get<int>();
  o.decay_threshold = s.at("decay_threshold").get<double>();
  o.settle_tolerance = s.at("settle_tolerance").get<double>();
  return o;
}

ClassifyOptions classify_options(const Json& numerics) {
  ClassifyOptions o;
  o.slow_exponents = numerics.at("classify").at("slow_exponents").get<std::vector<double>>();
  o.fast_exponents = numerics.at("classify").at("fast_exponents").get<std::vector<double>>();
  o.weak = weak_options(numerics);
  return o;
}

TranslatedLimitOptions limit_probe_options(const Json& numerics) {
  const Json& l = numerics.at("limit_probe");
  TranslatedLimitOptions o;
  o.stabilization_tolerance = l.at("stabilization_tolerance").get<double>();
  o.divergence_threshold = l.at("divergence_threshold").get<double>();
  return o;
}

FitOptions fit_options(const Json& numerics, const LinearSystem& system) {
  const Json& f = numerics.at("fit");
  FitOptions o;
  o.shape = pair_grid_options(numerics);
  o.window = {f.at("window_initial").get<double>(), f.at("window_stages").get<int>()};
  o.plateau_tolerance = f.at("plateau_tolerance").get<double>();
  o.verify = verify_options(numerics, system);
  return o;
}

BohlOptions bohl_options(const Json& numerics) {
  const Json& b = numerics.at("bohl");
  BohlOptions o;
  o.window = {b.at("window_initial").get<double>(), b.at("window_stages").get<int>()};
  o.core_intervals = b.at("core_intervals").get<int>();
  o.shell_points = b.at("shell_points").get<int>();
  o.min_log_separation = b.at("min_log_separation").get<double>();
  o.infinity_threshold = b.at("infinity_threshold").get<double>();
  o.method = evolution_method(numerics);
  o.evolution = evolution_options(numerics);
  return o;
}

SubbundleOptions subbundle_options(const Json& numerics) {
  const Json& s = numerics.at("subbundle");
  SubbundleOptions o;
  o.threshold = s.at("threshold").get<double>();
  o.samples = s.at("samples").get<int>();
  o.method = evolution_method(numerics);
  o.evolution = evolution_options(numerics);
  return o;
}

ClassificationConfig hull_config(const Json& numerics, const LinearSystem& system) {
  const Json& h = numerics.at("hull");
  ClassificationConfig c;
  c.verify_grid = pair_grid_options(numerics);
  c.verify = verify_options(numerics, system);
  c.rate_classes = classify_options(numerics);
  c.compact_radius = h.at("compact_radius").get<double>();
  c.grid_points = h.at("grid_points").get<int>();
  c.schedule_first = h.at("schedule_first").get<int>();
  c.schedule_last = h.at("schedule_last").get<int>();
  c.cauchy_tolerance = h.at("cauchy_tolerance").get<double>();
  c.divergence_threshold = h.at("divergence_threshold").get<double>();
  c.integrability_window = h.at("integrability_window").get<double>();
  c.integrability.absolute_tolerance = h.at("integrability_abs_tolerance").get<double>();
  c.integrability.plateau_tolerance = h.at("integrability_plateau_tolerance").get<double>();
  c.spectrum = bohl_options(numerics);
  c.limit_spectrum = bohl_options(numerics);
  c.limit_spectrum.window.stages = numerics.at("bohl").at("limit_window_stages").get<int>();
  c.spectrum_tolerance = h.at("spectrum_tolerance").get<double>();
  c.bounded_horizon = h.at("bounded_horizon").get<double>();
  return c;
}

}  // namespace growthdyn
