#include "growthdyn/linear_system.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <numbers>
#include <sstream>

#include "growthdyn/errors.hpp"

namespace growthdyn {

namespace {

constexpr double kOverflowGuard = 1e300;

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

std::vector<double> merged_kinks(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// Breakpoints of [lo, hi] (lo < hi) with every kink strictly inside.
std::vector<double> segments(double lo, double hi, const std::vector<double>& kinks) {
  std::vector<double> out{lo};
  auto it = std::upper_bound(kinks.begin(), kinks.end(), lo);
  for (; it != kinks.end() && *it < hi; ++it) out.push_back(*it);
  out.push_back(hi);
  return out;
}

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr std::array<double, 4> kGlNodes{0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
                                         0.9602898564975363};
constexpr std::array<double, 4> kGlWeights{0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                           0.1012285362903763};

double gauss_legendre(const ScalarFn& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
    sum += kGlWeights[i] * (f(mid - half * kGlNodes[i]) + f(mid + half * kGlNodes[i]));
  }
  return half * sum;
}

// RK4 for l' = a(t) on a smooth segment.
double rk4_scalar(const ScalarFn& f, double a, double b, double step) {
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / step - 1e-9)));
  const double h = (b - a) / n;
  double sum = 0.0;
  double f0 = f(a);
  for (int i = 0; i < n; ++i) {
    const double t = a + i * h;
    const double f2 = f(t + h);
    sum += h / 6.0 * (f0 + 4.0 * f(t + 0.5 * h) + f2);
    f0 = f2;
  }
  return sum;
}

}  // namespace

LinearSystem LinearSystem::scalar(ScalarPart part, std::string label) {
  if (!part.coefficient) throw ParameterError("scalar system needs a coefficient");
  LinearSystem sys;
  sys.kind_ = SystemKind::Scalar;
  sys.dimension_ = 1;
  sys.label_ = label.empty() ? part.name : std::move(label);
  std::sort(part.kinks.begin(), part.kinks.end());
  sys.parts_.push_back(std::move(part));
  return sys;
}

LinearSystem LinearSystem::diagonal(std::vector<ScalarPart> parts, std::string label) {
  if (parts.empty()) throw ParameterError("diagonal system needs at least one entry");
  LinearSystem sys;
  sys.kind_ = parts.size() == 1 ? SystemKind::Scalar : SystemKind::Diagonal;
  sys.dimension_ = static_cast<int>(parts.size());
  if (label.empty()) {
    label = "diag(";
    for (std::size_t i = 0; i < parts.size(); ++i) label += (i ? ", " : "") + parts[i].name;
    label += ")";
  }
  sys.label_ = std::move(label);
  for (auto& p : parts) {
    if (!p.coefficient) throw ParameterError("diagonal entry needs a coefficient");
    std::sort(p.kinks.begin(), p.kinks.end());
  }
  sys.parts_ = std::move(parts);
  return sys;
}

LinearSystem LinearSystem::matrix(int dimension, MatrixFn coefficient, std::vector<double> kinks,
                                  std::string label) {
  if (dimension < 1) throw ParameterError("system dimension must be >= 1");
  if (!coefficient) throw ParameterError("matrix system needs a coefficient");
  LinearSystem sys;
  sys.kind_ = SystemKind::Matrix;
  sys.dimension_ = dimension;
  sys.label_ = label.empty() ? "matrix" : std::move(label);
  sys.matrix_ = std::move(coefficient);
  std::sort(kinks.begin(), kinks.end());
  sys.matrix_kinks_ = std::move(kinks);
  return sys;
}

bool LinearSystem::is_closed_form() const {
  if (kind_ == SystemKind::Matrix) return false;
  return std::all_of(parts_.begin(), parts_.end(), [](const ScalarPart& p) { return p.antiderivative.has_value(); });
}

Eigen::MatrixXd LinearSystem::coefficient(double t) const {
  if (kind_ == SystemKind::Matrix) {
    Eigen::MatrixXd a = matrix_(t);
    if (a.rows() != dimension_ || a.cols() != dimension_) {
      throw InputError("matrix coefficient returned the wrong shape");
    }
    return a;
  }
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dimension_, dimension_);
  for (int i = 0; i < dimension_; ++i) a(i, i) = parts_[i].coefficient(t);
  return a;
}

std::vector<double> LinearSystem::kinks() const {
  if (kind_ == SystemKind::Matrix) return matrix_kinks_;
  std::vector<double> out;
  for (const auto& p : parts_) out = merged_kinks(std::move(out), p.kinks);
  return out;
}

std::optional<double> LinearSystem::period() const {
  if (kind_ == SystemKind::Matrix || parts_.empty()) return std::nullopt;
  const auto first = parts_.front().period;
  if (!first) return std::nullopt;
  for (const auto& p : parts_) {
    if (!p.period || std::abs(*p.period - *first) > 1e-12 * *first) return std::nullopt;
  }
  return first;
}

namespace catalog {

ScalarPart constant(double c) {
  if (!std::isfinite(c)) throw ParameterError("constant coefficient must be finite");
  ScalarPart p;
  std::ostringstream name;
  name << "constant(" << c << ")";
  p.name = name.str();
  p.params = {{"c", c}};
  p.coefficient = [c](double) { return c; };
  p.antiderivative = ScalarFn([c](double t) { return c * t; });
  p.period = 1.0;
  return p;
}

ScalarPart inverse_linear() {
  ScalarPart p;
  p.name = "inverse_linear";
  p.coefficient = [](double t) { return 1.0 / (1.0 + std::abs(t)); };
  p.antiderivative = ScalarFn([](double t) { return sgn(t) * std::log1p(std::abs(t)); });
  p.kinks = {0.0};
  return p;
}

ScalarPart abs_linear(double k) {
  if (!std::isfinite(k)) throw ParameterError("abs_linear slope must be finite");
  ScalarPart p;
  std::ostringstream name;
  name << "abs_linear(" << k << ")";
  p.name = name.str();
  p.params = {{"k", k}};
  p.coefficient = [k](double t) { return k * std::abs(t); };
  p.antiderivative = ScalarFn([k](double t) { return 0.5 * k * t * std::abs(t); });
  p.kinks = {0.0};
  return p;
}

ScalarPart damped_sine(double lambda, double eta) {
  if (!std::isfinite(lambda) || !std::isfinite(eta)) throw ParameterError("damped_sine parameters must be finite");
  ScalarPart p;
  std::ostringstream name;
  name << "damped_sine(" << lambda << ", " << eta << ")";
  p.name = name.str();
  p.params = {{"lambda", lambda}, {"eta", eta}};
  p.coefficient = [lambda, eta](double t) { return -(lambda + eta * t * std::sin(t)); };
  p.antiderivative =
      ScalarFn([lambda, eta](double t) { return -lambda * t - eta * (std::sin(t) - t * std::cos(t)); });
  return p;
}

ScalarPart cosine(double c, double amp, double freq) {
  if (!(freq > 0.0) || !std::isfinite(c) || !std::isfinite(amp)) {
    throw ParameterError("cosine needs finite c, amp and freq > 0");
  }
  ScalarPart p;
  std::ostringstream name;
  name << "cosine(" << c << ", " << amp << ", " << freq << ")";
  p.name = name.str();
  p.params = {{"c", c}, {"amp", amp}, {"freq", freq}};
  p.coefficient = [c, amp, freq](double t) { return c + amp * std::cos(freq * t); };
  p.antiderivative = ScalarFn([c, amp, freq](double t) { return c * t + amp * std::sin(freq * t) / freq; });
  p.period = 2.0 * std::numbers::pi / freq;
  return p;
}

LinearSystem zero(int dimension) {
  if (dimension < 1) throw ParameterError("system dimension must be >= 1");
  std::vector<ScalarPart> parts;
  for (int i = 0; i < dimension; ++i) {
    auto p = constant(0.0);
    p.name = "zero";
    parts.push_back(std::move(p));
  }
  return LinearSystem::diagonal(std::move(parts), dimension == 1 ? "zero" : "zero(" + std::to_string(dimension) + ")");
}

namespace {

double param(const std::map<std::string, double>& params, const std::string& key, std::optional<double> fallback,
             const std::string& name) {
  auto it = params.find(key);
  if (it != params.end()) return it->second;
  if (fallback) return *fallback;
  throw InputError("catalog system '" + name + "' needs parameter '" + key + "'");
}

void check_keys(const std::map<std::string, double>& params, std::initializer_list<const char*> allowed,
                const std::string& name) {
  for (const auto& [key, value] : params) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw InputError("catalog system '" + name + "' has no parameter '" + key + "'");
    }
  }
}

}  // namespace

ScalarPart by_name(const std::string& name, const std::map<std::string, double>& params) {
  if (name == "constant") {
    check_keys(params, {"c"}, name);
    return constant(param(params, "c", std::nullopt, name));
  }
  if (name == "zero") {
    check_keys(params, {}, name);
    auto p = constant(0.0);
    p.name = "zero";
    return p;
  }
  if (name == "inverse_linear") {
    check_keys(params, {}, name);
    return inverse_linear();
  }
  if (name == "abs_linear") {
    check_keys(params, {"k"}, name);
    return abs_linear(param(params, "k", 2.0, name));
  }
  if (name == "damped_sine") {
    check_keys(params, {"lambda", "eta"}, name);
    return damped_sine(param(params, "lambda", 1.0, name), param(params, "eta", 0.2, name));
  }
  if (name == "cosine") {
    check_keys(params, {"c", "amp", "freq"}, name);
    return cosine(param(params, "c", 0.0, name), param(params, "amp", 1.0, name), param(params, "freq", 1.0, name));
  }
  throw InputError("unknown catalog system '" + name + "'");
}

std::vector<std::string> names() {
  return {"constant", "zero", "inverse_linear", "abs_linear", "damped_sine", "cosine"};
}

}  // namespace catalog

namespace {

struct Table {
  std::vector<double> t;
  std::vector<double> v;
  double operator()(double x) const {
    if (x <= t.front()) return v.front();
    if (x >= t.back()) return v.back();
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * v[i - 1] + w * v[i];
  }
};

}  // namespace

LinearSystem from_samples(const std::vector<double>& times, const std::vector<std::vector<double>>& entries,
                          std::string label) {
  if (times.size() < 2 || entries.size() != times.size()) {
    throw InputError("tabulated system needs at least two rows of equal width");
  }
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || (i > 0 && times[i] <= times[i - 1])) {
      throw InputError("tabulated times must be finite and strictly increasing");
    }
  }
  const std::size_t m = entries.front().size();
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
  if (m == 0 || static_cast<std::size_t>(n * n) != m) {
    throw InputError("tabulated rows must hold N*N matrix entries after the time column");
  }
  for (const auto& row : entries) {
    if (row.size() != m) throw InputError("tabulated rows must all have the same width");
    for (double x : row) {
      if (!std::isfinite(x)) throw InputError("tabulated entries must be finite");
    }
  }
  if (label.empty()) label = "tabulated";

  bool decoupled = true;
  for (const auto& row : entries) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (i != j && row[static_cast<std::size_t>(i * n + j)] != 0.0) decoupled = false;
      }
    }
  }

  auto column = [&](std::size_t k) {
    Table tab{times, {}};
    for (const auto& row : entries) tab.v.push_back(row[k]);
    return tab;
  };

  if (decoupled) {
    std::vector<ScalarPart> parts;
    for (int i = 0; i < n; ++i) {
      ScalarPart p;
      p.name = n == 1 ? label : label + "[" + std::to_string(i) + "]";
      p.coefficient = column(static_cast<std::size_t>(i * n + i));
      p.kinks = times;
      parts.push_back(std::move(p));
    }
    return LinearSystem::diagonal(std::move(parts), label);
  }

  auto tables = std::make_shared<std::vector<Table>>();
  for (std::size_t k = 0; k < m; ++k) tables->push_back(column(k));
  MatrixFn fn = [tables, n](double t) {
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = (*tables)[static_cast<std::size_t>(i * n + j)](t);
    }
    return a;
  };
  return LinearSystem::matrix(n, std::move(fn), times, label);
}

LinearSystem read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open coefficient table '" + path + "'");
  std::vector<double> times;
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (times.empty() && rows.empty()) continue;  // header
      throw InputError(path + ":" + std::to_string(line_no) + ": non-numeric cell");
    }
    if (values.size() < 2) throw InputError(path + ":" + std::to_string(line_no) + ": need t and matrix entries");
    times.push_back(values.front());
    rows.emplace_back(values.begin() + 1, values.end());
  }
  return from_samples(times, rows, path);
}

LinearSystem translate_system(const LinearSystem& system, double tau) {
  if (!std::isfinite(tau)) throw DomainError("translation tau must be finite");
  if (tau == 0.0) return system;
  std::ostringstream label;
  label << "translate(" << system.label() << ", " << tau << ")";
  if (system.kind() == SystemKind::Matrix) {
    auto kinks = system.kinks();
    for (double& k : kinks) k -= tau;
    MatrixFn fn = [system, tau](double t) { return system.coefficient(t + tau); };
    return LinearSystem::matrix(system.dimension(), std::move(fn), std::move(kinks), label.str());
  }
  std::vector<ScalarPart> parts;
  for (const auto& src : system.parts()) {
    ScalarPart p = src;
    p.coefficient = [f = src.coefficient, tau](double t) { return f(t + tau); };
    if (src.antiderivative) {
      p.antiderivative = ScalarFn([F = *src.antiderivative, tau](double t) { return F(t + tau); });
    }
    for (double& k : p.kinks) k -= tau;
    parts.push_back(std::move(p));
  }
  return LinearSystem::diagonal(std::move(parts), label.str());
}

LinearSystem shift_system(const LinearSystem& system, const GrowthRate& rate, double gamma) {
  if (!std::isfinite(gamma)) throw DomainError("shift gamma must be finite");
  if (gamma == 0.0) return system;
  std::ostringstream label;
  label << "shift(" << system.label() << ", " << rate.describe() << ", " << gamma << ")";
  const auto rate_kinks = rate.kinks();
  if (system.kind() == SystemKind::Matrix) {
    const int n = system.dimension();
    MatrixFn fn = [system, rate, gamma, n](double t) {
      return Eigen::MatrixXd(system.coefficient(t) - gamma * rate.log_derivative(t) * Eigen::MatrixXd::Identity(n, n));
    };
    return LinearSystem::matrix(n, std::move(fn), merged_kinks(system.kinks(), rate_kinks), label.str());
  }
  std::vector<ScalarPart> parts;
  for (const auto& src : system.parts()) {
    ScalarPart p = src;
    p.name = "shift(" + src.name + ")";
    p.coefficient = [f = src.coefficient, rate, gamma](double t) { return f(t) - gamma * rate.log_derivative(t); };
    if (src.antiderivative) {
      p.antiderivative =
          ScalarFn([F = *src.antiderivative, rate, gamma](double t) { return F(t) - gamma * rate.log_eval(t); });
    }
    p.kinks = merged_kinks(src.kinks, rate_kinks);
    if (!rate.is_exponential_family()) p.period.reset();
    parts.push_back(std::move(p));
  }
  return LinearSystem::diagonal(std::move(parts), label.str());
}

std::string to_string(EvolutionMethod method) {
  switch (method) {
    case EvolutionMethod::ClosedForm: return "ClosedForm";
    case EvolutionMethod::Quadrature: return "Quadrature";
    case EvolutionMethod::RungeKutta: return "RungeKutta";
  }
  return "?";
}

EvolutionOperator::EvolutionOperator(LinearSystem system, EvolutionMethod method, EvolutionOptions options)
    : system_(std::move(system)), method_(method), options_(options) {
  if (!(options_.step > 0.0) || !(options_.panel > 0.0) || !(options_.horizon > 0.0)) {
    throw ParameterError("evolution step, panel and horizon must be positive");
  }
}

double EvolutionOperator::scalar_integral(const ScalarPart& part, double a, double b) const {
  if (a == b) return 0.0;
  if (method_ == EvolutionMethod::ClosedForm && part.antiderivative) {
    return (*part.antiderivative)(b) - (*part.antiderivative)(a);
  }
  const double sign = b > a ? 1.0 : -1.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  const auto cuts = segments(lo, hi, part.kinks);

  auto integrate = [&](double step) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double x0 = cuts[i], x1 = cuts[i + 1];
      if (method_ == EvolutionMethod::RungeKutta) {
        sum += rk4_scalar(part.coefficient, x0, x1, step);
      } else {
        const int n = std::max(1, static_cast<int>(std::ceil((x1 - x0) / step - 1e-9)));
        const double h = (x1 - x0) / n;
        for (int k = 0; k < n; ++k) sum += gauss_legendre(part.coefficient, x0 + k * h, x0 + (k + 1) * h);
      }
    }
    return sum;
  };
  const double step = method_ == EvolutionMethod::RungeKutta ? options_.step : options_.panel;
  double value = integrate(step);
  if (options_.richardson && method_ == EvolutionMethod::RungeKutta) {
    value = (16.0 * integrate(0.5 * step) - value) / 15.0;
  }
  return sign * value;
}

Eigen::MatrixXd EvolutionOperator::integrate_matrix(double t, double s, double step) const {
  const int n = system_.dimension();
  Eigen::MatrixXd x = Eigen::MatrixXd::Identity(n, n);
  if (t == s) return x;
  if (std::abs(t - s) > options_.horizon) {
    throw ParameterError("|t - s| exceeds the integration horizon for general matrix systems");
  }
  const double lo = std::min(s, t), hi = std::max(s, t);
  auto cuts = segments(lo, hi, system_.kinks());
  if (t < s) std::reverse(cuts.begin(), cuts.end());
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    const int steps = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / step - 1e-9)));
    const double h = (b - a) / steps;
    for (int k = 0; k < steps; ++k) {
      const double u = a + k * h;
      const Eigen::MatrixXd a0 = system_.coefficient(u);
      const Eigen::MatrixXd am = system_.coefficient(u + 0.5 * h);
      const Eigen::MatrixXd a1 = system_.coefficient(u + h);
      const Eigen::MatrixXd k1 = a0 * x;
      const Eigen::MatrixXd k2 = am * (x + 0.5 * h * k1);
      const Eigen::MatrixXd k3 = am * (x + 0.5 * h * k2);
      const Eigen::MatrixXd k4 = a1 * (x + h * k3);
      x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double big = x.cwiseAbs().maxCoeff();
      if (!std::isfinite(big) || big > kOverflowGuard) {
        throw OverflowError(
            "evolution operator overflowed; use a scalar/diagonal system (log-space) or a shorter window");
      }
    }
  }
  return x;
}

Eigen::VectorXd EvolutionOperator::log_components(double t, double s) const {
  if (!std::isfinite(t) || !std::isfinite(s)) throw DomainError("evolution times must be finite");
  if (!system_.is_decoupled()) throw UnsupportedError("log_components needs a scalar or diagonal system");
  Eigen::VectorXd out(system_.dimension());
  for (int i = 0; i < system_.dimension(); ++i) out(i) = scalar_integral(system_.parts()[i], s, t);
  return out;
}

Eigen::MatrixXd EvolutionOperator::evaluate(double t, double s) const {
  if (!std::isfinite(t) || !std::isfinite(s)) throw DomainError("evolution times must be finite");
  if (system_.is_decoupled()) {
    const Eigen::VectorXd l = log_components(t, s);
    if (l.maxCoeff() > std::log(kOverflowGuard)) {
      throw OverflowError("Phi(t,s) leaves the double range; use log_norm or log_components");
    }
    return l.array().exp().matrix().asDiagonal();
  }
  if (!options_.richardson) return integrate_matrix(t, s, options_.step);
  const Eigen::MatrixXd coarse = integrate_matrix(t, s, options_.step);
  const Eigen::MatrixXd fine = integrate_matrix(t, s, 0.5 * options_.step);
  return (16.0 * fine - coarse) / 15.0;
}

double EvolutionOperator::log_norm(double t, double s) const {
  if (system_.is_decoupled()) return log_components(t, s).maxCoeff();
  return growthdyn::log_norm(evaluate(t, s));
}

std::vector<Eigen::VectorXd> EvolutionOperator::primitives(const std::vector<double>& sorted_points) const {
  if (!system_.is_decoupled()) throw UnsupportedError("primitives need a scalar or diagonal system");
  const int n = system_.dimension();
  std::vector<Eigen::VectorXd> out(sorted_points.size(), Eigen::VectorXd::Zero(n));
  for (int i = 0; i < n; ++i) {
    const auto& part = system_.parts()[i];
    if (method_ == EvolutionMethod::ClosedForm && part.antiderivative) {
      for (std::size_t k = 0; k < sorted_points.size(); ++k) out[k](i) = (*part.antiderivative)(sorted_points[k]);
      continue;
    }
    for (std::size_t k = 1; k < sorted_points.size(); ++k) {
      out[k](i) = out[k - 1](i) + scalar_integral(part, sorted_points[k - 1], sorted_points[k]);
    }
  }
  return out;
}

std::vector<Eigen::MatrixXd> EvolutionOperator::sweep_from(double s, const std::vector<double>& targets) const {
  std::vector<Eigen::MatrixXd> out(targets.size());
  if (system_.is_decoupled()) {
    for (std::size_t k = 0; k < targets.size(); ++k) out[k] = evaluate(targets[k], s);
    return out;
  }
  // Visit targets outward from s in each direction, reusing the last state.
  std::vector<std::size_t> order(targets.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return targets[a] < targets[b]; });
  const int n = system_.dimension();
  auto walk = [&](auto begin, auto end) {
    double at = s;
    Eigen::MatrixXd state = Eigen::MatrixXd::Identity(n, n);
    for (auto it = begin; it != end; ++it) {
      const double t = targets[*it];
      if (std::abs(t - s) > options_.horizon) {
        throw ParameterError("|t - s| exceeds the integration horizon for general matrix systems");
      }
      state = evaluate(t, at) * state;
      at = t;
      out[*it] = state;
    }
  };
  auto split = std::partition_point(order.begin(), order.end(), [&](std::size_t k) { return targets[k] < s; });
  walk(split, order.end());
  walk(std::make_reverse_iterator(split), order.rend());
  return out;
}

double log_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return -std::numeric_limits<double>::infinity();
  double n;
  if (m.rows() == 1 && m.cols() == 1) {
    n = std::abs(m(0, 0));
  } else {
    n = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
  }
  return n > 0.0 ? std::log(n) : -std::numeric_limits<double>::infinity();
}

double log_norm_scaled(const Eigen::VectorXd& log_diagonal, const Eigen::MatrixXd& m) {
  const double top = log_diagonal.maxCoeff();
  const Eigen::VectorXd scale = (log_diagonal.array() - top).exp().matrix();
  return top + log_norm(scale.asDiagonal() * m);
}

}  // namespace growthdyn
