#include "growthdyn/growth_rate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "growthdyn/errors.hpp"
#include "growthdyn/grids.hpp"

namespace growthdyn {

struct GrowthRate::Node {
  RateKind kind;
  double parameter = 1.0;  // r, k or tau depending on kind
  std::optional<GrowthRate> base;
};

namespace {

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

void require_finite(double t, const char* what) {
  if (!std::isfinite(t)) throw DomainError(std::string(what) + " must be finite");
}

}  // namespace

GrowthRate::GrowthRate(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

GrowthRate GrowthRate::exponential() {
  return GrowthRate(std::make_shared<const Node>(Node{RateKind::Exponential, 1.0, std::nullopt}));
}

GrowthRate GrowthRate::polynomial() {
  return GrowthRate(std::make_shared<const Node>(Node{RateKind::Polynomial, 1.0, std::nullopt}));
}

GrowthRate GrowthRate::superexponential(double r) {
  if (!(r > 1.0) || !std::isfinite(r)) throw ParameterError("superexponential exponent must be > 1");
  return GrowthRate(std::make_shared<const Node>(Node{RateKind::Superexponential, r, std::nullopt}));
}

GrowthRate GrowthRate::subexponential(double r) {
  if (!(r > 0.0 && r < 1.0)) throw ParameterError("subexponential exponent must lie in (0, 1)");
  return GrowthRate(std::make_shared<const Node>(Node{RateKind::Subexponential, r, std::nullopt}));
}

GrowthRate GrowthRate::translated(double tau) const {
  require_finite(tau, "translation tau");
  if (tau == 0.0 || is_exponential_family()) return *this;
  if (node_->kind == RateKind::Translated) {
    // (mu_a)_b = mu_{a+b}
    return node_->base->translated(node_->parameter + tau);
  }
  return GrowthRate(std::make_shared<const Node>(Node{RateKind::Translated, tau, *this}));
}

GrowthRate GrowthRate::power(double k) const {
  if (!(k > 0.0) || !std::isfinite(k)) throw ParameterError("power exponent must be positive and finite");
  if (k == 1.0) return *this;
  if (node_->kind == RateKind::Power) return node_->base->power(node_->parameter * k);
  return GrowthRate(std::make_shared<const Node>(Node{RateKind::Power, k, *this}));
}

RateKind GrowthRate::kind() const { return node_->kind; }

double GrowthRate::exponent() const {
  switch (node_->kind) {
    case RateKind::Superexponential:
    case RateKind::Subexponential:
    case RateKind::Power:
      return node_->parameter;
    default:
      return 1.0;
  }
}

double GrowthRate::shift() const { return node_->kind == RateKind::Translated ? node_->parameter : 0.0; }

const GrowthRate& GrowthRate::base() const {
  if (!node_->base) throw ParameterError("catalog growth rates have no base rate");
  return *node_->base;
}

bool GrowthRate::is_exponential_family() const {
  if (node_->kind == RateKind::Exponential) return true;
  if (node_->kind == RateKind::Power) return node_->base->is_exponential_family();
  return false;
}

double GrowthRate::log_eval(double t) const {
  const double a = std::abs(t);
  switch (node_->kind) {
    case RateKind::Exponential:
      return t;
    case RateKind::Polynomial:
      return sgn(t) * std::log1p(a);
    case RateKind::Superexponential:
      return sgn(t) * std::pow(a, node_->parameter);
    case RateKind::Subexponential:
      return sgn(t) * std::expm1(node_->parameter * std::log1p(a));
    case RateKind::Translated: {
      const double tau = node_->parameter;
      return node_->base->log_eval(t + tau) - node_->base->log_eval(tau);
    }
    case RateKind::Power:
      return node_->parameter * node_->base->log_eval(t);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double GrowthRate::log_derivative(double t) const {
  const double a = std::abs(t);
  const double r = node_->parameter;
  switch (node_->kind) {
    case RateKind::Exponential:
      return 1.0;
    case RateKind::Polynomial:
      return 1.0 / (1.0 + a);
    case RateKind::Superexponential:
      return a == 0.0 ? 0.0 : r * std::pow(a, r - 1.0);
    case RateKind::Subexponential:
      return r * std::pow(1.0 + a, r - 1.0);
    case RateKind::Translated:
      return node_->base->log_derivative(t + r);
    case RateKind::Power:
      return r * node_->base->log_derivative(t);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<double> GrowthRate::kinks() const {
  switch (node_->kind) {
    case RateKind::Exponential:
      return {};
    case RateKind::Polynomial:
    case RateKind::Superexponential:
    case RateKind::Subexponential:
      return {0.0};
    case RateKind::Translated: {
      auto k = node_->base->kinks();
      for (double& x : k) x -= node_->parameter;
      return k;
    }
    case RateKind::Power:
      return node_->base->kinks();
  }
  return {};
}

std::string GrowthRate::describe() const {
  std::ostringstream out;
  switch (node_->kind) {
    case RateKind::Exponential:
      out << "exp";
      break;
    case RateKind::Polynomial:
      out << "p";
      break;
    case RateKind::Superexponential:
      out << "s_" << node_->parameter;
      break;
    case RateKind::Subexponential:
      out << "u_" << node_->parameter;
      break;
    case RateKind::Translated:
      out << "translate(" << node_->base->describe() << ", " << node_->parameter << ")";
      break;
    case RateKind::Power:
      out << "(" << node_->base->describe() << ")^" << node_->parameter;
      break;
  }
  return out.str();
}

double eval_log(const GrowthRate& rate, double t) {
  require_finite(t, "time t");
  return rate.log_eval(t);
}

GrowthRate translate(const GrowthRate& rate, double tau) { return rate.translated(tau); }

std::vector<double> WindowSchedule::windows() const {
  if (!(initial > 0.0) || !std::isfinite(initial)) throw ParameterError("window initial size must be positive");
  if (stages < 1) throw ParameterError("window schedule needs at least one stage");
  std::vector<double> out;
  for (int k = 0; k < stages; ++k) out.push_back(initial * std::exp2(k));
  return out;
}

double WindowSchedule::final_window() const { return windows().back(); }

std::string to_string(Relation relation) {
  switch (relation) {
    case Relation::WeaklyFaster: return "WeaklyFaster";
    case Relation::WeaklySlower: return "WeaklySlower";
    case Relation::Faster: return "Faster";
    case Relation::Slower: return "Slower";
    case Relation::Incomparable: return "Incomparable";
    case Relation::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string to_string(RateClassKind kind) {
  switch (kind) {
    case RateClassKind::Slow: return "Slow";
    case RateClassKind::Fast: return "Fast";
    case RateClassKind::ExponentialLike: return "ExponentialLike";
    case RateClassKind::Unclassified: return "Unclassified";
  }
  return "?";
}

std::string to_string(LimitKind kind) {
  switch (kind) {
    case LimitKind::FinitePositive: return "FinitePositive";
    case LimitKind::DivergesToInfinity: return "DivergesToInfinity";
    case LimitKind::DecaysToZero: return "DecaysToZero";
    case LimitKind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

void check_schedule(const WindowSchedule& window) {
  if (!(window.initial > 0.0)) throw ParameterError("degenerate comparison window (T <= 0)");
  if (window.stages < 3) throw ParameterError("comparison window needs at least 3 doubling stages");
}

// Largest rise max_{s <= t} f(t) - f(s) on grid[lo, hi).
double max_rise(const std::vector<double>& f, std::size_t lo, std::size_t hi) {
  double best = 0.0;
  double running_min = f[lo];
  for (std::size_t i = lo; i < hi; ++i) {
    running_min = std::min(running_min, f[i]);
    best = std::max(best, f[i] - running_min);
  }
  return best;
}

struct StageSeries {
  std::vector<double> values;
  bool plateau(double tol) const { return values.back() - values[values.size() - 2] < tol; }
  bool diverges(double threshold) const {
    return values.back() > threshold && values.back() > values[values.size() - 2];
  }
};

}  // namespace

ComparisonVerdict compare_weak(const GrowthRate& mu, const GrowthRate& sigma,
                               const WeakComparisonOptions& options) {
  check_schedule(options.window);
  const auto windows = options.window.windows();
  const auto grid = nested_uniform_grid(options.window.initial, windows.back(), options.core_intervals);

  // f = log sigma - log mu; sup_{t>=s} f(t) - f(s) bounds log M for mu weakly faster.
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = sigma.log_eval(grid[i]) - mu.log_eval(grid[i]);
  std::vector<double> g(f.size());
  std::transform(f.begin(), f.end(), g.begin(), [](double v) { return -v; });

  StageSeries forward, reverse;
  std::size_t points = 0;
  for (double w : windows) {
    const auto [lo, hi] = window_range(grid, w);
    forward.values.push_back(max_rise(f, lo, hi));
    reverse.values.push_back(max_rise(g, lo, hi));
    points = hi - lo;
  }

  ComparisonVerdict verdict;
  verdict.evidence.grid_points = points;
  verdict.evidence.window = windows.back();
  verdict.evidence.stage_values = forward.values;
  verdict.evidence.reverse_stage_values = reverse.values;

  if (forward.plateau(options.plateau_tolerance)) {
    verdict.relation = Relation::WeaklyFaster;
    verdict.constant_estimate = forward.values.back();
    verdict.evidence.plateau_slope = forward.values.back() - forward.values[forward.values.size() - 2];
  } else if (reverse.plateau(options.plateau_tolerance)) {
    verdict.relation = Relation::WeaklySlower;
    verdict.constant_estimate = reverse.values.back();
    verdict.evidence.plateau_slope = reverse.values.back() - reverse.values[reverse.values.size() - 2];
  } else {
    verdict.evidence.plateau_slope = forward.values.back() - forward.values[forward.values.size() - 2];
    verdict.relation = forward.diverges(options.divergence_threshold) && reverse.diverges(options.divergence_threshold)
                           ? Relation::Incomparable
                           : Relation::Inconclusive;
  }
  return verdict;
}

namespace {

enum class RatioOutcome { Decayed, Settled, Open };

struct RatioSeries {
  std::vector<double> values;
  std::size_t points = 0;
  double window = 0.0;
  RatioOutcome outcome = RatioOutcome::Open;
};

// sup of dlog sigma / dlog mu over pairs t > s with dlog mu >= half the log-range.
RatioSeries ratio_series(const GrowthRate& mu, const GrowthRate& sigma, const StrongComparisonOptions& o) {
  if (!(o.ratio_initial > 0.0) || o.ratio_max_stages < 3) {
    throw ParameterError("ratio window needs a positive initial size and at least 3 stages");
  }
  const double final_window = o.ratio_initial * std::exp2(o.ratio_max_stages - 1);
  const auto grid = nested_geometric_grid(o.ratio_initial, final_window, o.core_intervals, o.shell_points);
  std::vector<double> lm(grid.size()), ls(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    lm[i] = mu.log_eval(grid[i]);
    ls[i] = sigma.log_eval(grid[i]);
  }

  RatioSeries series;
  for (int k = 0; k < o.ratio_max_stages; ++k) {
    const double w = o.ratio_initial * std::exp2(k);
    const auto [lo, hi] = window_range(grid, w);
    const double threshold = std::max(1.0, 0.5 * (lm[hi - 1] - lm[lo]));
    double best = -std::numeric_limits<double>::infinity();
    std::size_t j_start = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      // lm increases along the grid, so admissible partners form a suffix.
      j_start = std::max(j_start, i + 1);
      while (j_start < hi && lm[j_start] - lm[i] < threshold) ++j_start;
      if (j_start >= hi) break;
      for (std::size_t j = j_start; j < hi; ++j) {
        best = std::max(best, (ls[j] - ls[i]) / (lm[j] - lm[i]));
      }
    }
    series.values.push_back(best);
    series.points = hi - lo;
    series.window = w;

    const std::size_t n = series.values.size();
    if (n >= 3) {
      const double a = series.values[n - 3], b = series.values[n - 2], c = series.values[n - 1];
      const double slack = 1e-12 * std::max(1.0, std::abs(a));
      if (c <= b + slack && b <= a + slack && c < o.decay_threshold) {
        series.outcome = RatioOutcome::Decayed;
        return series;
      }
      const double scale = std::max(1.0, std::abs(c));
      if (c >= o.decay_threshold && std::abs(c - b) <= o.settle_tolerance * scale &&
          std::abs(b - a) <= o.settle_tolerance * scale) {
        series.outcome = RatioOutcome::Settled;
        return series;
      }
    }
  }
  return series;
}

}  // namespace

ComparisonVerdict compare_strong(const GrowthRate& mu, const GrowthRate& sigma,
                                 const StrongComparisonOptions& options) {
  check_schedule(options.weak.window);
  const RatioSeries forward = ratio_series(mu, sigma, options);
  const RatioSeries reverse = ratio_series(sigma, mu, options);

  ComparisonVerdict verdict;
  verdict.evidence.grid_points = std::max(forward.points, reverse.points);
  verdict.evidence.window = std::max(forward.window, reverse.window);
  verdict.evidence.stage_values = forward.values;
  verdict.evidence.reverse_stage_values = reverse.values;
  const auto& fv = forward.values;
  verdict.evidence.plateau_slope = fv.size() >= 2 ? fv.back() - fv[fv.size() - 2] : 0.0;

  if (forward.outcome == RatioOutcome::Decayed) {
    const auto weak = compare_weak(mu, sigma, options.weak);
    if (weak.relation == Relation::WeaklyFaster) {
      verdict.relation = Relation::Faster;
      verdict.constant_estimate = weak.constant_estimate;
      return verdict;
    }
  }
  if (reverse.outcome == RatioOutcome::Decayed) {
    const auto weak = compare_weak(sigma, mu, options.weak);
    if (weak.relation == Relation::WeaklyFaster) {
      verdict.relation = Relation::Slower;
      verdict.constant_estimate = weak.constant_estimate;
      return verdict;
    }
  }
  verdict.relation = forward.outcome == RatioOutcome::Settled && reverse.outcome == RatioOutcome::Settled
                         ? Relation::Incomparable
                         : Relation::Inconclusive;
  return verdict;
}

RateClass classify(const GrowthRate& rate, const ClassifyOptions& options) {
  if (options.slow_exponents.empty() && options.fast_exponents.empty()) {
    throw ParameterError("classify needs a non-empty exponent grid");
  }
  std::vector<double> slow, fast;
  for (double r : options.slow_exponents) {
    if (!(r > 0.0 && r < 1.0)) throw ParameterError("slow exponents must lie in (0, 1)");
    slow.push_back(r);
  }
  for (double r : options.fast_exponents) {
    if (!(r > 1.0)) throw ParameterError("fast exponents must exceed 1");
    fast.push_back(r);
  }
  // Smallest working r and largest working r~ are the strongest statements.
  std::sort(slow.begin(), slow.end());
  std::sort(fast.begin(), fast.end(), std::greater<>());

  std::optional<double> slow_witness, fast_witness;
  for (double r : slow) {
    if (compare_weak(GrowthRate::subexponential(r), rate, options.weak).relation == Relation::WeaklyFaster) {
      slow_witness = r;
      break;
    }
  }
  for (double r : fast) {
    if (compare_weak(rate, GrowthRate::superexponential(r), options.weak).relation == Relation::WeaklyFaster) {
      fast_witness = r;
      break;
    }
  }

  RateClass result;
  if (slow_witness && fast_witness) {
    result.kind = RateClassKind::Unclassified;
    std::ostringstream msg;
    msg << "both slow (r=" << *slow_witness << ") and fast (r=" << *fast_witness
        << ") tests passed; windows too small to separate them";
    result.diagnostic = msg.str();
    return result;
  }
  if (slow_witness) {
    result.kind = RateClassKind::Slow;
    result.witness = slow_witness;
    return result;
  }
  if (fast_witness) {
    result.kind = RateClassKind::Fast;
    result.witness = fast_witness;
    return result;
  }
  const auto exp = GrowthRate::exponential();
  if (compare_weak(rate, exp, options.weak).relation == Relation::WeaklyFaster &&
      compare_weak(exp, rate, options.weak).relation == Relation::WeaklyFaster) {
    result.kind = RateClassKind::ExponentialLike;
    return result;
  }
  result.kind = RateClassKind::Unclassified;
  result.diagnostic = "neither slow, fast nor weakly equivalent to exp on the tested exponents";
  return result;
}

std::vector<double> geometric_schedule(double sign, int first, int last) {
  if (sign == 0.0 || last < first) throw ParameterError("schedule needs a direction and last >= first");
  std::vector<double> out;
  for (int n = first; n <= last; ++n) out.push_back((sign > 0 ? 1.0 : -1.0) * std::exp2(n));
  return out;
}

TranslatedLimitVerdict translated_limit_probe(const GrowthRate& rate, double t,
                                              std::span<const double> tau_schedule,
                                              const TranslatedLimitOptions& options) {
  require_finite(t, "time t");
  if (tau_schedule.size() < 8) throw ParameterError("tau schedule needs at least 8 entries");
  const bool up = tau_schedule[1] > tau_schedule[0];
  for (std::size_t i = 0; i < tau_schedule.size(); ++i) {
    require_finite(tau_schedule[i], "tau");
    if (i > 0 && (up ? tau_schedule[i] <= tau_schedule[i - 1] : tau_schedule[i] >= tau_schedule[i - 1])) {
      throw ParameterError("tau schedule must be strictly monotone");
    }
  }
  if (std::abs(tau_schedule.back()) <= std::abs(tau_schedule.front())) {
    throw ParameterError("tau schedule must diverge to +inf or -inf");
  }

  TranslatedLimitVerdict verdict;
  if (t == 0.0) {
    verdict.kind = LimitKind::FinitePositive;
    verdict.lower_bound = verdict.upper_bound = 1.0;
    verdict.log_values.assign(tau_schedule.size(), 0.0);
    return verdict;
  }

  for (double tau : tau_schedule) verdict.log_values.push_back(rate.log_eval(t + tau) - rate.log_eval(tau));
  const auto& v = verdict.log_values;
  const std::size_t tail = v.size() / 2;

  bool increasing = true, decreasing = true;
  double max_step = 0.0, max_abs = 0.0;
  double lo = v[tail], hi = v[tail];
  for (std::size_t i = tail; i < v.size(); ++i) {
    if (i > tail) {
      increasing = increasing && v[i] > v[i - 1];
      decreasing = decreasing && v[i] < v[i - 1];
      max_step = std::max(max_step, std::abs(v[i] - v[i - 1]));
    }
    max_abs = std::max(max_abs, std::abs(v[i]));
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }

  if (v.back() > options.divergence_threshold && increasing) {
    verdict.kind = LimitKind::DivergesToInfinity;
  } else if (v.back() < -options.divergence_threshold && decreasing) {
    verdict.kind = LimitKind::DecaysToZero;
  } else if (max_step < options.stabilization_tolerance && max_abs < options.divergence_threshold) {
    verdict.kind = LimitKind::FinitePositive;
    verdict.lower_bound = std::exp(lo);
    verdict.upper_bound = std::exp(hi);
  }
  return verdict;
}

}  // namespace growthdyn
