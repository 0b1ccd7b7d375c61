#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace growthdyn {

enum class RateKind { Exponential, Polynomial, Superexponential, Subexponential, Translated, Power };

/// A growth rate mu: strictly increasing, mu(0) = 1, mu(-inf) = 0, mu(+inf) = inf.
///
/// Rates are only ever handled through log mu. Superexponential rates leave the
/// double range for |t| around 27 while their logarithms stay small, and every
/// quantity the library needs is a ratio mu(t)/mu(s).
///
/// Values are immutable and cheap to copy (shared node tree).
class GrowthRate {
 public:
  static GrowthRate exponential();
  static GrowthRate polynomial();
  /// s_r(t) = exp(sgn(t) |t|^r), r > 1.
  static GrowthRate superexponential(double r);
  /// u_r(t) = exp(sgn(t) ((|t|+1)^r - 1)), 0 < r < 1.
  static GrowthRate subexponential(double r);

  /// mu_tau(t) = mu(t + tau) / mu(tau). Exponential rates (and their powers)
  /// are fixed by translation and are returned unchanged.
  GrowthRate translated(double tau) const;
  /// mu^k, k > 0.
  GrowthRate power(double k) const;

  RateKind kind() const;
  /// r for Superexponential/Subexponential, k for Power, 1 otherwise.
  double exponent() const;
  /// tau for Translated, 0 otherwise.
  double shift() const;
  /// Underlying rate of Translated/Power; throws for catalog kinds.
  const GrowthRate& base() const;

  double log_eval(double t) const;
  /// d/dt log mu(t). Sign-piecewise rates use the one-sided limit at t = 0.
  double log_derivative(double t) const;
  /// Points where log_derivative is not smooth.
  std::vector<double> kinks() const;

  /// Short human-readable form, e.g. "s_2" or "translate(p, 3)".
  std::string describe() const;

  bool is_exponential_family() const;

 private:
  struct Node;
  explicit GrowthRate(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

/// log mu(t); throws DomainError for non-finite t.
double eval_log(const GrowthRate& rate, double t);
GrowthRate translate(const GrowthRate& rate, double tau);

/// Doubling window schedule T_k = initial * 2^k, k = 0 .. stages-1.
struct WindowSchedule {
  double initial = 8.0;
  int stages = 5;

  std::vector<double> windows() const;
  double final_window() const;
};

enum class Relation { WeaklyFaster, WeaklySlower, Faster, Slower, Incomparable, Inconclusive };

std::string to_string(Relation relation);

struct ComparisonEvidence {
  std::size_t grid_points = 0;
  double window = 0.0;
  /// Increase of the tracked supremum (or ratio) over the last stage.
  double plateau_slope = 0.0;
  std::vector<double> stage_values;
  std::vector<double> reverse_stage_values;
};

struct ComparisonVerdict {
  Relation relation = Relation::Inconclusive;
  /// log M, present iff relation is WeaklyFaster, WeaklySlower, Faster or Slower.
  std::optional<double> constant_estimate;
  ComparisonEvidence evidence;
};

struct WeakComparisonOptions {
  WindowSchedule window{8.0, 5};
  /// Intervals of the uniform core grid on [-initial, initial]; every doubling
  /// shell gets half as many, so stage grids are nested.
  int core_intervals = 16000;
  double plateau_tolerance = 1e-3;
  double divergence_threshold = 50.0;
};

/// Tests whether mu is weakly faster than sigma: sigma(t)/sigma(s) <= M mu(t)/mu(s)
/// for t >= s. Tracks S(T) = sup_{t>=s, |t|,|s|<=T} [dlog sigma - dlog mu] over the
/// window schedule; a plateau gives WeaklyFaster with log M = S.
ComparisonVerdict compare_weak(const GrowthRate& mu, const GrowthRate& sigma,
                               const WeakComparisonOptions& options = {});

struct StrongComparisonOptions {
  WeakComparisonOptions weak{};
  double ratio_initial = 8.0;
  int ratio_max_stages = 34;
  int core_intervals = 64;
  int shell_points = 32;
  double decay_threshold = 0.05;
  /// Relative change under which a non-decaying ratio counts as settled.
  double settle_tolerance = 1e-3;
};

/// Tests mu >> sigma through the decay of sup dlog sigma / dlog mu over pairs
/// whose dlog mu is at least half of the window's log-range.
ComparisonVerdict compare_strong(const GrowthRate& mu, const GrowthRate& sigma,
                                 const StrongComparisonOptions& options = {});

enum class RateClassKind { Slow, Fast, ExponentialLike, Unclassified };

std::string to_string(RateClassKind kind);

struct RateClass {
  RateClassKind kind = RateClassKind::Unclassified;
  /// r in (0,1) for Slow, r > 1 for Fast.
  std::optional<double> witness;
  std::string diagnostic;
};

struct ClassifyOptions {
  std::vector<double> slow_exponents{0.1, 0.25, 0.5, 0.75, 0.9};
  std::vector<double> fast_exponents{1.25, 1.5, 2.0, 3.0};
  WeakComparisonOptions weak{};
};

RateClass classify(const GrowthRate& rate, const ClassifyOptions& options = {});

enum class LimitKind { FinitePositive, DivergesToInfinity, DecaysToZero, Inconclusive };

std::string to_string(LimitKind kind);

struct TranslatedLimitVerdict {
  LimitKind kind = LimitKind::Inconclusive;
  /// Empirical [min, max] of mu_tau(t) over the tail (FinitePositive only).
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  std::vector<double> log_values;
};

struct TranslatedLimitOptions {
  double stabilization_tolerance = 0.05;
  double divergence_threshold = 50.0;
};

/// tau_n = sign * 2^n, n = first .. last.
std::vector<double> geometric_schedule(double sign, int first = 3, int last = 12);

TranslatedLimitVerdict translated_limit_probe(const GrowthRate& rate, double t,
                                              std::span<const double> tau_schedule,
                                              const TranslatedLimitOptions& options = {});

}  // namespace growthdyn
