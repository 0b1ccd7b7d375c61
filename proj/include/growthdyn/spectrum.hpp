#pragma once

#include <optional>
#include <string>
#include <vector>

#include "growthdyn/dichotomy.hpp"
#include "growthdyn/growth_rate.hpp"
#include "growthdyn/linear_system.hpp"

namespace growthdyn {

/// R u {-inf, +inf} with the obvious total order.
class ExtendedReal {
 public:
  ExtendedReal(double v = 0.0);  // NOLINT: implicit from finite doubles and +-inf
  static ExtendedReal neg_infinity();
  static ExtendedReal pos_infinity();

  bool is_finite() const;
  bool is_pos_infinity() const;
  bool is_neg_infinity() const;
  double value() const { return value_; }
  /// "-inf", "+inf" or the decimal value.
  std::string to_string() const;

  friend auto operator<=>(const ExtendedReal& a, const ExtendedReal& b) { return a.value_ <=> b.value_; }
  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) { return a.value_ == b.value_; }

 private:
  double value_;
};

struct BohlOptions {
  /// Reaches T ~ 1e6 after 18 doublings.
  WindowSchedule window{8.0, 18};
  int core_intervals = 64;
  int shell_points = 24;
  /// Minimal dlog mu of a sampled pair; pairs must also cover half the log-range.
  double min_log_separation = 1.0;
  double infinity_threshold = 50.0;
  EvolutionMethod method = EvolutionMethod::ClosedForm;
  EvolutionOptions evolution{};
};

struct BohlExponents {
  ExtendedReal lower;
  ExtendedReal upper;
  /// Half the change of each finite endpoint over the last doubling.
  double lower_uncertainty = 0.0;
  double upper_uncertainty = 0.0;
  std::vector<double> lower_stages;
  std::vector<double> upper_stages;
};

/// Bounds of log Phi(t,s) / dlog mu over t > s pairs with growing separation.
/// Scalar systems only; pass component to read one entry of a diagonal system.
BohlExponents bohl_exponents(const LinearSystem& system, const GrowthRate& rate, const BohlOptions& options = {},
                             int component = 0);

struct SpectralInterval {
  ExtendedReal lo;
  ExtendedReal hi;
};

struct SpectrumEstimate {
  std::vector<SpectralInterval> intervals;
  std::vector<BohlExponents> components;
  double window = 0.0;
  double uncertainty = 0.0;
};

/// Union of the per-component intervals [lower, upper], merged when they touch
/// or overlap (within the reported uncertainty).
SpectrumEstimate estimate_spectrum(const LinearSystem& system, const GrowthRate& rate,
                                   const BohlOptions& options = {});

/// True iff intervals are sorted, strictly separated and at most `dimension` many.
bool well_formed(const SpectrumEstimate& estimate, int dimension);

struct ResolventOptions {
  BohlOptions bohl{};
  FitOptions fit{};
  /// Exponents within this distance of gamma count as touching it.
  double margin = 1e-2;
};

struct ResolventResult {
  bool in_resolvent = false;
  std::optional<DichotomyCertificate> certificate;
  /// Finite shift actually tested (differs from gamma only for +-inf).
  double tested_gamma = 0.0;
  std::string diagnostic;
};

/// Dichotomy test of the (mu, gamma)-shifted system. Infinite gamma follows the
/// usual convention: +inf means an Identity dichotomy at some finite shift,
/// -inf a Zero dichotomy.
ResolventResult resolvent_test(const LinearSystem& system, const GrowthRate& rate, ExtendedReal gamma,
                               const ResolventOptions& options = {});

}  // namespace growthdyn
