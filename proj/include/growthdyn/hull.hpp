#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

#include "growthdyn/dichotomy.hpp"
#include "growthdyn/growth_rate.hpp"
#include "growthdyn/linear_system.hpp"
#include "growthdyn/spectrum.hpp"

namespace growthdyn {

/// tau_n = sign * 2^n, n = first .. last.
std::vector<double> hull_schedule(double sign, int first = 3, int last = 24);

/// Translation orbit tau_n -> omega(. + tau_n), sampled on [-T, T].
struct OrbitProbe {
  LinearSystem omega;
  std::vector<double> tau_schedule;
  double compact_radius = 10.0;
  int grid_points = 201;
  double cauchy_tolerance = 1e-6;
  /// |omega| level that every grid point must pass for DivergesPointwise.
  double divergence_threshold = 1e3;
};

enum class ProbeVerdict { ConvergentTo, DivergesPointwise, NonCauchy };

std::string to_string(ProbeVerdict verdict);

struct LimitProbeReport {
  ProbeVerdict verdict = ProbeVerdict::NonCauchy;
  /// sup over the grid of max-entry |omega_{tau_{n+1}} - omega_{tau_n}|.
  std::vector<double> sup_distances;
  std::vector<double> grid;
  /// Row-major coefficient samples of the last translate (ConvergentTo only).
  std::vector<std::vector<double>> limit_samples;
  std::string notes;

  /// Tabulated limit equation (constant extension beyond [-T, T]).
  LinearSystem limit_system() const;
};

LimitProbeReport pointwise_limit_probe(const OrbitProbe& probe);

enum class IntegrabilityTrend { Plateau, Growing };

std::string to_string(IntegrabilityTrend trend);

struct WindowValue {
  double tau = 0.0;
  double value = 0.0;
};

struct IntegrabilityReport {
  /// Absent when the running sup keeps growing (Unbounded).
  std::optional<double> sup_estimate;
  IntegrabilityTrend trend = IntegrabilityTrend::Plateau;
  /// log2 ratio of the last two stage sups (about 1 for linear growth).
  double growth_exponent = 0.0;
  std::vector<WindowValue> windows;
  std::vector<double> stage_sups;
};

struct IntegrabilityOptions {
  /// Quadrature error budget per unit window; scaled by the window integral when that exceeds 1.
  double absolute_tolerance = 1e-6;
  double plateau_tolerance = 1e-3;
};

/// {0} u {+-2^k : k = 0..16}.
std::vector<double> default_integrability_grid();

/// Windowed means (1/t0) int_tau^{tau+t0} ||omega(s)|| ds over the tau grid,
/// with the running sup over |tau| <= 2^k stages.
IntegrabilityReport uniform_local_integrability(const LinearSystem& omega, double t0,
                                                std::vector<double> tau_grid = default_integrability_grid(),
                                                const IntegrabilityOptions& options = {});

struct BoundedSolutionsReport {
  bool all_bounded = false;
  SubbundleReport detail;
};

BoundedSolutionsReport bounded_solutions_probe(const LinearSystem& limit_system, double horizon = 50.0,
                                               std::optional<std::vector<Eigen::VectorXd>> basis = std::nullopt);

enum class Prediction {
  EmptyLimitSets,
  LimitEquationsAllBounded,
  NoDichotomyOnHull,
  SpectrumCollapsesToZero,
  SpectralIntervalsOnlyZeroOrInfinity
};

std::string to_string(Prediction prediction);

struct PredictionRecord {
  Prediction prediction;
  std::vector<std::string> witnesses;
  std::vector<std::string> confirmations;
};

struct ClassificationInputs {
  std::optional<DichotomyCertificate> dichotomy;
  std::optional<GrowthCertificate> growth;
  /// Declared period of omega; defaults to the system's own period.
  std::optional<double> period;
  std::optional<GrowthRate> fast_rate_query;
  std::optional<GrowthRate> slow_rate_query;
};

struct ClassificationConfig {
  PairGridShape verify_grid{};
  VerifyOptions verify{};
  ClassifyOptions rate_classes{};
  double compact_radius = 10.0;
  int grid_points = 201;
  int schedule_first = 3;
  int schedule_last = 24;
  double cauchy_tolerance = 1e-6;
  double divergence_threshold = 1e3;
  double integrability_window = 1.0;
  IntegrabilityOptions integrability{};
  /// Bohl options for spectra of the input and of limit equations.
  BohlOptions spectrum{};
  BohlOptions limit_spectrum{WindowSchedule{8.0, 8}};
  double spectrum_tolerance = 1e-2;
  double bounded_horizon = 50.0;
};

struct LimitClassification {
  std::vector<PredictionRecord> predictions;
  std::vector<std::string> falsifications;
  std::vector<std::string> notes;
  bool unclassified_input = false;
  std::optional<LimitProbeReport> forward_probe;   // tau -> +inf (omega limit)
  std::optional<LimitProbeReport> backward_probe;  // tau -> -inf (alpha limit)
  std::optional<IntegrabilityReport> integrability;

  bool predicts(Prediction p) const;
};

/// Assembles the limit-set predictions implied by the inputs and cross-checks
/// each one against the probes. Certificates must verify on omega.
LimitClassification classify_limit_behavior(const LinearSystem& omega, const ClassificationInputs& inputs,
                                            const ClassificationConfig& config = {});

}  // namespace growthdyn
