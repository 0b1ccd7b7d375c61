#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "growthdyn/grids.hpp"
#include "growthdyn/growth_rate.hpp"
#include "growthdyn/linear_system.hpp"

namespace growthdyn {

enum class ProjectorKind { Zero, Identity, ConstantMatrix, TimeVarying };

std::string to_string(ProjectorKind kind);

/// Invariant projector s -> P(s).
class Projector {
 public:
  static Projector zero();
  static Projector identity();
  /// Throws ParameterError unless P^2 = P within 1e-10.
  static Projector constant(Eigen::MatrixXd p);
  /// Idempotency is only checked on sample grids (see idempotency_defect).
  static Projector time_varying(int dimension, std::function<Eigen::MatrixXd(double)> p);

  ProjectorKind kind() const { return kind_; }
  /// Matrix size for ConstantMatrix/TimeVarying, 0 otherwise.
  int dimension() const { return dimension_; }
  Eigen::MatrixXd at(double s, int dimension) const;
  /// P_tau(s) = P(s + tau).
  Projector shifted(double tau) const;
  /// max ||P(s)^2 - P(s)|| over the samples.
  double idempotency_defect(const std::vector<double>& samples, int dimension) const;
  /// max relative ||P(t) Phi(t,s) - Phi(t,s) P(s)|| over the given pairs.
  double invariance_defect(const EvolutionOperator& phi, const std::vector<std::pair<double, double>>& pairs) const;

 private:
  Projector() = default;
  ProjectorKind kind_ = ProjectorKind::Zero;
  int dimension_ = 0;
  Eigen::MatrixXd matrix_;
  std::function<Eigen::MatrixXd(double)> fn_;
};

/// (P; K, alpha, beta, theta, nu) under a rate. Parameters that the projector
/// makes meaningless are absent: Zero drops alpha/theta, Identity drops beta/nu.
class DichotomyCertificate {
 public:
  /// Validates K >= 1, alpha < 0, beta > 0, theta, nu >= 0, alpha + theta < 0,
  /// beta - nu > 0 and the asterisk convention; throws ParameterError.
  static DichotomyCertificate make(Projector projector, double K, std::optional<double> alpha,
                                   std::optional<double> beta, std::optional<double> theta,
                                   std::optional<double> nu, GrowthRate rate);
  /// Same checks, with K given through log K (what propagation produces).
  static DichotomyCertificate from_log_K(Projector projector, double log_K, std::optional<double> alpha,
                                         std::optional<double> beta, std::optional<double> theta,
                                         std::optional<double> nu, GrowthRate rate);

  const Projector& projector() const { return projector_; }
  double log_K() const { return log_K_; }
  double K() const;
  std::optional<double> alpha() const { return alpha_; }
  std::optional<double> beta() const { return beta_; }
  std::optional<double> theta() const { return theta_; }
  std::optional<double> nu() const { return nu_; }
  const GrowthRate& rate() const { return rate_; }
  bool uniform() const { return theta_.value_or(0.0) == 0.0 && nu_.value_or(0.0) == 0.0; }

 private:
  DichotomyCertificate(Projector p, double log_K, std::optional<double> alpha, std::optional<double> beta,
                       std::optional<double> theta, std::optional<double> nu, GrowthRate rate);
  Projector projector_;
  double log_K_;
  std::optional<double> alpha_, beta_, theta_, nu_;
  GrowthRate rate_;
};

/// (L, a, epsilon) under a rate.
class GrowthCertificate {
 public:
  static GrowthCertificate make(double L, double a, double epsilon, GrowthRate rate);
  static GrowthCertificate from_log_L(double log_L, double a, double epsilon, GrowthRate rate);

  double log_L() const { return log_L_; }
  double L() const;
  double a() const { return a_; }
  double epsilon() const { return epsilon_; }
  const GrowthRate& rate() const { return rate_; }

 private:
  GrowthCertificate(double log_L, double a, double epsilon, GrowthRate rate);
  double log_L_;
  double a_;
  double epsilon_;
  GrowthRate rate_;
};

struct VerificationReport {
  bool pass = false;
  /// Smallest log-scale slack bound - log||.||; negative means violation.
  double worst_margin = 0.0;
  std::optional<std::pair<double, double>> violating_pair;  // (t, s) of the worst margin
  std::size_t pairs_checked = 0;
  double tolerance = 0.0;
};

struct VerifyOptions {
  EvolutionMethod method = EvolutionMethod::ClosedForm;
  EvolutionOptions evolution{};
  /// Defaults to 1e-9 for closed-form evolution, 1e-5 otherwise.
  std::optional<double> tolerance;
};

double default_tolerance(const LinearSystem& system, EvolutionMethod method);

/// Raw dichotomy inequality check without certificate validation. alpha/theta
/// are used when the projector is not Zero, beta/nu when it is not Identity.
/// Useful for probing corrupted parameter sets.
VerificationReport check_dichotomy_bounds(const LinearSystem& system, const Projector& projector, double log_K,
                                          double alpha, double beta, double theta, double nu,
                                          const GrowthRate& rate, const PairGrid& grid,
                                          const VerifyOptions& options = {});

VerificationReport verify_dichotomy(const LinearSystem& system, const DichotomyCertificate& cert,
                                    const PairGrid& grid, const VerifyOptions& options = {});
VerificationReport verify_growth(const LinearSystem& system, const GrowthCertificate& cert, const PairGrid& grid,
                                 const VerifyOptions& options = {});

/// log K_tau = log K + 3 sgn(tau) max(theta, nu) log mu(tau); alpha, beta,
/// theta, nu are kept, the projector and the rate are translated.
DichotomyCertificate propagate_dichotomy(const DichotomyCertificate& cert, double tau);
/// log L_tau = log L + 3 sgn(tau) epsilon log mu(tau).
GrowthCertificate propagate_growth(const GrowthCertificate& cert, double tau);

namespace detail {
/// Multiplier in front of sgn(tau) max(theta, nu) log mu(tau) (3 in the
/// propagation formula). Only exists so the mutation battery can corrupt it.
double& propagation_factor();
}  // namespace detail

struct FitOptions {
  /// Pair-grid shape of the first stage; half_width doubles each stage.
  PairGridShape shape{};
  WindowSchedule window{5.0, 4};
  double plateau_tolerance = 1e-3;
  VerifyOptions verify{};
};

struct FitResult {
  double K_estimate = 1.0;
  double log_K = 0.0;
  bool stable = false;
  std::vector<double> stage_log_K;
};

/// Smallest K making the NμD inequalities hold on expanding pair grids.
FitResult fit_minimal_K(const LinearSystem& system, const Projector& projector, const GrowthRate& rate,
                        std::optional<double> alpha, std::optional<double> beta, double theta, double nu,
                        const FitOptions& options = {});

enum class DirectionVerdict { Bounded, Diverging, Ambiguous };

std::string to_string(DirectionVerdict verdict);

struct DirectionReport {
  Eigen::VectorXd direction;
  DirectionVerdict forward = DirectionVerdict::Ambiguous;
  DirectionVerdict backward = DirectionVerdict::Ambiguous;
  double forward_sup = 0.0;   // sup log||Phi(t,0)x|| on [0, T]
  double backward_sup = 0.0;  // same on [-T, 0]
};

struct SubbundleReport {
  int stable_dim = 0;
  int unstable_dim = 0;
  int bounded_dim = 0;
  std::vector<DirectionReport> directions;
  std::vector<std::string> flags;
};

struct SubbundleOptions {
  /// log(10^3).
  double threshold = 6.907755278982137;
  int samples = 400;
  EvolutionMethod method = EvolutionMethod::ClosedForm;
  EvolutionOptions evolution{};
};

/// Empirical S(0), U(0), B(0): basis directions at time 0 whose orbits stay
/// bounded forward, backward, or both on [-T, T]. Without a basis, the
/// standard basis is used.
SubbundleReport subbundle_probe(const LinearSystem& system, double horizon,
                                std::optional<std::vector<Eigen::VectorXd>> basis = std::nullopt,
                                const SubbundleOptions& options = {});

}  // namespace growthdyn
