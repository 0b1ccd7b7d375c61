#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "growthdyn/growth_rate.hpp"

namespace growthdyn {

using ScalarFn = std::function<double(double)>;
using MatrixFn = std::function<Eigen::MatrixXd(double)>;

/// One scalar coefficient a(t). When `antiderivative` is set the evolution
/// operator is exp(F(t) - F(s)) and numeric methods are only used for checks.
struct ScalarPart {
  std::string name;
  std::map<std::string, double> params;
  ScalarFn coefficient;
  std::optional<ScalarFn> antiderivative;
  /// Points where a(t) is not smooth; integration panels are split there.
  std::vector<double> kinks;
  std::optional<double> period;
};

enum class SystemKind { Scalar, Diagonal, Matrix };

/// x' = A(t) x.
class LinearSystem {
 public:
  static LinearSystem scalar(ScalarPart part, std::string label = {});
  static LinearSystem diagonal(std::vector<ScalarPart> parts, std::string label = {});
  static LinearSystem matrix(int dimension, MatrixFn coefficient, std::vector<double> kinks = {},
                             std::string label = {});

  SystemKind kind() const { return kind_; }
  int dimension() const { return dimension_; }
  const std::string& label() const { return label_; }
  bool is_closed_form() const;
  bool is_scalar() const { return kind_ == SystemKind::Scalar; }
  bool is_decoupled() const { return kind_ != SystemKind::Matrix; }

  /// Scalar/diagonal entries (empty for Matrix systems).
  const std::vector<ScalarPart>& parts() const { return parts_; }
  Eigen::MatrixXd coefficient(double t) const;
  std::vector<double> kinks() const;
  /// Common period of all entries, if every entry declares one.
  std::optional<double> period() const;

 private:
  LinearSystem() = default;
  SystemKind kind_ = SystemKind::Scalar;
  int dimension_ = 1;
  std::string label_;
  std::vector<ScalarPart> parts_;
  MatrixFn matrix_;
  std::vector<double> matrix_kinks_;
};

/// Catalog of coefficient functions with exact antiderivatives.
namespace catalog {
/// a(t) = c.
ScalarPart constant(double c);
/// a(t) = 1 / (1 + |t|); Phi(t,s) = p(t) / p(s).
ScalarPart inverse_linear();
/// a(t) = k |t|; F(t) = k t |t| / 2.
ScalarPart abs_linear(double k = 2.0);
/// a(t) = -(lambda + eta t sin t); F(t) = -lambda t - eta (sin t - t cos t).
ScalarPart damped_sine(double lambda = 1.0, double eta = 0.2);
/// a(t) = c + amp cos(freq t), period 2 pi / freq.
ScalarPart cosine(double c, double amp, double freq);

LinearSystem zero(int dimension = 1);
/// Looks up a scalar entry by catalog name; throws InputError for unknown names
/// and missing parameters.
ScalarPart by_name(const std::string& name, const std::map<std::string, double>& params);
std::vector<std::string> names();
}  // namespace catalog

/// Tabulated coefficients: rows (t, A_11, A_12, ..., A_NN), linear interpolation,
/// constant extension outside the sampled range. N = 1 gives a scalar system.
LinearSystem from_samples(const std::vector<double>& times, const std::vector<std::vector<double>>& entries,
                          std::string label = {});
LinearSystem read_csv(const std::string& path);

/// Coefficient t -> A(t + tau).
LinearSystem translate_system(const LinearSystem& system, double tau);
/// Coefficient A(t) - gamma (log mu)'(t) Id.
LinearSystem shift_system(const LinearSystem& system, const GrowthRate& rate, double gamma);

enum class EvolutionMethod { ClosedForm, Quadrature, RungeKutta };

std::string to_string(EvolutionMethod method);

struct EvolutionOptions {
  double step = 1e-3;
  /// Gauss-Legendre panel length for the Quadrature method.
  double panel = 0.05;
  /// Largest |t - s| accepted by general-matrix integration.
  double horizon = 30.0;
  /// Also integrate with step/2 and keep the extrapolated value.
  bool richardson = false;
};

/// Evolution operator Phi(t,s) of a LinearSystem.
///
/// Scalar and diagonal systems are handled through log Phi, so they never
/// overflow; general matrices are integrated directly with classical RK4.
class EvolutionOperator {
 public:
  explicit EvolutionOperator(LinearSystem system, EvolutionMethod method = EvolutionMethod::ClosedForm,
                             EvolutionOptions options = {});

  const LinearSystem& system() const { return system_; }
  EvolutionMethod method() const { return method_; }
  const EvolutionOptions& options() const { return options_; }

  Eigen::MatrixXd evaluate(double t, double s) const;
  double log_norm(double t, double s) const;
  /// log of the diagonal entries of Phi(t,s) (decoupled systems only).
  Eigen::VectorXd log_components(double t, double s) const;
  /// Componentwise antiderivatives at sorted points, normalized so that any
  /// difference row(i) - row(j) equals log_components(points[i], points[j]).
  std::vector<Eigen::VectorXd> primitives(const std::vector<double>& sorted_points) const;
  /// Phi(t_k, s) for every target; the integration is shared between targets.
  std::vector<Eigen::MatrixXd> sweep_from(double s, const std::vector<double>& targets) const;

 private:
  double scalar_integral(const ScalarPart& part, double a, double b) const;
  Eigen::MatrixXd integrate_matrix(double t, double s, double step) const;

  LinearSystem system_;
  EvolutionMethod method_;
  EvolutionOptions options_;
};

/// log ||diag(exp(l)) M||_2 without forming exp(l); -inf when the product vanishes.
double log_norm_scaled(const Eigen::VectorXd& log_diagonal, const Eigen::MatrixXd& m);
/// log ||M||_2; -inf for the zero matrix.
double log_norm(const Eigen::MatrixXd& m);

}  // namespace growthdyn
