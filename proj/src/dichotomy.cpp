#include "growthdyn/dichotomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "growthdyn/errors.hpp"

namespace growthdyn {

namespace {

constexpr double kIdempotencyTolerance = 1e-10;
constexpr double kInf = std::numeric_limits<double>::infinity();

double sgn(double t) { return t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::string to_string(ProjectorKind kind) {
  switch (kind) {
    case ProjectorKind::Zero: return "Zero";
    case ProjectorKind::Identity: return "Identity";
    case ProjectorKind::ConstantMatrix: return "ConstantMatrix";
    case ProjectorKind::TimeVarying: return "TimeVarying";
  }
  return "?";
}

Projector Projector::zero() {
  Projector p;
  p.kind_ = ProjectorKind::Zero;
  return p;
}

Projector Projector::identity() {
  Projector p;
  p.kind_ = ProjectorKind::Identity;
  return p;
}

Projector Projector::constant(Eigen::MatrixXd m) {
  if (m.rows() != m.cols() || m.rows() == 0) throw ParameterError("projector must be a non-empty square matrix");
  if ((m * m - m).norm() > kIdempotencyTolerance) throw ParameterError("projector matrix is not idempotent");
  Projector p;
  p.kind_ = ProjectorKind::ConstantMatrix;
  p.dimension_ = static_cast<int>(m.rows());
  p.matrix_ = std::move(m);
  return p;
}

Projector Projector::time_varying(int dimension, std::function<Eigen::MatrixXd(double)> fn) {
  if (dimension < 1 || !fn) throw ParameterError("time-varying projector needs a dimension and a callable");
  Projector p;
  p.kind_ = ProjectorKind::TimeVarying;
  p.dimension_ = dimension;
  p.fn_ = std::move(fn);
  return p;
}

Eigen::MatrixXd Projector::at(double s, int dimension) const {
  switch (kind_) {
    case ProjectorKind::Zero:
      return Eigen::MatrixXd::Zero(dimension, dimension);
    case ProjectorKind::Identity:
      return Eigen::MatrixXd::Identity(dimension, dimension);
    case ProjectorKind::ConstantMatrix:
      if (dimension != dimension_) throw ParameterError("projector dimension does not match the system");
      return matrix_;
    case ProjectorKind::TimeVarying: {
      if (dimension != dimension_) throw ParameterError("projector dimension does not match the system");
      Eigen::MatrixXd m = fn_(s);
      if (m.rows() != dimension || m.cols() != dimension) throw InputError("projector callable returned wrong shape");
      return m;
    }
  }
  return {};
}

Projector Projector::shifted(double tau) const {
  if (kind_ != ProjectorKind::TimeVarying || tau == 0.0) return *this;
  return time_varying(dimension_, [fn = fn_, tau](double s) { return fn(s + tau); });
}

double Projector::idempotency_defect(const std::vector<double>& samples, int dimension) const {
  double worst = 0.0;
  for (double s : samples) {
    const Eigen::MatrixXd p = at(s, dimension);
    worst = std::max(worst, (p * p - p).norm());
  }
  return worst;
}

double Projector::invariance_defect(const EvolutionOperator& phi,
                                    const std::vector<std::pair<double, double>>& pairs) const {
  const int n = phi.system().dimension();
  double worst = 0.0;
  for (const auto& [t, s] : pairs) {
    const Eigen::MatrixXd m = phi.evaluate(t, s);
    const double scale = std::max(m.norm(), std::numeric_limits<double>::min());
    worst = std::max(worst, (at(t, n) * m - m * at(s, n)).norm() / scale);
  }
  return worst;
}

DichotomyCertificate::DichotomyCertificate(Projector p, double log_K, std::optional<double> alpha,
                                           std::optional<double> beta, std::optional<double> theta,
                                           std::optional<double> nu, GrowthRate rate)
    : projector_(std::move(p)),
      log_K_(log_K),
      alpha_(alpha),
      beta_(beta),
      theta_(theta),
      nu_(nu),
      rate_(std::move(rate)) {}

DichotomyCertificate DichotomyCertificate::make(Projector projector, double K, std::optional<double> alpha,
                                                std::optional<double> beta, std::optional<double> theta,
                                                std::optional<double> nu, GrowthRate rate) {
  if (!(K >= 1.0) || !std::isfinite(K)) throw ParameterError("dichotomy constant K must be finite and >= 1");
  return from_log_K(std::move(projector), std::log(K), alpha, beta, theta, nu, std::move(rate));
}

DichotomyCertificate DichotomyCertificate::from_log_K(Projector projector, double log_K,
                                                      std::optional<double> alpha, std::optional<double> beta,
                                                      std::optional<double> theta, std::optional<double> nu,
                                                      GrowthRate rate) {
  if (!(log_K >= 0.0) || !std::isfinite(log_K)) throw ParameterError("dichotomy constant K must be finite and >= 1");
  const bool has_stable = projector.kind() != ProjectorKind::Zero;
  const bool has_unstable = projector.kind() != ProjectorKind::Identity;
  if (has_stable) {
    if (!alpha || !theta) throw ParameterError("alpha and theta are required unless the projector is Zero");
    if (!(*alpha < 0.0)) throw ParameterError("alpha must be negative");
    if (!(*theta >= 0.0)) throw ParameterError("theta must be non-negative");
    if (!(*alpha + *theta < 0.0)) throw ParameterError("alpha + theta must be negative");
  } else if (alpha || theta) {
    throw ParameterError("alpha and theta must be absent (*) for the Zero projector");
  }
  if (has_unstable) {
    if (!beta || !nu) throw ParameterError("beta and nu are required unless the projector is Identity");
    if (!(*beta > 0.0)) throw ParameterError("beta must be positive");
    if (!(*nu >= 0.0)) throw ParameterError("nu must be non-negative");
    if (!(*beta - *nu > 0.0)) throw ParameterError("beta - nu must be positive");
  } else if (beta || nu) {
    throw ParameterError("beta and nu must be absent (*) for the Identity projector");
  }
  return DichotomyCertificate(std::move(projector), log_K, alpha, beta, theta, nu, std::move(rate));
}

double DichotomyCertificate::K() const { return std::exp(log_K_); }

GrowthCertificate::GrowthCertificate(double log_L, double a, double epsilon, GrowthRate rate)
    : log_L_(log_L), a_(a), epsilon_(epsilon), rate_(std::move(rate)) {}

GrowthCertificate GrowthCertificate::make(double L, double a, double epsilon, GrowthRate rate) {
  if (!(L >= 1.0) || !std::isfinite(L)) throw ParameterError("growth constant L must be finite and >= 1");
  return from_log_L(std::log(L), a, epsilon, std::move(rate));
}

GrowthCertificate GrowthCertificate::from_log_L(double log_L, double a, double epsilon, GrowthRate rate) {
  if (!(log_L >= 0.0) || !std::isfinite(log_L)) throw ParameterError("growth constant L must be finite and >= 1");
  if (!(a > 0.0) || !std::isfinite(a)) throw ParameterError("growth exponent a must be positive");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ParameterError("growth epsilon must be non-negative");
  return GrowthCertificate(log_L, a, epsilon, std::move(rate));
}

double GrowthCertificate::L() const { return std::exp(log_L_); }

double default_tolerance(const LinearSystem& system, EvolutionMethod method) {
  return method == EvolutionMethod::ClosedForm && system.is_closed_form() ? 1e-9 : 1e-5;
}

namespace {

// log||Phi(t,s) M(s)|| over the pairs of a PairGrid, shared by all checks.
class PairEvaluator {
 public:
  PairEvaluator(const LinearSystem& system, const GrowthRate& rate, const PairGrid& grid,
                const VerifyOptions& options)
      : system_(system), phi_(system, options.method, options.evolution) {
    for (double s : grid.anchors()) {
      points_.push_back(s);
      for (double d : grid.offsets()) {
        points_.push_back(s + d);
        points_.push_back(s - d);
      }
    }
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
    log_mu_.reserve(points_.size());
    for (double x : points_) log_mu_.push_back(rate.log_eval(x));
    if (system.is_decoupled()) primitives_ = phi_.primitives(points_);
  }

  std::size_t index(double x) const {
    return static_cast<std::size_t>(std::lower_bound(points_.begin(), points_.end(), x) - points_.begin());
  }
  double log_mu(std::size_t i) const { return log_mu_[i]; }

  // Phi(t, s) for every target of one anchor; matrix systems only.
  std::vector<Eigen::MatrixXd> sweep(double s, const std::vector<double>& targets) const {
    return phi_.sweep_from(s, targets);
  }

  double log_norm_decoupled(std::size_t ti, std::size_t si, const Eigen::MatrixXd* m) const {
    const Eigen::VectorXd l = primitives_[ti] - primitives_[si];
    if (!m) return l.maxCoeff();
    return log_norm_scaled(l, *m);
  }

  bool decoupled() const { return system_.is_decoupled(); }
  int dimension() const { return system_.dimension(); }

 private:
  const LinearSystem& system_;
  EvolutionOperator phi_;
  std::vector<double> points_;
  std::vector<double> log_mu_;
  std::vector<Eigen::VectorXd> primitives_;
};

struct MarginTracker {
  double worst = kInf;
  std::optional<std::pair<double, double>> pair;
  std::size_t count = 0;
  void add(double margin, double t, double s) {
    ++count;
    if (margin < worst) {
      worst = margin;
      pair = std::make_pair(t, s);
    }
  }
};

enum class Branch { Forward, Backward };

// Visits every pair of one branch. bound(ti, si, t, s) is the log-scale bound;
// factor selects the matrix applied at s (nullptr = whole operator).
template <typename Bound, typename Factor>
void scan_branch(const PairEvaluator& ev, const PairGrid& grid, Branch branch, Bound bound, Factor factor,
                 MarginTracker& tracker) {
  const double dir = branch == Branch::Forward ? 1.0 : -1.0;
  for (double s : grid.anchors()) {
    const std::size_t si = ev.index(s);
    const std::optional<Eigen::MatrixXd> m = factor(s);
    if (m && m->isZero(0.0)) continue;  // bound holds trivially
    if (ev.decoupled()) {
      for (double d : grid.offsets()) {
        const double t = s + dir * d;
        const std::size_t ti = ev.index(t);
        const double lhs = ev.log_norm_decoupled(ti, si, m ? &*m : nullptr);
        if (lhs == -kInf) continue;
        tracker.add(bound(ti, si, t, s) - lhs, t, s);
      }
      continue;
    }
    std::vector<double> targets;
    for (double d : grid.offsets()) targets.push_back(s + dir * d);
    const auto ops = ev.sweep(s, targets);
    for (std::size_t k = 0; k < targets.size(); ++k) {
      const double t = targets[k];
      const double lhs = m ? log_norm(ops[k] * *m) : log_norm(ops[k]);
      if (lhs == -kInf) continue;
      tracker.add(bound(ev.index(t), si, t, s) - lhs, t, s);
    }
  }
}

VerificationReport finish(const MarginTracker& tracker, double tolerance) {
  VerificationReport report;
  report.tolerance = tolerance;
  report.pairs_checked = tracker.count;
  // No non-trivial pair means nothing can be violated.
  report.worst_margin = tracker.count == 0 || tracker.worst == kInf ? 0.0 : tracker.worst;
  report.violating_pair = tracker.pair;
  report.pass = report.worst_margin >= -tolerance;
  return report;
}

}  // namespace

VerificationReport check_dichotomy_bounds(const LinearSystem& system, const Projector& projector, double log_K,
                                          double alpha, double beta, double theta, double nu,
                                          const GrowthRate& rate, const PairGrid& grid,
                                          const VerifyOptions& options) {
  if (grid.empty()) throw ParameterError("pair grid is empty for a required branch");
  const int n = system.dimension();
  const double tol = options.tolerance.value_or(default_tolerance(system, options.method));
  const PairEvaluator ev(system, rate, grid, options);
  MarginTracker tracker;

  if (projector.kind() != ProjectorKind::Zero) {
    auto bound = [&](std::size_t ti, std::size_t si, double, double s) {
      return log_K + alpha * (ev.log_mu(ti) - ev.log_mu(si)) + sgn(s) * theta * ev.log_mu(si);
    };
    auto factor = [&](double s) -> std::optional<Eigen::MatrixXd> {
      if (projector.kind() == ProjectorKind::Identity) return std::nullopt;
      return projector.at(s, n);
    };
    scan_branch(ev, grid, Branch::Forward, bound, factor, tracker);
  }
  if (projector.kind() != ProjectorKind::Identity) {
    auto bound = [&](std::size_t ti, std::size_t si, double, double s) {
      return log_K + beta * (ev.log_mu(ti) - ev.log_mu(si)) + sgn(s) * nu * ev.log_mu(si);
    };
    auto factor = [&](double s) -> std::optional<Eigen::MatrixXd> {
      if (projector.kind() == ProjectorKind::Zero) return std::nullopt;
      return Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n) - projector.at(s, n));
    };
    scan_branch(ev, grid, Branch::Backward, bound, factor, tracker);
  }
  return finish(tracker, tol);
}

VerificationReport verify_dichotomy(const LinearSystem& system, const DichotomyCertificate& cert,
                                    const PairGrid& grid, const VerifyOptions& options) {
  return check_dichotomy_bounds(system, cert.projector(), cert.log_K(), cert.alpha().value_or(0.0),
                                cert.beta().value_or(0.0), cert.theta().value_or(0.0), cert.nu().value_or(0.0),
                                cert.rate(), grid, options);
}

VerificationReport verify_growth(const LinearSystem& system, const GrowthCertificate& cert, const PairGrid& grid,
                                 const VerifyOptions& options) {
  if (grid.empty()) throw ParameterError("pair grid is empty");
  const double tol = options.tolerance.value_or(default_tolerance(system, options.method));
  const PairEvaluator ev(system, cert.rate(), grid, options);
  MarginTracker tracker;
  auto bound = [&](std::size_t ti, std::size_t si, double t, double s) {
    return cert.log_L() + sgn(t - s) * cert.a() * (ev.log_mu(ti) - ev.log_mu(si)) +
           sgn(s) * cert.epsilon() * ev.log_mu(si);
  };
  auto whole = [](double) -> std::optional<Eigen::MatrixXd> { return std::nullopt; };
  scan_branch(ev, grid, Branch::Forward, bound, whole, tracker);
  scan_branch(ev, grid, Branch::Backward, bound, whole, tracker);
  return finish(tracker, tol);
}

double& detail::propagation_factor() {
  static double factor = 3.0;
  return factor;
}

DichotomyCertificate propagate_dichotomy(const DichotomyCertificate& cert, double tau) {
  if (!std::isfinite(tau)) throw DomainError("translation tau must be finite");
  const double theta = cert.theta().value_or(0.0);
  const double nu = cert.nu().value_or(0.0);
  const double log_K_tau =
      cert.log_K() + detail::propagation_factor() * sgn(tau) * std::max(theta, nu) * cert.rate().log_eval(tau);
  return DichotomyCertificate::from_log_K(cert.projector().shifted(tau), log_K_tau, cert.alpha(), cert.beta(),
                                          cert.theta(), cert.nu(), translate(cert.rate(), tau));
}

GrowthCertificate propagate_growth(const GrowthCertificate& cert, double tau) {
  if (!std::isfinite(tau)) throw DomainError("translation tau must be finite");
  const double log_L_tau = cert.log_L() + 3.0 * sgn(tau) * cert.epsilon() * cert.rate().log_eval(tau);
  return GrowthCertificate::from_log_L(log_L_tau, cert.a(), cert.epsilon(), translate(cert.rate(), tau));
}

FitResult fit_minimal_K(const LinearSystem& system, const Projector& projector, const GrowthRate& rate,
                        std::optional<double> alpha, std::optional<double> beta, double theta, double nu,
                        const FitOptions& options) {
  const bool has_stable = projector.kind() != ProjectorKind::Zero;
  const bool has_unstable = projector.kind() != ProjectorKind::Identity;
  if (has_stable && (!alpha || !(*alpha < 0.0) || !(theta >= 0.0) || !(*alpha + theta < 0.0))) {
    throw ParameterError("fit needs alpha < 0, theta >= 0 and alpha + theta < 0");
  }
  if (has_unstable && (!beta || !(*beta > 0.0) || !(nu >= 0.0) || !(*beta - nu > 0.0))) {
    throw ParameterError("fit needs beta > 0, nu >= 0 and beta - nu > 0");
  }
  if (options.window.stages < 2) throw ParameterError("fit needs at least two window stages");

  FitResult result;
  for (double w : options.window.windows()) {
    PairGridShape shape = options.shape;
    shape.half_width = w;
    shape.max_separation = 2.0 * w;
    const PairGrid grid = PairGrid::build(shape);
    const auto report = check_dichotomy_bounds(system, projector, 0.0, alpha.value_or(-1.0), beta.value_or(1.0),
                                               has_stable ? theta : 0.0, has_unstable ? nu : 0.0, rate, grid,
                                               options.verify);
    result.stage_log_K.push_back(std::max(0.0, -report.worst_margin));
  }
  const auto& v = result.stage_log_K;
  result.log_K = v.back();
  result.K_estimate = std::exp(result.log_K);
  result.stable = v.back() - v[v.size() - 2] < options.plateau_tolerance;
  return result;
}

std::string to_string(DirectionVerdict verdict) {
  switch (verdict) {
    case DirectionVerdict::Bounded: return "Bounded";
    case DirectionVerdict::Diverging: return "Diverging";
    case DirectionVerdict::Ambiguous: return "Ambiguous";
  }
  return "?";
}

namespace {

// g[k] = log||Phi(t_k, 0) x|| along times 0 = t_0, ..., t_m = +-T.
DirectionVerdict judge(const std::vector<double>& g, double threshold, double& sup) {
  sup = *std::max_element(g.begin(), g.end());
  if (sup <= threshold) return DirectionVerdict::Bounded;
  if (g.back() > threshold && g.back() > g[g.size() / 2]) return DirectionVerdict::Diverging;
  return DirectionVerdict::Ambiguous;
}

}  // namespace

SubbundleReport subbundle_probe(const LinearSystem& system, double horizon,
                                std::optional<std::vector<Eigen::VectorXd>> basis, const SubbundleOptions& options) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("subbundle horizon must be positive");
  if (options.samples < 4) throw ParameterError("subbundle probe needs at least 4 samples");
  const int n = system.dimension();
  std::vector<Eigen::VectorXd> dirs;
  if (basis) {
    if (basis->empty()) throw ParameterError("basis must not be empty");
    Eigen::MatrixXd b(n, static_cast<Eigen::Index>(basis->size()));
    for (std::size_t k = 0; k < basis->size(); ++k) {
      if ((*basis)[k].size() != n) throw ParameterError("basis vector has the wrong dimension");
      b.col(static_cast<Eigen::Index>(k)) = (*basis)[k];
    }
    // Orthonormalize; dependent vectors are dropped.
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(b);
    const Eigen::Index rank = Eigen::FullPivLU<Eigen::MatrixXd>(b).rank();
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, rank);
    for (Eigen::Index k = 0; k < rank; ++k) dirs.emplace_back(q.col(k));
  } else {
    for (int k = 0; k < n; ++k) dirs.emplace_back(Eigen::VectorXd::Unit(n, k));
  }

  const EvolutionOperator phi(system, options.method, options.evolution);
  std::vector<double> fwd_t, bwd_t;
  for (int k = 0; k <= options.samples; ++k) {
    fwd_t.push_back(horizon * k / options.samples);
    bwd_t.push_back(-horizon * k / options.samples);
  }
  auto log_norms = [&](const std::vector<double>& ts, const Eigen::VectorXd& x) {
    std::vector<double> g;
    if (system.is_decoupled()) {
      for (double t : ts) g.push_back(log_norm_scaled(phi.log_components(t, 0.0), x));
    } else {
      for (const auto& m : phi.sweep_from(0.0, ts)) g.push_back(log_norm(m * x));
    }
    return g;
  };

  SubbundleReport report;
  for (std::size_t k = 0; k < dirs.size(); ++k) {
    DirectionReport d;
    d.direction = dirs[k];
    d.forward = judge(log_norms(fwd_t, dirs[k]), options.threshold, d.forward_sup);
    d.backward = judge(log_norms(bwd_t, dirs[k]), options.threshold, d.backward_sup);
    if (d.forward == DirectionVerdict::Bounded) ++report.stable_dim;
    if (d.backward == DirectionVerdict::Bounded) ++report.unstable_dim;
    if (d.forward == DirectionVerdict::Bounded && d.backward == DirectionVerdict::Bounded) ++report.bounded_dim;
    if (d.forward == DirectionVerdict::Ambiguous || d.backward == DirectionVerdict::Ambiguous) {
      report.flags.push_back("direction " + std::to_string(k) + " is ambiguous on the horizon");
    }
    report.directions.push_back(std::move(d));
  }
  return report;
}

}  // namespace growthdyn
