#include "growthdyn/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "growthdyn/errors.hpp"
#include "growthdyn/grids.hpp"

namespace growthdyn {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ExtendedReal::ExtendedReal(double v) : value_(v) {
  if (std::isnan(v)) throw DomainError("extended real cannot be NaN");
}

ExtendedReal ExtendedReal::neg_infinity() { return ExtendedReal(-kInf); }
ExtendedReal ExtendedReal::pos_infinity() { return ExtendedReal(kInf); }
bool ExtendedReal::is_finite() const { return std::isfinite(value_); }
bool ExtendedReal::is_pos_infinity() const { return value_ == kInf; }
bool ExtendedReal::is_neg_infinity() const { return value_ == -kInf; }

std::string ExtendedReal::to_string() const {
  if (is_pos_infinity()) return "+inf";
  if (is_neg_infinity()) return "-inf";
  std::ostringstream out;
  out.precision(17);
  out << value_;
  return out.str();
}

namespace {

struct Trend {
  ExtendedReal value;
  double uncertainty = 0.0;
};

// Last three stage values -> finite estimate or +-inf.
Trend resolve(const std::vector<double>& v, double threshold) {
  const std::size_t n = v.size();
  const double a = v[n - 3], b = v[n - 2], c = v[n - 1];
  if (c > threshold && c > b && b > a) return {ExtendedReal::pos_infinity(), 0.0};
  if (c < -threshold && c < b && b < a) return {ExtendedReal::neg_infinity(), 0.0};
  return {ExtendedReal(c), 0.5 * std::abs(c - b)};
}

}  // namespace

BohlExponents bohl_exponents(const LinearSystem& system, const GrowthRate& rate, const BohlOptions& options,
                             int component) {
  if (!system.is_decoupled()) throw UnsupportedError("Bohl exponents need a scalar or diagonal system");
  if (component < 0 || component >= system.dimension()) throw ParameterError("component index out of range");
  if (options.window.stages < 3) throw ParameterError("Bohl exponents need at least 3 window stages");
  const auto windows = options.window.windows();
  const auto grid =
      nested_geometric_grid(options.window.initial, windows.back(), options.core_intervals, options.shell_points);
  const EvolutionOperator phi(system, options.method, options.evolution);
  const auto prim = phi.primitives(grid);
  std::vector<double> lm(grid.size()), f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    lm[i] = rate.log_eval(grid[i]);
    f[i] = prim[i](component);
  }

  {
    const auto [lo, hi] = window_range(grid, windows.back());
    if (lm[hi - 1] - lm[lo] < options.min_log_separation) {
      throw ParameterError("rate has bounded log on the window; no pair reaches the minimal separation");
    }
  }

  BohlExponents out;
  // Earlier stages never influence the verdict, only the last three are computed.
  for (std::size_t k = windows.size() - 3; k < windows.size(); ++k) {
    const auto [lo, hi] = window_range(grid, windows[k]);
    const double need = std::max(options.min_log_separation, 0.5 * (lm[hi - 1] - lm[lo]));
    double upper = -kInf, lower = kInf;
    std::size_t j_start = lo;
    for (std::size_t i = lo; i < hi; ++i) {
      j_start = std::max(j_start, i + 1);
      while (j_start < hi && lm[j_start] - lm[i] < need) ++j_start;
      if (j_start >= hi) break;
      for (std::size_t j = j_start; j < hi; ++j) {
        const double r = (f[j] - f[i]) / (lm[j] - lm[i]);
        upper = std::max(upper, r);
        lower = std::min(lower, r);
      }
    }
    if (upper == -kInf) throw ParameterError("no sampled pair reaches the minimal log separation");
    out.upper_stages.push_back(upper);
    out.lower_stages.push_back(lower);
  }
  const Trend up = resolve(out.upper_stages, options.infinity_threshold);
  const Trend low = resolve(out.lower_stages, options.infinity_threshold);
  out.upper = up.value;
  out.lower = low.value;
  out.upper_uncertainty = up.uncertainty;
  out.lower_uncertainty = low.uncertainty;
  return out;
}

SpectrumEstimate estimate_spectrum(const LinearSystem& system, const GrowthRate& rate, const BohlOptions& options) {
  if (!system.is_decoupled()) {
    throw UnsupportedError("spectrum estimation supports scalar and diagonal systems only");
  }
  SpectrumEstimate est;
  est.window = options.window.final_window();
  std::vector<std::pair<SpectralInterval, double>> raw;
  for (int i = 0; i < system.dimension(); ++i) {
    auto b = bohl_exponents(system, rate, options, i);
    const double unc = std::max(b.lower_uncertainty, b.upper_uncertainty);
    est.uncertainty = std::max(est.uncertainty, unc);
    raw.push_back({{b.lower, b.upper}, unc});
    est.components.push_back(std::move(b));
  }
  std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
    return a.first.lo < b.first.lo || (a.first.lo == b.first.lo && a.first.hi < b.first.hi);
  });
  double current_unc = 0.0;
  for (const auto& [iv, unc] : raw) {
    if (!est.intervals.empty()) {
      auto& last = est.intervals.back();
      const bool touches = iv.lo <= last.hi || (iv.lo.is_finite() && last.hi.is_finite() &&
                                                 iv.lo.value() - last.hi.value() <= std::max(unc, current_unc));
      if (touches) {
        last.hi = std::max(last.hi, iv.hi);
        current_unc = std::max(current_unc, unc);
        continue;
      }
    }
    est.intervals.push_back(iv);
    current_unc = unc;
  }
  return est;
}

bool well_formed(const SpectrumEstimate& estimate, int dimension) {
  const auto& iv = estimate.intervals;
  if (static_cast<int>(iv.size()) > dimension) return false;
  for (std::size_t i = 0; i < iv.size(); ++i) {
    if (!(iv[i].lo <= iv[i].hi)) return false;
    if (i > 0 && !(iv[i - 1].hi < iv[i].lo)) return false;
  }
  return true;
}

namespace {

ResolventResult finite_test(const LinearSystem& system, const GrowthRate& rate, double gamma,
                            const ResolventOptions& options) {
  ResolventResult result;
  result.tested_gamma = gamma;
  const LinearSystem shifted = shift_system(system, rate, gamma);
  const int n = system.dimension();
  std::vector<bool> stable(n);
  double alpha = -kInf, beta = kInf;
  for (int i = 0; i < n; ++i) {
    const auto b = bohl_exponents(shifted, rate, options.bohl, i);
    if (b.upper < ExtendedReal(-options.margin)) {
      stable[i] = true;
      alpha = std::max(alpha, b.upper.is_finite() ? 0.5 * b.upper.value() : -1.0);
    } else if (b.lower > ExtendedReal(options.margin)) {
      stable[i] = false;
      beta = std::min(beta, b.lower.is_finite() ? 0.5 * b.lower.value() : 1.0);
    } else {
      std::ostringstream msg;
      msg << "component " << i << " has exponents [" << b.lower.to_string() << ", " << b.upper.to_string()
          << "] touching the shift";
      result.diagnostic = msg.str();
      return result;
    }
  }
  const bool all_stable = std::all_of(stable.begin(), stable.end(), [](bool s) { return s; });
  const bool none_stable = std::none_of(stable.begin(), stable.end(), [](bool s) { return s; });
  Projector projector = Projector::zero();
  if (all_stable) {
    projector = Projector::identity();
  } else if (!none_stable) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) p(i, i) = stable[i] ? 1.0 : 0.0;
    projector = Projector::constant(p);
  }
  std::optional<double> a, b, th, nu;
  if (!none_stable) {
    a = alpha;
    th = 0.0;
  }
  if (!all_stable) {
    b = beta;
    nu = 0.0;
  }
  const auto fit = fit_minimal_K(shifted, projector, rate, a, b, 0.0, 0.0, options.fit);
  if (!fit.stable) {
    result.diagnostic = "fitted K did not plateau";
    return result;
  }
  result.in_resolvent = true;
  result.certificate = DichotomyCertificate::from_log_K(projector, fit.log_K, a, b, th, nu, rate);
  return result;
}

}  // namespace

ResolventResult resolvent_test(const LinearSystem& system, const GrowthRate& rate, ExtendedReal gamma,
                               const ResolventOptions& options) {
  if (!system.is_decoupled()) {
    throw UnsupportedError("resolvent test supports scalar and diagonal systems only");
  }
  if (gamma.is_finite()) return finite_test(system, rate, gamma.value(), options);

  // Anchor beyond every finite exponent of the unshifted system.
  const bool plus = gamma.is_pos_infinity();
  double anchor = plus ? -kInf : kInf;
  for (int i = 0; i < system.dimension(); ++i) {
    const auto b = bohl_exponents(system, rate, options.bohl, i);
    const ExtendedReal edge = plus ? b.upper : b.lower;
    if (edge.is_finite()) anchor = plus ? std::max(anchor, edge.value() + 1.0) : std::min(anchor, edge.value() - 1.0);
    if ((plus && edge.is_pos_infinity()) || (!plus && edge.is_neg_infinity())) {
      ResolventResult r;
      r.diagnostic = "component " + std::to_string(i) + " has an infinite exponent on the tested side";
      return r;
    }
  }
  if (!std::isfinite(anchor)) anchor = 0.0;
  ResolventResult r = finite_test(system, rate, anchor, options);
  const ProjectorKind wanted = plus ? ProjectorKind::Identity : ProjectorKind::Zero;
  if (r.in_resolvent && r.certificate->projector().kind() != wanted) {
    r.in_resolvent = false;
    r.diagnostic = "anchor shift produced the wrong projector";
    r.certificate.reset();
  }
  return r;
}

}  // namespace growthdyn
