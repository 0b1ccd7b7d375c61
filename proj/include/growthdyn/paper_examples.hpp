#pragma once

#include <optional>
#include <string>
#include <vector>

#include "growthdyn/config.hpp"
#include "growthdyn/dichotomy.hpp"
#include "growthdyn/linear_system.hpp"

namespace growthdyn {

/// The three worked systems and their published constants.
namespace examples {
/// x' = x / (1 + |t|); (0; 1, *, 1) and growth (1, 1, 0) under p.
LinearSystem polynomial_system();
/// x' = 2|t| x; (0; 1, *, 1) and growth (1, 1, 0) under s_2.
LinearSystem quadratic_system();
/// x' = -(lambda + eta t sin t) x with lambda = 1, eta = 0.2.
LinearSystem nonuniform_system();
inline constexpr double kLambda = 1.0;
inline constexpr double kEta = 0.2;

DichotomyCertificate polynomial_dichotomy();
DichotomyCertificate quadratic_dichotomy();
/// (Id; e^{2 eta}, -lambda + eta, *, 2 eta, *) under exp.
DichotomyCertificate nonuniform_dichotomy();
GrowthCertificate polynomial_growth();
GrowthCertificate quadratic_growth();
/// (e^{2 eta}, lambda + eta, 2 eta) under exp.
GrowthCertificate nonuniform_growth();

/// Pair grid used by the suite and the acceptance checks.
PairGrid verification_grid();
}  // namespace examples

enum class Mutation { None, HalvedK, FlippedAlphaSign, WrongPropagationExponent };

std::string to_string(Mutation mutation);

struct SuiteCheck {
  std::string name;
  bool pass = false;
  Json detail;
};

struct SuiteResult {
  std::vector<SuiteCheck> checks;
  bool all_pass() const;
  std::vector<std::string> failed() const;
};

/// Fixed reproduction battery over the three examples: certificates,
/// propagation at tau in {-3, 0, 3}, spectra, hull probes and classifications.
/// A mutation corrupts one constant so the battery can be shown to bite.
SuiteResult paper_examples_suite(Mutation mutation = Mutation::None);

}  // namespace growthdyn
