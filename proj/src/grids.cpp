#include "growthdyn/grids.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "growthdyn/errors.hpp"

namespace growthdyn {

namespace {

void check_window(double initial, double final_window) {
  if (!(initial > 0.0) || !std::isfinite(initial) || !(final_window >= initial)) {
    throw ParameterError("window schedule requires 0 < initial <= final window");
  }
}

std::vector<double> mirror(std::vector<double> positive) {
  std::vector<double> grid;
  grid.reserve(2 * positive.size() + 1);
  for (auto it = positive.rbegin(); it != positive.rend(); ++it) grid.push_back(-*it);
  grid.push_back(0.0);
  grid.insert(grid.end(), positive.begin(), positive.end());
  return grid;
}

}  // namespace

std::vector<double> nested_uniform_grid(double initial, double final_window, int core_intervals) {
  check_window(initial, final_window);
  if (core_intervals < 2 || core_intervals % 2 != 0) {
    throw ParameterError("core_intervals must be an even number >= 2");
  }
  const int half = core_intervals / 2;
  std::vector<double> positive;
  for (int j = 1; j <= half; ++j) positive.push_back(initial * j / half);
  for (double lo = initial; lo < final_window * (1 - 1e-12); lo *= 2.0) {
    for (int j = 1; j <= half; ++j) positive.push_back(lo + lo * j / half);
  }
  return mirror(std::move(positive));
}

std::vector<double> nested_geometric_grid(double initial, double final_window, int core_intervals,
                                          int shell_points) {
  check_window(initial, final_window);
  if (core_intervals < 2 || core_intervals % 2 != 0 || shell_points < 1) {
    throw ParameterError("grid needs an even core_intervals >= 2 and shell_points >= 1");
  }
  const int half = core_intervals / 2;
  std::vector<double> positive;
  for (int j = 1; j <= half; ++j) positive.push_back(initial * j / half);
  for (double lo = initial; lo < final_window * (1 - 1e-12); lo *= 2.0) {
    for (int j = 1; j <= shell_points; ++j) {
      positive.push_back(j == shell_points ? 2.0 * lo : lo * std::exp2(double(j) / shell_points));
    }
  }
  return mirror(std::move(positive));
}

std::pair<std::size_t, std::size_t> window_range(const std::vector<double>& grid, double window) {
  const double slack = window * 1e-12;
  auto lo = std::lower_bound(grid.begin(), grid.end(), -window - slack);
  auto hi = std::upper_bound(grid.begin(), grid.end(), window + slack);
  return {std::size_t(lo - grid.begin()), std::size_t(hi - grid.begin())};
}

PairGrid::PairGrid(std::vector<double> anchors, std::vector<double> offsets)
    : anchors_(std::move(anchors)), offsets_(std::move(offsets)) {
  std::sort(anchors_.begin(), anchors_.end());
  std::sort(offsets_.begin(), offsets_.end());
  for (double d : offsets_) {
    if (d < 0.0 || !std::isfinite(d)) throw ParameterError("pair grid offsets must be finite and >= 0");
  }
  for (double s : anchors_) {
    if (!std::isfinite(s)) throw ParameterError("pair grid anchors must be finite");
  }
}

PairGrid PairGrid::build(const PairGridShape& shape) {
  if (!(shape.half_width > 0.0) || !(shape.anchor_spacing > 0.0) || shape.fine_offsets < 0 ||
      shape.offsets_per_doubling < 1 || !(shape.fine_limit > 0.0)) {
    throw ParameterError("invalid pair grid shape");
  }
  const double max_sep = shape.max_separation.value_or(2.0 * shape.half_width);
  if (!(max_sep > 0.0)) throw ParameterError("pair grid max_separation must be positive");

  const long half_count = std::lround(std::floor(shape.half_width / shape.anchor_spacing + 1e-9));
  std::vector<double> anchors;
  std::mt19937_64 rng(shape.seed);
  std::uniform_real_distribution<double> jitter(-0.25 * shape.anchor_spacing, 0.25 * shape.anchor_spacing);
  for (long i = -half_count; i <= half_count; ++i) {
    double s = double(i) * shape.anchor_spacing;
    if (shape.seed != 0 && i != 0) s += jitter(rng);
    anchors.push_back(s);
  }

  std::vector<double> offsets{0.0};
  const double fine_limit = std::min(shape.fine_limit, max_sep);
  for (int j = 1; j <= shape.fine_offsets; ++j) offsets.push_back(fine_limit * j / shape.fine_offsets);
  for (int j = 1;; ++j) {
    const double d = fine_limit * std::exp2(double(j) / shape.offsets_per_doubling);
    if (d >= max_sep * (1 - 1e-12)) {
      if (offsets.back() < max_sep) offsets.push_back(max_sep);
      break;
    }
    offsets.push_back(d);
  }
  return PairGrid(std::move(anchors), std::move(offsets));
}

double PairGrid::max_separation() const { return offsets_.empty() ? 0.0 : offsets_.back(); }

}  // namespace growthdyn
