#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace growthdyn {

/// Sorted grid on [-final, final]: uniform core on [-initial, initial] with
/// core_intervals intervals; each doubling shell [T_k, 2T_k] (both signs) gets
/// core_intervals / 2 uniform intervals. Grids for smaller final windows are
/// subsets of grids for larger ones.
std::vector<double> nested_uniform_grid(double initial, double final_window, int core_intervals);

/// Same core, but each doubling shell holds shell_points geometrically spaced
/// points. Used where windows reach 1e9 and pair counts are quadratic.
std::vector<double> nested_geometric_grid(double initial, double final_window, int core_intervals,
                                          int shell_points);

/// Index range [lo, hi) of a sorted grid restricted to |g| <= window.
std::pair<std::size_t, std::size_t> window_range(const std::vector<double>& grid, double window);

struct PairGridShape {
  double half_width = 20.0;
  double anchor_spacing = 0.25;
  /// Uniform separations in (0, fine_limit].
  int fine_offsets = 20;
  double fine_limit = 1.0;
  /// Geometric separations in (fine_limit, max_separation].
  int offsets_per_doubling = 8;
  /// Defaults to 2 * half_width.
  std::optional<double> max_separation;
  /// Non-zero seeds jitter anchors (except s = 0) by up to a quarter spacing.
  std::uint64_t seed = 0;
};

/// Anchors s in [-T, T] and separations d >= 0. Stable-branch pairs are
/// (s + d, s), unstable-branch pairs (s - d, s).
class PairGrid {
 public:
  static PairGrid build(const PairGridShape& shape);
  PairGrid(std::vector<double> anchors, std::vector<double> offsets);

  const std::vector<double>& anchors() const { return anchors_; }
  const std::vector<double>& offsets() const { return offsets_; }
  std::size_t pair_count() const { return 2 * anchors_.size() * offsets_.size(); }
  bool empty() const { return anchors_.empty() || offsets_.empty(); }
  double max_separation() const;

 private:
  std::vector<double> anchors_;
  std::vector<double> offsets_;
};

}  // namespace growthdyn
