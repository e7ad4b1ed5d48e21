#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace bbrt {

class OutOfDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense rectilinear grid. Non-periodic dimensions place nodes at
/// min + k * spacing with spacing = span / (points - 1); periodic dimensions
/// use spacing = span / points, so the node at `max` is identified with the
/// node at `min` and is not stored.
class Grid {
 public:
  Grid(std::vector<double> mins, std::vector<double> maxs,
       std::vector<int> point_counts, std::vector<bool> periodic);

  int dim_count() const { return static_cast<int>(mins_.size()); }
  std::size_t node_count() const { return node_count_; }
  double min(int d) const { return mins_[d]; }
  double max(int d) const { return maxs_[d]; }
  double span(int d) const { return maxs_[d] - mins_[d]; }
  int points(int d) const { return point_counts_[d]; }
  bool periodic(int d) const { return periodic_[d] != 0; }
  double spacing(int d) const { return spacing_[d]; }
  double min_spacing() const;

  const std::vector<double>& mins() const { return mins_; }
  const std::vector<double>& maxs() const { return maxs_; }
  const std::vector<int>& point_counts() const { return point_counts_; }
  std::vector<bool> periodic_flags() const;

  double coordinate(int d, int k) const { return mins_[d] + spacing_[d] * k; }

  std::span<const std::size_t> strides() const { return strides_; }
  std::size_t flat_index(std::span<const int> idx) const;
  void unflatten(std::size_t flat, std::span<int> idx) const;
  void node_coordinates(std::size_t flat, std::span<double> x) const;

  /// Wraps a periodic coordinate into [min, min + span); identity otherwise.
  double wrap(int d, double x) const;

  /// True when x falls inside the box after periodic wrapping (with a small
  /// relative tolerance at non-periodic faces).
  bool contains(std::span<const double> x) const;

  struct Location {
    int cell;     // lower node index of the bracketing cell
    double frac;  // fractional position within the cell, in [0, 1]
  };
  /// Locates x along dim d. Throws OutOfDomainError for a non-periodic
  /// coordinate outside [min, max].
  Location locate(int d, double x) const;

  /// Index of the node above `cell` in dim d, accounting for periodic wrap.
  int upper_neighbor(int d, int cell) const;

  bool operator==(const Grid& other) const;

  /// FNV-1a digest of the grid parameters; used for bank integrity checks.
  std::uint64_t fingerprint() const;

 private:
  std::vector<double> mins_, maxs_, spacing_;
  std::vector<int> point_counts_;
  std::vector<std::uint8_t> periodic_;
  std::vector<std::size_t> strides_;
  std::size_t node_count_ = 0;
};

Grid build_grid(std::vector<double> mins, std::vector<double> maxs,
                std::vector<int> point_counts, std::vector<bool> periodic);

/// Time-indexed family of node arrays. Time stamps run from 0 down to -T in
/// the order the solver produced them; values are stored time-slice-major,
/// node-major (row-major over dims in declared order) within a slice.
class ValueFunction {
 public:
  ValueFunction(std::shared_ptr<const Grid> grid, std::vector<double> time_stamps,
                std::vector<double> values);

  const Grid& grid() const { return *grid_; }
  const std::shared_ptr<const Grid>& grid_ptr() const { return grid_; }
  const std::vector<double>& time_stamps() const { return time_stamps_; }
  int slice_count() const { return static_cast<int>(time_stamps_.size()); }
  double horizon() const { return -time_stamps_.back(); }

  std::span<const double> slice(int t) const;
  std::span<double> mutable_slice(int t);
  const std::vector<double>& values() const { return values_; }

 private:
  std::shared_ptr<const Grid> grid_;
  std::vector<double> time_stamps_;
  std::vector<double> values_;
};

/// Signed distance to the collision disk in the (p^x_rel, p^y_rel) plane,
/// evaluated at every node: l(x) = hypot(px, py) - radius. Grid dims 0 and 1
/// must be the relative position coordinates.
std::vector<double> collision_surface(const Grid& grid, double collision_radius);

/// Multilinear interpolation of a single node array at point x.
double interpolate_slice(const Grid& grid, std::span<const double> values,
                         std::span<const double> x);

/// Space-time interpolation: multilinear in space, linear between the two
/// bracketing time stamps. tau is clamped to the stored stamp range.
double interpolate(const ValueFunction& vf, double tau, std::span<const double> x);

/// Like interpolate, but reports out-of-domain queries instead of throwing.
std::optional<double> try_interpolate(const ValueFunction& vf, double tau,
                                      std::span<const double> x);

/// One-sided first-order differences per dimension. At non-periodic
/// boundaries the ghost node is linearly extrapolated, which makes the
/// one-sided difference equal to its interior partner; periodic dims wrap.
struct UpwindGradients {
  std::vector<std::vector<double>> left;   // [dim][node]
  std::vector<std::vector<double>> right;  // [dim][node]
};
UpwindGradients upwind_gradients(const Grid& grid, std::span<const double> values);

}  // namespace bbrt
