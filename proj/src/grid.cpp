#include "bbrt/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "bbrt/util.hpp"

namespace bbrt {

namespace {

// Relative slack at non-periodic faces so round-off at the box edge does not
// reject legitimate queries.
constexpr double kEdgeTol = 1e-9;

}  // namespace

Grid::Grid(std::vector<double> mins, std::vector<double> maxs,
           std::vector<int> point_counts, std::vector<bool> periodic)
    : mins_(std::move(mins)),
      maxs_(std::move(maxs)),
      point_counts_(std::move(point_counts)) {
  const std::size_t d = mins_.size();
  if (maxs_.size() != d || point_counts_.size() != d || periodic.size() != d) {
    throw std::invalid_argument("grid: dimension mismatch between inputs");
  }
  if (d == 0) throw std::invalid_argument("grid: zero-dimensional grid");
  periodic_.resize(d);
  for (std::size_t i = 0; i < d; ++i) periodic_[i] = periodic[i] ? 1 : 0;

  spacing_.resize(d);
  node_count_ = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (!(maxs_[i] > mins_[i])) {
      throw std::invalid_argument("grid: non-positive span in dim " + std::to_string(i));
    }
    if (point_counts_[i] < 3) {
      throw std::invalid_argument("grid: point count < 3 in dim " + std::to_string(i));
    }
    const double span = maxs_[i] - mins_[i];
    spacing_[i] = periodic_[i] ? span / point_counts_[i] : span / (point_counts_[i] - 1);
    node_count_ *= static_cast<std::size_t>(point_counts_[i]);
  }

  strides_.resize(d);
  std::size_t stride = 1;
  for (std::size_t i = d; i-- > 0;) {
    strides_[i] = stride;
    stride *= static_cast<std::size_t>(point_counts_[i]);
  }
}

double Grid::min_spacing() const {
  return *std::min_element(spacing_.begin(), spacing_.end());
}

std::vector<bool> Grid::periodic_flags() const {
  std::vector<bool> out(periodic_.size());
  for (std::size_t i = 0; i < periodic_.size(); ++i) out[i] = periodic_[i] != 0;
  return out;
}

std::size_t Grid::flat_index(std::span<const int> idx) const {
  std::size_t flat = 0;
  for (int d = 0; d < dim_count(); ++d) flat += strides_[d] * static_cast<std::size_t>(idx[d]);
  return flat;
}

void Grid::unflatten(std::size_t flat, std::span<int> idx) const {
  for (int d = 0; d < dim_count(); ++d) {
    idx[d] = static_cast<int>(flat / strides_[d]);
    flat -= strides_[d] * static_cast<std::size_t>(idx[d]);
  }
}

void Grid::node_coordinates(std::size_t flat, std::span<double> x) const {
  for (int d = 0; d < dim_count(); ++d) {
    const std::size_t k = flat / strides_[d];
    flat -= strides_[d] * k;
    x[d] = coordinate(d, static_cast<int>(k));
  }
}

double Grid::wrap(int d, double x) const {
  if (!periodic_[d]) return x;
  const double s = span(d);
  double y = std::fmod(x - mins_[d], s);
  if (y < 0.0) y += s;
  return mins_[d] + y;
}

bool Grid::contains(std::span<const double> x) const {
  for (int d = 0; d < dim_count(); ++d) {
    if (periodic_[d]) continue;
    const double tol = kEdgeTol * span(d);
    if (x[d] < mins_[d] - tol || x[d] > maxs_[d] + tol) return false;
  }
  return true;
}

Grid::Location Grid::locate(int d, double x) const {
  if (periodic_[d]) {
    const double y = wrap(d, x);
    double u = (y - mins_[d]) / spacing_[d];
    int cell = static_cast<int>(std::floor(u));
    cell = std::clamp(cell, 0, point_counts_[d] - 1);
    return {cell, u - cell};
  }
  const double tol = kEdgeTol * span(d);
  if (x < mins_[d] - tol || x > maxs_[d] + tol) {
    throw OutOfDomainError("coordinate outside grid box in dim " + std::to_string(d));
  }
  double u = (x - mins_[d]) / spacing_[d];
  int cell = static_cast<int>(std::floor(u));
  cell = std::clamp(cell, 0, point_counts_[d] - 2);
  double frac = u - cell;
  frac = std::clamp(frac, 0.0, 1.0);
  return {cell, frac};
}

int Grid::upper_neighbor(int d, int cell) const {
  const int n = point_counts_[d];
  if (cell + 1 < n) return cell + 1;
  return periodic_[d] ? 0 : n - 1;
}

bool Grid::operator==(const Grid& other) const {
  return mins_ == other.mins_ && maxs_ == other.maxs_ &&
         point_counts_ == other.point_counts_ && periodic_ == other.periodic_;
}

std::uint64_t Grid::fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ull;
    }
  };
  for (int d = 0; d < dim_count(); ++d) {
    mix(&mins_[d], sizeof(double));
    mix(&maxs_[d], sizeof(double));
    mix(&point_counts_[d], sizeof(int));
    mix(&periodic_[d], 1);
  }
  return h;
}

Grid build_grid(std::vector<double> mins, std::vector<double> maxs,
                std::vector<int> point_counts, std::vector<bool> periodic) {
  return Grid(std::move(mins), std::move(maxs), std::move(point_counts), std::move(periodic));
}

ValueFunction::ValueFunction(std::shared_ptr<const Grid> grid,
                             std::vector<double> time_stamps, std::vector<double> values)
    : grid_(std::move(grid)),
      time_stamps_(std::move(time_stamps)),
      values_(std::move(values)) {
  if (time_stamps_.empty()) throw std::invalid_argument("value function: no time stamps");
  if (values_.size() != time_stamps_.size() * grid_->node_count()) {
    throw std::invalid_argument("value function: values size mismatch");
  }
  for (std::size_t i = 1; i < time_stamps_.size(); ++i) {
    if (!(time_stamps_[i] < time_stamps_[i - 1])) {
      throw std::invalid_argument("value function: time stamps must be strictly decreasing");
    }
  }
}

std::span<const double> ValueFunction::slice(int t) const {
  return {values_.data() + static_cast<std::size_t>(t) * grid_->node_count(),
          grid_->node_count()};
}

std::span<double> ValueFunction::mutable_slice(int t) {
  return {values_.data() + static_cast<std::size_t>(t) * grid_->node_count(),
          grid_->node_count()};
}

std::vector<double> collision_surface(const Grid& grid, double collision_radius) {
  if (!(collision_radius > 0.0)) {
    throw std::invalid_argument("collision_surface: radius must be positive");
  }
  if (grid.dim_count() < 2) {
    throw std::invalid_argument("collision_surface: grid needs px/py dims");
  }
  std::vector<double> out(grid.node_count());
  const std::size_t s0 = grid.strides()[0];
  const std::size_t s1 = grid.strides()[1];
  const std::size_t tail = s1;  // nodes per (px, py) pair
  for (int i = 0; i < grid.points(0); ++i) {
    const double px = grid.coordinate(0, i);
    for (int j = 0; j < grid.points(1); ++j) {
      const double py = grid.coordinate(1, j);
      const double v = std::hypot(px, py) - collision_radius;
      double* base = out.data() + s0 * i + s1 * j;
      std::fill(base, base + tail, v);
    }
  }
  return out;
}

double interpolate_slice(const Grid& grid, std::span<const double> values,
                         std::span<const double> x) {
  const int dim = grid.dim_count();
  if (dim > 16) throw std::invalid_argument("interpolate: dim > 16 unsupported");
  int cell[16];
  double frac[16];
  for (int d = 0; d < dim; ++d) {
    const auto loc = grid.locate(d, x[d]);
    cell[d] = loc.cell;
    frac[d] = loc.frac;
  }
  double acc = 0.0;
  const unsigned corners = 1u << dim;
  for (unsigned mask = 0; mask < corners; ++mask) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int d = 0; d < dim; ++d) {
      if (mask & (1u << d)) {
        w *= frac[d];
        flat += grid.strides()[d] * static_cast<std::size_t>(grid.upper_neighbor(d, cell[d]));
      } else {
        w *= 1.0 - frac[d];
        flat += grid.strides()[d] * static_cast<std::size_t>(cell[d]);
      }
    }
    if (w != 0.0) acc += w * values[flat];
  }
  return acc;
}

double interpolate(const ValueFunction& vf, double tau, std::span<const double> x) {
  const auto& stamps = vf.time_stamps();
  const double t_last = stamps.back();
  if (tau >= stamps.front()) return interpolate_slice(vf.grid(), vf.slice(0), x);
  if (tau <= t_last) {
    return interpolate_slice(vf.grid(), vf.slice(vf.slice_count() - 1), x);
  }
  // Stamps are strictly decreasing; find the bracketing pair.
  int hi = 0;
  while (stamps[hi + 1] > tau) ++hi;
  const double t0 = stamps[hi], t1 = stamps[hi + 1];
  const double w = (t0 - tau) / (t0 - t1);
  const double v0 = interpolate_slice(vf.grid(), vf.slice(hi), x);
  const double v1 = interpolate_slice(vf.grid(), vf.slice(hi + 1), x);
  return v0 + w * (v1 - v0);
}

std::optional<double> try_interpolate(const ValueFunction& vf, double tau,
                                      std::span<const double> x) {
  if (!vf.grid().contains(x)) return std::nullopt;
  return interpolate(vf, tau, x);
}

UpwindGradients upwind_gradients(const Grid& grid, std::span<const double> values) {
  if (values.size() != grid.node_count()) {
    throw std::invalid_argument("upwind_gradients: values size mismatch");
  }
  const int dim = grid.dim_count();
  UpwindGradients out;
  out.left.assign(dim, std::vector<double>(grid.node_count()));
  out.right.assign(dim, std::vector<double>(grid.node_count()));

  std::vector<int> idx(dim, 0);
  for (std::size_t flat = 0; flat < grid.node_count(); ++flat) {
    for (int d = 0; d < dim; ++d) {
      const int n = grid.points(d);
      const std::size_t stride = grid.strides()[d];
      const double inv_h = 1.0 / grid.spacing(d);
      const int k = idx[d];
      const double v = values[flat];
      if (grid.periodic(d)) {
        const std::size_t below = (k > 0) ? flat - stride : flat + stride * (n - 1);
        const std::size_t above = (k + 1 < n) ? flat + stride : flat - stride * (n - 1);
        out.left[d][flat] = (v - values[below]) * inv_h;
        out.right[d][flat] = (values[above] - v) * inv_h;
      } else {
        // Linear-extrapolation ghost nodes collapse the boundary one-sided
        // difference onto its interior partner.
        if (k == 0) {
          const double fwd = (values[flat + stride] - v) * inv_h;
          out.left[d][flat] = fwd;
          out.right[d][flat] = fwd;
        } else if (k == n - 1) {
          const double bwd = (v - values[flat - stride]) * inv_h;
          out.left[d][flat] = bwd;
          out.right[d][flat] = bwd;
        } else {
          out.left[d][flat] = (v - values[flat - stride]) * inv_h;
          out.right[d][flat] = (values[flat + stride] - v) * inv_h;
        }
      }
    }
    // Odometer increment of the multi-index.
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < grid.points(d)) break;
      idx[d] = 0;
    }
  }
  return out;
}

}  // namespace bbrt
