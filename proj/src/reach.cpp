#include "bbrt/reach.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bbrt/parallel.hpp"
#include "bbrt/util.hpp"

namespace bbrt {

std::vector<double> HamiltonianModel::robot_control(const double*, const double*) const {
  throw std::logic_error("this Hamiltonian model does not expose a robot control");
}

RelativeGameHamiltonian::RelativeGameHamiltonian(ControlBounds bounds_h,
                                                 RobotControlBox robot_box,
                                                 VehicleParams params,
                                                 int steer_candidate_count)
    : bounds_h_(bounds_h),
      robot_box_(robot_box),
      params_(params),
      cands_(SteerCandidates::build(robot_box, params, steer_candidate_count)) {
  if (!bounds_h_.valid()) throw std::invalid_argument("invalid human control bounds");
  max_abs_sin_slip_ = 0.0;
  for (double s : cands_.sin_slip) max_abs_sin_slip_ = std::max(max_abs_sin_slip_, std::abs(s));
  // The candidate set endpoints reach the box corners, where |sin(slip)| is
  // largest, but guard against a degenerate single-candidate set.
  const double corner = std::max(std::abs(std::sin(sideslip(robot_box.steer_lo, params))),
                                 std::abs(std::sin(sideslip(robot_box.steer_hi, params))));
  max_abs_sin_slip_ = std::max(max_abs_sin_slip_, corner);
}

double RelativeGameHamiltonian::hamiltonian(const double* x, const double* costate) const {
  const RelativeState s = RelativeState::from_array({x, 5});
  return bbrt::hamiltonian(s, {costate, 5}, bounds_h_, robot_box_, params_, cands_);
}

void RelativeGameHamiltonian::flow_bounds(const double* x, double* alpha) const {
  const double px = std::abs(x[0]);
  const double py = std::abs(x[1]);
  const double vr = std::abs(x[3]);
  const double vh = std::abs(x[4]);
  const double yaw = vr / params_.l_r * max_abs_sin_slip_;
  alpha[0] = yaw * py + vh + vr;
  alpha[1] = yaw * px + vh + vr * max_abs_sin_slip_;
  alpha[2] = std::max(std::abs(bounds_h_.omega_lo), std::abs(bounds_h_.omega_hi)) + yaw;
  alpha[3] = std::max(std::abs(robot_box_.a_lo), std::abs(robot_box_.a_hi));
  alpha[4] = std::max(std::abs(bounds_h_.a_lo), std::abs(bounds_h_.a_hi));
}

std::vector<double> RelativeGameHamiltonian::robot_control(const double* x,
                                                           const double* costate) const {
  const RelativeState s = RelativeState::from_array({x, 5});
  const ExtremalControls u = extremal(s, {costate, 5});
  return {u.robot.accel, u.robot.steer};
}

ExtremalControls RelativeGameHamiltonian::extremal(const RelativeState& x,
                                                   std::span<const double> costate) const {
  return extremal_controls(costate, bounds_h_, robot_box_, x, params_, cands_);
}

std::vector<double> estimate_dissipation(const Grid& grid, const HamiltonianModel& model,
                                         double inflation) {
  const int dim = grid.dim_count();
  if (dim != model.dim()) throw std::invalid_argument("dissipation: model/grid dim mismatch");
  if (dim > 16) throw std::invalid_argument("dissipation: dim > 16 unsupported");

  // 3 samples per dim (faces and center); the flow bounds of interest are
  // monotone in |coordinate|, so this catches the extremes.
  const int samples = 3;
  std::vector<double> alphas(dim, 0.0);
  std::vector<double> tmp(dim, 0.0);
  double x[16];
  int idx[16] = {0};
  const std::size_t total = [&] {
    std::size_t t = 1;
    for (int d = 0; d < dim; ++d) t *= samples;
    return t;
  }();
  for (std::size_t it = 0; it < total; ++it) {
    for (int d = 0; d < dim; ++d) {
      x[d] = grid.min(d) + grid.span(d) * idx[d] / (samples - 1);
    }
    model.flow_bounds(x, tmp.data());
    for (int d = 0; d < dim; ++d) alphas[d] = std::max(alphas[d], tmp[d]);
    for (int d = dim - 1; d >= 0; --d) {
      if (++idx[d] < samples) break;
      idx[d] = 0;
    }
  }
  for (double& a : alphas) a *= inflation;
  return alphas;
}

double stable_time_step(const Grid& grid, std::span<const double> alphas, double cfl) {
  double sum = 0.0;
  for (int d = 0; d < grid.dim_count(); ++d) sum += alphas[d] / grid.spacing(d);
  if (!(sum > 0.0)) throw std::invalid_argument("stable_time_step: zero dynamics");
  return cfl / sum;
}

namespace {

/// One forward-Euler local Lax-Friedrichs step of length h with the
/// variational inequality applied as out = min(prev, stepped).
bool llf_step(const Grid& grid, const HamiltonianModel& model,
              std::span<const double> alphas, std::span<const double> v,
              std::span<double> out, double h, int threads) {
  const int dim = grid.dim_count();
  std::atomic<bool> finite{true};
  parallel_for(grid.node_count(), threads, [&](std::size_t begin, std::size_t end) {
    int idx[16];
    double x[16];
    double p_avg[16];
    grid.unflatten(begin, {idx, static_cast<std::size_t>(dim)});
    for (int d = 0; d < dim; ++d) x[d] = grid.coordinate(d, idx[d]);
    bool chunk_finite = true;
    for (std::size_t flat = begin; flat < end; ++flat) {
      const double value = v[flat];
      double diss = 0.0;
      for (int d = 0; d < dim; ++d) {
        const int n = grid.points(d);
        const std::size_t stride = grid.strides()[d];
        const double inv_h = 1.0 / grid.spacing(d);
        const int k = idx[d];
        double dm, dp;
        if (grid.periodic(d)) {
          const std::size_t below = (k > 0) ? flat - stride : flat + stride * (n - 1);
          const std::size_t above = (k + 1 < n) ? flat + stride : flat - stride * (n - 1);
          dm = (value - v[below]) * inv_h;
          dp = (v[above] - value) * inv_h;
        } else if (k == 0) {
          dm = dp = (v[flat + stride] - value) * inv_h;
        } else if (k == n - 1) {
          dm = dp = (value - v[flat - stride]) * inv_h;
        } else {
          dm = (value - v[flat - stride]) * inv_h;
          dp = (v[flat + stride] - value) * inv_h;
        }
        p_avg[d] = 0.5 * (dm + dp);
        diss += 0.5 * alphas[d] * (dp - dm);
      }
      const double ham = model.hamiltonian(x, p_avg);
      const double candidate = value + h * (ham + diss);
      const double next = std::min(value, candidate);
      out[flat] = next;
      chunk_finite &= std::isfinite(next);

      for (int d = dim - 1; d >= 0; --d) {
        if (++idx[d] < grid.points(d)) {
          x[d] = grid.coordinate(d, idx[d]);
          break;
        }
        idx[d] = 0;
        x[d] = grid.coordinate(d, 0);
      }
    }
    if (!chunk_finite) finite = false;
  });
  return finite.load();
}

}  // namespace

BRTSolution solve_hji_vi(std::shared_ptr<const Grid> grid, std::span<const double> surface,
                         const HamiltonianModel& model, double horizon, double dt,
                         const SolverSettings& settings) {
  if (!grid) throw std::invalid_argument("solve: null grid");
  if (surface.size() != grid->node_count()) {
    throw std::invalid_argument("solve: surface size mismatch");
  }
  if (!(horizon >= 0.0)) throw std::invalid_argument("solve: horizon must be non-negative");
  if (grid->dim_count() != model.dim()) throw std::invalid_argument("solve: dim mismatch");

  if (horizon == 0.0) {
    // Zero-length solve: the terminal condition is the whole answer.
    SolverMeta meta{dt, settings.cfl, settings.record_dt, {}};
    ValueFunction vf(std::move(grid), {0.0}, {surface.begin(), surface.end()});
    return BRTSolution{std::move(vf), ControlBounds{}, 0.0, std::move(meta)};
  }

  std::vector<double> alphas = settings.dissipation_override;
  if (alphas.empty()) {
    alphas = estimate_dissipation(*grid, model, settings.dissipation_inflation);
  } else if (alphas.size() != static_cast<std::size_t>(grid->dim_count())) {
    throw std::invalid_argument("solve: dissipation override size mismatch");
  }

  const double dt_stable = stable_time_step(*grid, alphas, settings.cfl);
  if (dt <= 0.0) dt = dt_stable;
  if (dt > dt_stable * (1.0 + 1e-12)) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "CFL violation: dt=%.6g exceeds stable step %.6g (cfl=%.3g)", dt,
                  dt_stable, settings.cfl);
    throw CflViolationError(msg);
  }

  const int n_steps = static_cast<int>(std::ceil(horizon / dt - 1e-9));
  const double record_dt = settings.record_dt > 0.0 ? settings.record_dt : dt;
  const int record_stride = std::max(1, static_cast<int>(std::llround(record_dt / dt)));

  std::vector<double> stamps;
  std::vector<double> stored;
  stamps.push_back(0.0);
  stored.insert(stored.end(), surface.begin(), surface.end());

  std::vector<double> cur(surface.begin(), surface.end());
  std::vector<double> next(cur.size());

  double tau = 0.0;
  for (int k = 1; k <= n_steps; ++k) {
    const double target = (k == n_steps) ? -horizon : -dt * k;
    const double h = tau - target;
    if (!(h > 0.0)) continue;
    const bool finite = llf_step(*grid, model, alphas, cur, next, h, settings.threads);
    if (!finite) {
      char msg[120];
      std::snprintf(msg, sizeof(msg), "non-finite value detected at tau=%.6g (step %d)",
                    target, k);
      throw NumericalBlowupError(msg);
    }
    cur.swap(next);
    tau = target;
    if (k == n_steps || k % record_stride == 0) {
      if (tau < stamps.back() - 1e-12) {
        stamps.push_back(tau);
        stored.insert(stored.end(), cur.begin(), cur.end());
      }
    }
  }

  SolverMeta meta{dt, settings.cfl, record_dt, alphas};
  ValueFunction vf(std::move(grid), std::move(stamps), std::move(stored));
  return BRTSolution{std::move(vf), ControlBounds{}, horizon, std::move(meta)};
}

BRTSolution solve_hji_vi(std::shared_ptr<const Grid> grid, std::span<const double> surface,
                         const ControlBounds& bounds_h, const RobotControlBox& robot_box,
                         const VehicleParams& params, double horizon, double dt,
                         const SolverSettings& settings) {
  RelativeGameHamiltonian model(bounds_h, robot_box, params);
  BRTSolution out = solve_hji_vi(std::move(grid), surface, model, horizon, dt, settings);
  out.bounds_h = bounds_h;
  return out;
}

Membership brt_membership(const BRTSolution& solution, double tau, std::span<const double> x) {
  const auto value = try_interpolate(solution.value_function, tau, x);
  if (!value) {
    return Membership{false, std::numeric_limits<double>::quiet_NaN(), true};
  }
  return Membership{*value <= 0.0, *value, false};
}

std::vector<double> interpolated_gradient(const ValueFunction& vf, double tau,
                                          std::span<const double> x) {
  const Grid& g = vf.grid();
  const int dim = g.dim_count();
  std::vector<double> grad(dim, 0.0);
  std::vector<double> probe(x.begin(), x.end());
  for (int d = 0; d < dim; ++d) {
    const double h = g.spacing(d);
    double lo = x[d] - h, hi = x[d] + h;
    if (!g.periodic(d)) {
      lo = std::max(lo, g.min(d));
      hi = std::min(hi, g.max(d));
    }
    probe[d] = hi;
    const double v_hi = interpolate(vf, tau, probe);
    probe[d] = lo;
    const double v_lo = interpolate(vf, tau, probe);
    probe[d] = x[d];
    grad[d] = (v_hi - v_lo) / (hi - lo);
  }
  return grad;
}

std::vector<double> optimal_safe_control(const BRTSolution& solution, double tau,
                                         std::span<const double> x,
                                         const HamiltonianModel& model) {
  const std::vector<double> grad = interpolated_gradient(solution.value_function, tau, x);
  return model.robot_control(x.data(), grad.data());
}

RobotControl optimal_safe_control(const BRTSolution& solution, double tau,
                                  const RelativeState& x, const RobotControlBox& robot_box,
                                  const VehicleParams& params) {
  RelativeGameHamiltonian model(solution.bounds_h, robot_box, params);
  const auto arr = x.to_array();
  const std::vector<double> u = optimal_safe_control(solution, tau, {arr.data(), 5}, model);
  return RobotControl{u[0], u[1]};
}

}  // namespace bbrt
