#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "bbrt/dynamics.hpp"
#include "bbrt/grid.hpp"

namespace bbrt {

class CflViolationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalBlowupError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Max-min Hamiltonian of one zero-sum avoid game, plus the per-dimension
/// flow bounds the Lax-Friedrichs dissipation needs.
class HamiltonianModel {
 public:
  virtual ~HamiltonianModel() = default;
  virtual int dim() const = 0;
  /// max over robot controls of min over human controls of costate . f.
  virtual double hamiltonian(const double* x, const double* costate) const = 0;
  /// Per-dim upper bound on |f_i| over both control boxes at state x.
  virtual void flow_bounds(const double* x, double* alpha) const = 0;
  /// Maximizing robot control at (x, costate). Optional; used by the safety
  /// controller.
  virtual std::vector<double> robot_control(const double* x, const double* costate) const;
};

/// The 5-D relative human-robot game of the driving monitor.
class RelativeGameHamiltonian : public HamiltonianModel {
 public:
  RelativeGameHamiltonian(ControlBounds bounds_h, RobotControlBox robot_box,
                          VehicleParams params, int steer_candidate_count = 7);

  int dim() const override { return 5; }
  double hamiltonian(const double* x, const double* costate) const override;
  void flow_bounds(const double* x, double* alpha) const override;
  std::vector<double> robot_control(const double* x, const double* costate) const override;

  ExtremalControls extremal(const RelativeState& x, std::span<const double> costate) const;
  const ControlBounds& bounds_h() const { return bounds_h_; }

 private:
  ControlBounds bounds_h_;
  RobotControlBox robot_box_;
  VehicleParams params_;
  SteerCandidates cands_;
  double max_abs_sin_slip_;
};

struct SolverSettings {
  double cfl = 0.5;
  double dissipation_inflation = 1.1;
  /// Cadence of recorded time slices; 0 records every marching step. The
  /// terminal slice and the -T slice are always recorded.
  double record_dt = 0.0;
  int threads = 1;
  /// When non-empty, skips dissipation estimation and uses these
  /// coefficients. Bank solves share one set so nested bounds stay on an
  /// identical time discretization.
  std::vector<double> dissipation_override;
};

struct SolverMeta {
  double dt = 0.0;
  double cfl = 0.0;
  double record_dt = 0.0;
  std::vector<double> alphas;
};

struct BRTSolution {
  ValueFunction value_function;
  ControlBounds bounds_h;
  double horizon = 0.0;
  SolverMeta meta;
};

/// Samples |f_i| bounds over a coarse state lattice and inflates the result.
std::vector<double> estimate_dissipation(const Grid& grid, const HamiltonianModel& model,
                                         double inflation);

/// Largest stable marching step: cfl / sum_i(alpha_i / spacing_i).
double stable_time_step(const Grid& grid, std::span<const double> alphas, double cfl);

/// Marches the final-value HJI variational inequality from tau = 0 to -T
/// with a forward-Euler local Lax-Friedrichs scheme, enforcing the
/// inequality as a running pointwise minimum over steps (tube freezing).
/// Pass dt <= 0 to let the solver pick the largest stable step.
BRTSolution solve_hji_vi(std::shared_ptr<const Grid> grid, std::span<const double> surface,
                         const HamiltonianModel& model, double horizon, double dt,
                         const SolverSettings& settings = {});

/// Convenience overload for the relative driving game.
BRTSolution solve_hji_vi(std::shared_ptr<const Grid> grid, std::span<const double> surface,
                         const ControlBounds& bounds_h, const RobotControlBox& robot_box,
                         const VehicleParams& params, double horizon, double dt,
                         const SolverSettings& settings = {});

struct Membership {
  bool member = false;
  double value = 0.0;
  bool out_of_domain = false;
};

/// Sub-zero level-set membership of the interpolated value at (x, tau).
/// Out-of-domain states are reported as non-members.
Membership brt_membership(const BRTSolution& solution, double tau, std::span<const double> x);

/// Central-difference gradient of the interpolated value function, one-sided
/// at non-periodic domain faces.
std::vector<double> interpolated_gradient(const ValueFunction& vf, double tau,
                                          std::span<const double> x);

/// Maximizing robot control from the value gradient at (x, tau).
std::vector<double> optimal_safe_control(const BRTSolution& solution, double tau,
                                         std::span<const double> x,
                                         const HamiltonianModel& model);
RobotControl optimal_safe_control(const BRTSolution& solution, double tau,
                                  const RelativeState& x, const RobotControlBox& robot_box,
                                  const VehicleParams& params);

}  // namespace bbrt
