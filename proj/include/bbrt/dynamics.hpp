#pragma once

#include <array>
#include <span>
#include <vector>

namespace bbrt {

/// Relative state of the human-driven car in the robot body frame:
/// [px_rel, py_rel, psi_rel, v_r, v_h]. psi_rel is periodic.
struct RelativeState {
  double px_rel = 0.0;
  double py_rel = 0.0;
  double psi_rel = 0.0;
  double v_r = 0.0;
  double v_h = 0.0;

  std::array<double, 5> to_array() const { return {px_rel, py_rel, psi_rel, v_r, v_h}; }
  static RelativeState from_array(std::span<const double> a) {
    return {a[0], a[1], a[2], a[3], a[4]};
  }
};

struct HumanControl {
  double accel = 0.0;  // m/s^2
  double omega = 0.0;  // rad/s
};

struct RobotControl {
  double accel = 0.0;  // m/s^2
  double steer = 0.0;  // front wheel rotation, rad
};

/// Axis-aligned box of admissible human controls. This is the object the
/// inference loop shrinks and enlarges.
struct ControlBounds {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double omega_lo = 0.0;
  double omega_hi = 0.0;

  bool valid() const { return a_lo <= a_hi && omega_lo <= omega_hi; }
  bool contains(const ControlBounds& other) const {
    return a_lo <= other.a_lo && a_hi >= other.a_hi && omega_lo <= other.omega_lo &&
           omega_hi >= other.omega_hi;
  }
  bool contains(const HumanControl& u, double tol = 0.0) const {
    return u.accel >= a_lo - tol && u.accel <= a_hi + tol && u.omega >= omega_lo - tol &&
           u.omega <= omega_hi + tol;
  }
  bool operator==(const ControlBounds&) const = default;
};

struct RobotControlBox {
  double a_lo = 0.0;
  double a_hi = 0.0;
  double steer_lo = 0.0;
  double steer_hi = 0.0;
};

struct VehicleParams {
  double l_f = 1.4;  // front axle length, m
  double l_r = 1.4;  // rear axle length, m
  RobotControlBox robot_box{-6.0, 4.0, -0.35, 0.35};
  ControlBounds human_box{-5.0, 3.0, -0.6, 0.6};
  double v_min = 0.0;
  double v_max = 12.0;
};

/// Kinematic bicycle sideslip beta_r = atan(l_r / (l_r + l_f) * tan(steer)).
double sideslip(double steer, const VehicleParams& params);

/// Relative flow field: d/dt [px_rel, py_rel, psi_rel, v_r, v_h].
std::array<double, 5> relative_flow(const RelativeState& x, const RobotControl& u_r,
                                    const HumanControl& u_h, const VehicleParams& params);

/// Fixed steering candidate set with precomputed sideslip trig, used by the
/// extremal-control search (steering enters the flow nonlinearly).
struct SteerCandidates {
  std::vector<double> steer;
  std::vector<double> sin_slip;
  std::vector<double> cos_slip;
  int mid = 0;  // index of the midpoint candidate, the zero-costate tie-break

  static SteerCandidates build(const RobotControlBox& box, const VehicleParams& params,
                               int count = 7);
};

struct ExtremalControls {
  RobotControl robot;
  HumanControl human;
};

/// Bang-bang selection realizing max over robot controls of the min over
/// human controls of costate . f. Affine channels follow the costate sign
/// with midpoint tie-break at zero; steering is an exhaustive search over the
/// candidate set.
ExtremalControls extremal_controls(std::span<const double> costate,
                                   const ControlBounds& bounds_h,
                                   const RobotControlBox& robot_box, const RelativeState& x,
                                   const VehicleParams& params, const SteerCandidates& cands);

/// costate . relative_flow at the extremal controls.
double hamiltonian(const RelativeState& x, std::span<const double> costate,
                   const ControlBounds& bounds_h, const RobotControlBox& robot_box,
                   const VehicleParams& params, const SteerCandidates& cands);

/// World-frame pose of one agent.
struct AgentState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;
};

struct WorldState {
  AgentState human;
  AgentState robot;
};

/// RK4 step of the human extended unicycle and the robot kinematic bicycle;
/// speeds are clamped to the configured limits afterwards.
WorldState world_step(const WorldState& w, const RobotControl& u_r, const HumanControl& u_h,
                      double dt, const VehicleParams& params);

/// Human pose expressed in the robot body frame.
RelativeState world_to_relative(const WorldState& w);

}  // namespace bbrt
