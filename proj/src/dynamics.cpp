#include "bbrt/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bbrt/util.hpp"

namespace bbrt {

double sideslip(double steer, const VehicleParams& params) {
  return std::atan(params.l_r / (params.l_r + params.l_f) * std::tan(steer));
}

std::array<double, 5> relative_flow(const RelativeState& x, const RobotControl& u_r,
                                    const HumanControl& u_h, const VehicleParams& params) {
  const double beta_r = sideslip(u_r.steer, params);
  const double sb = std::sin(beta_r);
  const double cb = std::cos(beta_r);
  const double yaw_rate_r = x.v_r / params.l_r * sb;
  const double cpsi = std::cos(x.psi_rel);
  const double spsi = std::sin(x.psi_rel);
  return {
      yaw_rate_r * x.py_rel + x.v_h * cpsi - x.v_r * cb,
      -yaw_rate_r * x.px_rel + x.v_h * spsi - x.v_r * sb,
      u_h.omega - yaw_rate_r,
      u_r.accel,
      u_h.accel,
  };
}

SteerCandidates SteerCandidates::build(const RobotControlBox& box,
                                       const VehicleParams& params, int count) {
  if (count < 1) throw std::invalid_argument("steer candidates: count must be >= 1");
  SteerCandidates c;
  c.steer = linspace(box.steer_lo, box.steer_hi, count);
  c.sin_slip.reserve(c.steer.size());
  c.cos_slip.reserve(c.steer.size());
  for (double s : c.steer) {
    const double b = sideslip(s, params);
    c.sin_slip.push_back(std::sin(b));
    c.cos_slip.push_back(std::cos(b));
  }
  c.mid = count / 2;
  return c;
}

namespace {

// Sign rule for an affine channel: pick the endpoint minimizing (or
// maximizing) p * u; midpoint on a zero multiplier.
inline double pick_min(double p, double lo, double hi) {
  if (p > 0.0) return lo;
  if (p < 0.0) return hi;
  return 0.5 * (lo + hi);
}

inline double pick_max(double p, double lo, double hi) {
  if (p > 0.0) return hi;
  if (p < 0.0) return lo;
  return 0.5 * (lo + hi);
}

}  // namespace

ExtremalControls extremal_controls(std::span<const double> costate,
                                   const ControlBounds& bounds_h,
                                   const RobotControlBox& robot_box, const RelativeState& x,
                                   const VehicleParams& params, const SteerCandidates& cands) {
  const double p_px = costate[0];
  const double p_py = costate[1];
  const double p_psi = costate[2];
  const double p_vr = costate[3];
  const double p_vh = costate[4];

  ExtremalControls out;
  out.human.accel = pick_min(p_vh, bounds_h.a_lo, bounds_h.a_hi);
  out.human.omega = pick_min(p_psi, bounds_h.omega_lo, bounds_h.omega_hi);
  out.robot.accel = pick_max(p_vr, robot_box.a_lo, robot_box.a_hi);

  // Steering-dependent share of costate . f; the remaining terms do not
  // involve steer, so the max-min decouples.
  const double inv_lr = 1.0 / params.l_r;
  auto steer_score = [&](int i) {
    const double yaw_rate = x.v_r * inv_lr * cands.sin_slip[i];
    return yaw_rate * (p_px * x.py_rel - p_py * x.px_rel - p_psi) -
           x.v_r * (p_px * cands.cos_slip[i] + p_py * cands.sin_slip[i]);
  };

  int best = cands.mid;
  double best_score = steer_score(best);
  for (int i = 0; i < static_cast<int>(cands.steer.size()); ++i) {
    if (i == cands.mid) continue;
    const double s = steer_score(i);
    if (s > best_score) {
      best = i;
      best_score = s;
    }
  }
  out.robot.steer = cands.steer[best];
  return out;
}

double hamiltonian(const RelativeState& x, std::span<const double> costate,
                   const ControlBounds& bounds_h, const RobotControlBox& robot_box,
                   const VehicleParams& params, const SteerCandidates& cands) {
  const ExtremalControls u = extremal_controls(costate, bounds_h, robot_box, x, params, cands);
  const auto f = relative_flow(x, u.robot, u.human, params);
  double h = 0.0;
  for (int i = 0; i < 5; ++i) h += costate[i] * f[i];
  return h;
}

namespace {

struct AgentDeriv {
  double dx, dy, dheading, dspeed;
};

AgentDeriv unicycle_flow(const AgentState& s, const HumanControl& u) {
  return {s.speed * std::cos(s.heading), s.speed * std::sin(s.heading), u.omega, u.accel};
}

AgentDeriv bicycle_flow(const AgentState& s, const RobotControl& u, const VehicleParams& p) {
  const double beta_r = sideslip(u.steer, p);
  return {s.speed * std::cos(s.heading + beta_r), s.speed * std::sin(s.heading + beta_r),
          s.speed / p.l_r * std::sin(beta_r), u.accel};
}

AgentState advance(const AgentState& s, const AgentDeriv& d, double h) {
  return {s.x + h * d.dx, s.y + h * d.dy, s.heading + h * d.dheading, s.speed + h * d.dspeed};
}

template <typename Flow>
AgentState rk4(const AgentState& s, double dt, Flow flow) {
  const AgentDeriv k1 = flow(s);
  const AgentDeriv k2 = flow(advance(s, k1, 0.5 * dt));
  const AgentDeriv k3 = flow(advance(s, k2, 0.5 * dt));
  const AgentDeriv k4 = flow(advance(s, k3, dt));
  AgentState out = s;
  out.x += dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
  out.y += dt / 6.0 * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy);
  out.heading += dt / 6.0 * (k1.dheading + 2.0 * k2.dheading + 2.0 * k3.dheading + k4.dheading);
  out.speed += dt / 6.0 * (k1.dspeed + 2.0 * k2.dspeed + 2.0 * k3.dspeed + k4.dspeed);
  return out;
}

}  // namespace

WorldState world_step(const WorldState& w, const RobotControl& u_r, const HumanControl& u_h,
                      double dt, const VehicleParams& params) {
  if (!(dt > 0.0)) throw std::invalid_argument("world_step: dt must be positive");
  WorldState out;
  out.human = rk4(w.human, dt, [&](const AgentState& s) { return unicycle_flow(s, u_h); });
  out.robot = rk4(w.robot, dt, [&](const AgentState& s) { return bicycle_flow(s, u_r, params); });
  out.human.speed = std::clamp(out.human.speed, params.v_min, params.v_max);
  out.robot.speed = std::clamp(out.robot.speed, params.v_min, params.v_max);
  out.human.heading = wrap_angle(out.human.heading);
  out.robot.heading = wrap_angle(out.robot.heading);
  return out;
}

RelativeState world_to_relative(const WorldState& w) {
  const double dx = w.human.x - w.robot.x;
  const double dy = w.human.y - w.robot.y;
  const double c = std::cos(w.robot.heading);
  const double s = std::sin(w.robot.heading);
  return {c * dx + s * dy, -s * dx + c * dy, wrap_angle(w.human.heading - w.robot.heading),
          w.robot.speed, w.human.speed};
}

}  // namespace bbrt
