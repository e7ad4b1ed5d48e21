#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bbrt/scenario.hpp"

namespace bbrt {

/// Discrete-time control trajectory over the game horizon; channel 0 is the
/// acceleration, channel 1 the angular channel (omega for the human, front
/// wheel rotation for the robot).
struct TrajectoryProfile {
  std::vector<std::array<double, 2>> controls;
  double dt = 0.1;

  int knots() const { return static_cast<int>(controls.size()); }
  bool operator==(const TrajectoryProfile&) const = default;
};

TrajectoryProfile constant_profile(double accel, double angular, int knots, double dt);

struct ChoiceSet {
  std::vector<TrajectoryProfile> profiles;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(profiles.size()); }
  bool contains(const TrajectoryProfile& p) const;
};

struct ControlBox2 {
  double lo[2] = {0.0, 0.0};
  double hi[2] = {0.0, 0.0};

  static ControlBox2 from_bounds(const ControlBounds& b) {
    return {{b.a_lo, b.omega_lo}, {b.a_hi, b.omega_hi}};
  }
  static ControlBox2 from_box(const RobotControlBox& b) {
    return {{b.a_lo, b.steer_lo}, {b.a_hi, b.steer_hi}};
  }
};

/// Samples `count` control profiles u(t) = c0 + c1 t + c2 t^2 per channel
/// with coefficients drawn uniformly from the configured ranges, clamped to
/// the control box. Deterministic under a fixed seed.
ChoiceSet generate_choice_set(int count, int knots, double dt, std::uint64_t seed,
                              const PolynomialRanges& ranges, const ControlBox2& box);

struct RolloutReward {
  double human = 0.0;
  double robot = 0.0;
};

/// Rolls the world dynamics out from x0 under both control trajectories and
/// accumulates both agents' weighted feature sums in one pass.
RolloutReward rollout_rewards(const WorldState& x0, const TrajectoryProfile& traj_h,
                              const TrajectoryProfile& traj_r, const ScenarioConfig& scenario);

double human_reward(const WorldState& x0, const TrajectoryProfile& traj_h,
                    const TrajectoryProfile& traj_r, const ScenarioConfig& scenario);
double robot_reward(const WorldState& x0, const TrajectoryProfile& traj_r,
                    const TrajectoryProfile& traj_h, const ScenarioConfig& scenario);

/// Max-shifted Boltzmann distribution over a reward vector.
std::vector<double> softmax(std::span<const double> rewards, double beta);

/// Human rewards for every profile in the choice set, conditioned on a fixed
/// robot trajectory (the follower game, up to the softmax).
std::vector<double> follower_rewards(const WorldState& x0, const ChoiceSet& cs,
                                     const TrajectoryProfile& traj_r,
                                     const ScenarioConfig& scenario);

std::vector<double> follower_likelihood(const WorldState& x0, const ChoiceSet& cs,
                                        const TrajectoryProfile& traj_r, double beta,
                                        const ScenarioConfig& scenario);

/// Index of the robot profile maximizing the robot reward against traj_h;
/// ties break toward the lowest index.
int robot_best_response_index(const WorldState& x0, const TrajectoryProfile& traj_h,
                              const ChoiceSet& robot_cs, const ScenarioConfig& scenario);

const TrajectoryProfile& robot_best_response(const WorldState& x0,
                                             const TrajectoryProfile& traj_h,
                                             const ChoiceSet& robot_cs,
                                             const ScenarioConfig& scenario);

struct LeaderEvaluation {
  std::vector<double> rewards;        // human reward against the best response
  std::vector<int> best_response;     // robot best-response index per profile
};

/// Leader-game rewards: each human profile is scored against the robot's
/// best response to it.
LeaderEvaluation leader_rewards(const WorldState& x0, const ChoiceSet& cs,
                                const ChoiceSet& robot_cs, const ScenarioConfig& scenario);

std::vector<double> leader_likelihood(const WorldState& x0, const ChoiceSet& cs,
                                      const ChoiceSet& robot_cs, double beta,
                                      const ScenarioConfig& scenario);

}  // namespace bbrt
