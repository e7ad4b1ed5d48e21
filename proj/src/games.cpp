#include "bbrt/games.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "bbrt/util.hpp"

namespace bbrt {

TrajectoryProfile constant_profile(double accel, double angular, int knots, double dt) {
  TrajectoryProfile p;
  p.dt = dt;
  p.controls.assign(static_cast<std::size_t>(knots), {accel, angular});
  return p;
}

bool ChoiceSet::contains(const TrajectoryProfile& p) const {
  return std::find(profiles.begin(), profiles.end(), p) != profiles.end();
}

ChoiceSet generate_choice_set(int count, int knots, double dt, std::uint64_t seed,
                              const PolynomialRanges& ranges, const ControlBox2& box) {
  if (count < 2) throw std::invalid_argument("choice set: count must be >= 2");
  if (knots < 1) throw std::invalid_argument("choice set: empty horizon");
  for (int c = 0; c < 2; ++c) {
    if (ranges.c0[c].lo > ranges.c0[c].hi || ranges.c1[c].lo > ranges.c1[c].hi ||
        ranges.c2[c].lo > ranges.c2[c].hi) {
      throw std::invalid_argument("choice set: empty coefficient range");
    }
  }
  ChoiceSet cs;
  cs.seed = seed;
  cs.profiles.reserve(static_cast<std::size_t>(count));
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    TrajectoryProfile p;
    p.dt = dt;
    p.controls.resize(static_cast<std::size_t>(knots));
    double c0[2], c1[2], c2[2];
    for (int c = 0; c < 2; ++c) {
      c0[c] = rng.uniform(ranges.c0[c].lo, ranges.c0[c].hi);
      c1[c] = rng.uniform(ranges.c1[c].lo, ranges.c1[c].hi);
      c2[c] = rng.uniform(ranges.c2[c].lo, ranges.c2[c].hi);
    }
    for (int k = 0; k < knots; ++k) {
      const double t = dt * k;
      for (int c = 0; c < 2; ++c) {
        const double u = c0[c] + c1[c] * t + c2[c] * t * t;
        p.controls[static_cast<std::size_t>(k)][c] = std::clamp(u, box.lo[c], box.hi[c]);
      }
    }
    cs.profiles.push_back(std::move(p));
  }
  return cs;
}

namespace {

struct FeatureAccumulator {
  const AgentObjective& objective;
  double prev_arc = 0.0;
  double total = 0.0;

  explicit FeatureAccumulator(const AgentObjective& obj, const AgentState& start)
      : objective(obj) {
    prev_arc = obj.path.project({start.x, start.y}).arc_length;
  }

  void add(const AgentState& s, double accel, double angular, double other_dist, bool first) {
    const RewardWeights& w = objective.weights;
    const auto proj = objective.path.project({s.x, s.y});
    const double f_speed = -sq(s.speed - objective.v_limit);
    const double f_comfort = -(sq(accel) + sq(angular));
    const double f_lane = -sq(proj.distance);
    const double f_progress = first ? 0.0 : proj.arc_length - prev_arc;
    const double f_safety = -std::exp(-sq(other_dist) / sq(objective.safety_sigma));
    prev_arc = proj.arc_length;
    total += w.speed * f_speed + w.comfort * f_comfort + w.lane * f_lane +
             w.progress * f_progress + w.safety * f_safety;
  }
};

}  // namespace

RolloutReward rollout_rewards(const WorldState& x0, const TrajectoryProfile& traj_h,
                              const TrajectoryProfile& traj_r, const ScenarioConfig& scenario) {
  if (traj_h.knots() != traj_r.knots()) {
    throw std::invalid_argument("rollout: trajectory horizon mismatch");
  }
  if (traj_h.knots() == 0) throw std::invalid_argument("rollout: empty trajectories");
  const double dt = traj_h.dt;

  WorldState w = x0;
  FeatureAccumulator human_acc(scenario.human, x0.human);
  FeatureAccumulator robot_acc(scenario.robot, x0.robot);

  for (int k = 0; k < traj_h.knots(); ++k) {
    const auto& uh = traj_h.controls[static_cast<std::size_t>(k)];
    const auto& ur = traj_r.controls[static_cast<std::size_t>(k)];
    const double dist = std::hypot(w.human.x - w.robot.x, w.human.y - w.robot.y);
    human_acc.add(w.human, uh[0], uh[1], dist, k == 0);
    robot_acc.add(w.robot, ur[0], ur[1], dist, k == 0);
    if (k + 1 < traj_h.knots()) {
      w = world_step(w, RobotControl{ur[0], ur[1]}, HumanControl{uh[0], uh[1]}, dt,
                     scenario.vehicle);
    }
  }
  return {human_acc.total, robot_acc.total};
}

double human_reward(const WorldState& x0, const TrajectoryProfile& traj_h,
                    const TrajectoryProfile& traj_r, const ScenarioConfig& scenario) {
  return rollout_rewards(x0, traj_h, traj_r, scenario).human;
}

double robot_reward(const WorldState& x0, const TrajectoryProfile& traj_r,
                    const TrajectoryProfile& traj_h, const ScenarioConfig& scenario) {
  return rollout_rewards(x0, traj_h, traj_r, scenario).robot;
}

std::vector<double> softmax(std::span<const double> rewards, double beta) {
  if (rewards.empty()) throw std::invalid_argument("softmax: empty reward vector");
  if (beta < 0.0) throw std::invalid_argument("softmax: beta must be >= 0");
  const double shift = *std::max_element(rewards.begin(), rewards.end());
  std::vector<double> out(rewards.size());
  double z = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out[i] = std::exp(beta * (rewards[i] - shift));
    z += out[i];
  }
  for (double& p : out) p /= z;
  return out;
}

std::vector<double> follower_rewards(const WorldState& x0, const ChoiceSet& cs,
                                     const TrajectoryProfile& traj_r,
                                     const ScenarioConfig& scenario) {
  if (cs.profiles.empty()) throw std::invalid_argument("follower: empty choice set");
  std::vector<double> rewards;
  rewards.reserve(cs.profiles.size());
  for (const auto& p : cs.profiles) {
    rewards.push_back(rollout_rewards(x0, p, traj_r, scenario).human);
  }
  return rewards;
}

std::vector<double> follower_likelihood(const WorldState& x0, const ChoiceSet& cs,
                                        const TrajectoryProfile& traj_r, double beta,
                                        const ScenarioConfig& scenario) {
  return softmax(follower_rewards(x0, cs, traj_r, scenario), beta);
}

int robot_best_response_index(const WorldState& x0, const TrajectoryProfile& traj_h,
                              const ChoiceSet& robot_cs, const ScenarioConfig& scenario) {
  if (robot_cs.profiles.empty()) throw std::invalid_argument("best response: empty robot set");
  int best = 0;
  double best_reward = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < robot_cs.size(); ++i) {
    const double r =
        rollout_rewards(x0, traj_h, robot_cs.profiles[static_cast<std::size_t>(i)], scenario)
            .robot;
    if (r > best_reward) {
      best_reward = r;
      best = i;
    }
  }
  return best;
}

const TrajectoryProfile& robot_best_response(const WorldState& x0,
                                             const TrajectoryProfile& traj_h,
                                             const ChoiceSet& robot_cs,
                                             const ScenarioConfig& scenario) {
  return robot_cs.profiles[static_cast<std::size_t>(
      robot_best_response_index(x0, traj_h, robot_cs, scenario))];
}

LeaderEvaluation leader_rewards(const WorldState& x0, const ChoiceSet& cs,
                                const ChoiceSet& robot_cs, const ScenarioConfig& scenario) {
  if (cs.profiles.empty() || robot_cs.profiles.empty()) {
    throw std::invalid_argument("leader: empty choice set");
  }
  LeaderEvaluation out;
  out.rewards.reserve(cs.profiles.size());
  out.best_response.reserve(cs.profiles.size());
  for (const auto& h : cs.profiles) {
    int best = 0;
    double best_robot = -std::numeric_limits<double>::infinity();
    double human_at_best = 0.0;
    for (int i = 0; i < robot_cs.size(); ++i) {
      const RolloutReward r =
          rollout_rewards(x0, h, robot_cs.profiles[static_cast<std::size_t>(i)], scenario);
      if (r.robot > best_robot) {
        best_robot = r.robot;
        best = i;
        human_at_best = r.human;
      }
    }
    out.rewards.push_back(human_at_best);
    out.best_response.push_back(best);
  }
  return out;
}

std::vector<double> leader_likelihood(const WorldState& x0, const ChoiceSet& cs,
                                      const ChoiceSet& robot_cs, double beta,
                                      const ScenarioConfig& scenario) {
  return softmax(leader_rewards(x0, cs, robot_cs, scenario).rewards, beta);
}

}  // namespace bbrt
