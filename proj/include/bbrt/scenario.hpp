#pragma once

#include <string>
#include <vector>

#include "bbrt/dynamics.hpp"

namespace bbrt {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

/// Piecewise-linear reference path with arc-length projection.
class Polyline {
 public:
  explicit Polyline(std::vector<Vec2> points);
  Polyline() = default;

  const std::vector<Vec2>& points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  bool empty() const { return points_.size() < 2; }

  struct Projection {
    double arc_length = 0.0;
    double distance = 0.0;
  };
  Projection project(Vec2 p) const;

 private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;
};

struct RewardWeights {
  double speed = 0.0;
  double comfort = 0.0;
  double lane = 0.0;
  double progress = 0.0;
  double safety = 0.0;
};

/// Per-agent reward context: reference path, goal, speed limit, weights.
struct AgentObjective {
  Polyline path;
  Vec2 goal;
  double v_limit = 10.0;
  double safety_sigma = 4.0;
  RewardWeights weights;
};

/// Uniform sampling ranges for the second-order polynomial control
/// generator; channel 0 is acceleration, channel 1 is the angular channel.
struct PolynomialRanges {
  struct Range {
    double lo = 0.0;
    double hi = 0.0;
  };
  Range c0[2];
  Range c1[2];
  Range c2[2];
};

struct GameSettings {
  int human_profiles = 50;
  int robot_profiles = 20;
  double horizon = 2.0;
  double dt = 0.1;
  PolynomialRanges human_ranges;
  PolynomialRanges robot_ranges;

  int knots() const { return static_cast<int>(std::lround(horizon / dt)) + 1; }
};

enum class ScenarioKind { roundabout_merge, highway_lane_change, custom };

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& s);

struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::custom;
  WorldState initial;
  AgentObjective human;
  AgentObjective robot;
  VehicleParams vehicle;
  GameSettings game;
  double collision_radius = 2.0;  // actual collision distance for metrics
  double monitor_radius = 3.0;    // radius of the BRT failure surface
};

}  // namespace bbrt
