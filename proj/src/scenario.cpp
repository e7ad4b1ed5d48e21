#include "bbrt/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bbrt {

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("polyline: needs at least 2 waypoints");
  cumulative_.resize(points_.size(), 0.0);
  for (std::size_t i = 1; i < points_.size(); ++i) {
    const double dx = points_[i].x - points_[i - 1].x;
    const double dy = points_[i].y - points_[i - 1].y;
    cumulative_[i] = cumulative_[i - 1] + std::hypot(dx, dy);
  }
}

Polyline::Projection Polyline::project(Vec2 p) const {
  double best_dist2 = std::numeric_limits<double>::infinity();
  double best_s = 0.0;
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    const Vec2 a = points_[i];
    const Vec2 b = points_[i + 1];
    const double ex = b.x - a.x, ey = b.y - a.y;
    const double len2 = ex * ex + ey * ey;
    double t = 0.0;
    if (len2 > 0.0) {
      t = ((p.x - a.x) * ex + (p.y - a.y) * ey) / len2;
      t = std::clamp(t, 0.0, 1.0);
    }
    const double cx = a.x + t * ex, cy = a.y + t * ey;
    const double d2 = (p.x - cx) * (p.x - cx) + (p.y - cy) * (p.y - cy);
    if (d2 < best_dist2) {
      best_dist2 = d2;
      best_s = cumulative_[i] + t * std::sqrt(len2);
    }
  }
  return {best_s, std::sqrt(best_dist2)};
}

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::roundabout_merge: return "roundabout-merge";
    case ScenarioKind::highway_lane_change: return "highway-lane-change";
    case ScenarioKind::custom: return "custom";
  }
  return "custom";
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "roundabout-merge") return ScenarioKind::roundabout_merge;
  if (s == "highway-lane-change") return ScenarioKind::highway_lane_change;
  if (s == "custom") return ScenarioKind::custom;
  throw std::invalid_argument("unknown scenario kind: " + s);
}

}  // namespace bbrt
