#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "bbrt/reach.hpp"

namespace bbrt {

/// Quantization lattice over (a_lo, a_hi, omega_lo, omega_hi). Cells are all
/// level combinations with lo <= hi; the full-box cell is always present.
struct BankLattice {
  std::vector<double> a_lo_levels;
  std::vector<double> a_hi_levels;
  std::vector<double> omega_lo_levels;
  std::vector<double> omega_hi_levels;

  static BankLattice regular(const ControlBounds& full_box, int accel_levels = 5,
                             int omega_levels = 3);

  std::vector<ControlBounds> cells() const;
  ControlBounds full_box() const;

  /// Snaps each requested bound outward to the nearest lattice level so the
  /// returned cell contains the request. Requests outside the lattice range
  /// clamp to the full box.
  ControlBounds snap_outward(const ControlBounds& requested) const;
};

/// Fixed-point milli-unit file name, e.g. a_-4000_2000_w_-500_500.bbrt.
std::string bank_entry_filename(const ControlBounds& bounds);

struct BankManifest {
  BankLattice lattice;
  std::vector<double> grid_mins, grid_maxs;
  std::vector<int> grid_points;
  std::vector<bool> grid_periodic;
  std::uint64_t grid_fingerprint = 0;
  double horizon = 0.0;
  double collision_radius = 0.0;
  SolverMeta solver;
  RobotControlBox robot_box;
  VehicleParams params;
  std::vector<ControlBounds> entries;

  std::string to_json_string() const;
  static BankManifest from_json_string(const std::string& text);
};

struct PrecomputeProgress {
  int solved = 0;
  int skipped = 0;
};

/// Solves one BRT per lattice cell and persists the family under dir, plus a
/// manifest. Existing valid entries are skipped; a pre-existing manifest for
/// a different grid or lattice makes the call fail. All cells share the
/// dissipation coefficients (and hence the marching step) of the full box.
PrecomputeProgress precompute_bank(const std::filesystem::path& dir,
                                   std::shared_ptr<const Grid> grid,
                                   std::span<const double> surface, const BankLattice& lattice,
                                   const RobotControlBox& robot_box,
                                   const VehicleParams& params, double horizon,
                                   double collision_radius, double dt,
                                   const SolverSettings& settings,
                                   const std::function<void(int, int)>& progress = {});

/// Read-side view of a persisted bank. Entries load lazily and are cached;
/// queries snap bounds outward so the returned BRT over-approximates the
/// request. Missing entries fall back to the full box with a warning.
class BRTBank {
 public:
  static BRTBank open(const std::filesystem::path& dir);

  const BankManifest& manifest() const { return manifest_; }
  const std::filesystem::path& directory() const { return dir_; }

  std::shared_ptr<const BRTSolution> query(const ControlBounds& requested) const;
  std::shared_ptr<const BRTSolution> full_entry() const;

  int warnings() const { return warning_count_; }

 private:
  BRTBank(std::filesystem::path dir, BankManifest manifest);
  std::shared_ptr<const BRTSolution> load(const ControlBounds& cell) const;

  std::filesystem::path dir_;
  BankManifest manifest_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const BRTSolution>> cache_;
  mutable int warning_count_ = 0;
};

}  // namespace bbrt
