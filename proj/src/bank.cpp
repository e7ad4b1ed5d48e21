#include "bbrt/bank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "bbrt/brt_io.hpp"
#include "bbrt/util.hpp"

namespace bbrt {

using nlohmann::json;

BankLattice BankLattice::regular(const ControlBounds& full_box, int accel_levels,
                                 int omega_levels) {
  if (accel_levels < 1 || omega_levels < 1) {
    throw std::invalid_argument("bank lattice: level counts must be >= 1");
  }
  if (!full_box.valid()) throw std::invalid_argument("bank lattice: invalid full box");
  BankLattice lat;
  lat.a_lo_levels = linspace(full_box.a_lo, full_box.a_hi, accel_levels);
  lat.a_hi_levels = lat.a_lo_levels;
  lat.omega_lo_levels = linspace(full_box.omega_lo, full_box.omega_hi, omega_levels);
  lat.omega_hi_levels = lat.omega_lo_levels;
  return lat;
}

std::vector<ControlBounds> BankLattice::cells() const {
  std::vector<ControlBounds> out;
  for (double alo : a_lo_levels) {
    for (double ahi : a_hi_levels) {
      if (alo > ahi) continue;
      for (double wlo : omega_lo_levels) {
        for (double whi : omega_hi_levels) {
          if (wlo > whi) continue;
          out.push_back(ControlBounds{alo, ahi, wlo, whi});
        }
      }
    }
  }
  return out;
}

ControlBounds BankLattice::full_box() const {
  return ControlBounds{a_lo_levels.front(), a_hi_levels.back(), omega_lo_levels.front(),
                       omega_hi_levels.back()};
}

namespace {

double snap_down(const std::vector<double>& levels, double x) {
  double best = levels.front();
  for (double l : levels) {
    if (l <= x + 1e-12) best = l;
  }
  return best;
}

double snap_up(const std::vector<double>& levels, double x) {
  for (double l : levels) {
    if (l >= x - 1e-12) return l;
  }
  return levels.back();
}

}  // namespace

ControlBounds BankLattice::snap_outward(const ControlBounds& requested) const {
  return ControlBounds{snap_down(a_lo_levels, requested.a_lo),
                       snap_up(a_hi_levels, requested.a_hi),
                       snap_down(omega_lo_levels, requested.omega_lo),
                       snap_up(omega_hi_levels, requested.omega_hi)};
}

std::string bank_entry_filename(const ControlBounds& bounds) {
  auto milli = [](double v) { return static_cast<long long>(std::llround(v * 1000.0)); };
  char buf[96];
  std::snprintf(buf, sizeof(buf), "a_%lld_%lld_w_%lld_%lld.bbrt", milli(bounds.a_lo),
                milli(bounds.a_hi), milli(bounds.omega_lo), milli(bounds.omega_hi));
  return buf;
}

namespace {

json bounds_to_json(const ControlBounds& b) {
  return json{{"a_lo", b.a_lo}, {"a_hi", b.a_hi}, {"omega_lo", b.omega_lo},
              {"omega_hi", b.omega_hi}};
}

ControlBounds bounds_from_json(const json& j) {
  return ControlBounds{j.at("a_lo"), j.at("a_hi"), j.at("omega_lo"), j.at("omega_hi")};
}

}  // namespace

std::string BankManifest::to_json_string() const {
  json j;
  j["format"] = "bbrt-bank";
  j["version"] = 1;
  j["lattice"] = {{"a_lo_levels", lattice.a_lo_levels},
                  {"a_hi_levels", lattice.a_hi_levels},
                  {"omega_lo_levels", lattice.omega_lo_levels},
                  {"omega_hi_levels", lattice.omega_hi_levels}};
  j["grid"] = {{"mins", grid_mins},
               {"maxs", grid_maxs},
               {"points", grid_points},
               {"periodic", grid_periodic},
               {"fingerprint", grid_fingerprint}};
  j["horizon"] = horizon;
  j["collision_radius"] = collision_radius;
  j["solver"] = {{"dt", solver.dt},
                 {"cfl", solver.cfl},
                 {"record_dt", solver.record_dt},
                 {"alphas", solver.alphas}};
  j["robot_box"] = {{"a_lo", robot_box.a_lo},
                    {"a_hi", robot_box.a_hi},
                    {"steer_lo", robot_box.steer_lo},
                    {"steer_hi", robot_box.steer_hi}};
  j["vehicle"] = {{"l_f", params.l_f},
                  {"l_r", params.l_r},
                  {"v_min", params.v_min},
                  {"v_max", params.v_max},
                  {"human_box", bounds_to_json(params.human_box)}};
  json entries_json = json::array();
  for (const auto& e : entries) {
    json je = bounds_to_json(e);
    je["file"] = bank_entry_filename(e);
    entries_json.push_back(je);
  }
  j["entries"] = entries_json;
  return j.dump(2) + "\n";
}

BankManifest BankManifest::from_json_string(const std::string& text) {
  const json j = json::parse(text);
  if (j.at("format") != "bbrt-bank") throw std::runtime_error("not a bank manifest");
  BankManifest m;
  const json& lat = j.at("lattice");
  m.lattice.a_lo_levels = lat.at("a_lo_levels").get<std::vector<double>>();
  m.lattice.a_hi_levels = lat.at("a_hi_levels").get<std::vector<double>>();
  m.lattice.omega_lo_levels = lat.at("omega_lo_levels").get<std::vector<double>>();
  m.lattice.omega_hi_levels = lat.at("omega_hi_levels").get<std::vector<double>>();
  const json& g = j.at("grid");
  m.grid_mins = g.at("mins").get<std::vector<double>>();
  m.grid_maxs = g.at("maxs").get<std::vector<double>>();
  m.grid_points = g.at("points").get<std::vector<int>>();
  m.grid_periodic = g.at("periodic").get<std::vector<bool>>();
  m.grid_fingerprint = g.at("fingerprint").get<std::uint64_t>();
  m.horizon = j.at("horizon");
  m.collision_radius = j.at("collision_radius");
  const json& s = j.at("solver");
  m.solver.dt = s.at("dt");
  m.solver.cfl = s.at("cfl");
  m.solver.record_dt = s.at("record_dt");
  m.solver.alphas = s.at("alphas").get<std::vector<double>>();
  const json& rb = j.at("robot_box");
  m.robot_box = RobotControlBox{rb.at("a_lo"), rb.at("a_hi"), rb.at("steer_lo"),
                                rb.at("steer_hi")};
  const json& v = j.at("vehicle");
  m.params.l_f = v.at("l_f");
  m.params.l_r = v.at("l_r");
  m.params.v_min = v.at("v_min");
  m.params.v_max = v.at("v_max");
  m.params.human_box = bounds_from_json(v.at("human_box"));
  m.params.robot_box = m.robot_box;
  for (const auto& je : j.at("entries")) m.entries.push_back(bounds_from_json(je));
  return m;
}

namespace {

bool lattices_equal(const BankLattice& a, const BankLattice& b) {
  return a.a_lo_levels == b.a_lo_levels && a.a_hi_levels == b.a_hi_levels &&
         a.omega_lo_levels == b.omega_lo_levels && a.omega_hi_levels == b.omega_hi_levels;
}

}  // namespace

PrecomputeProgress precompute_bank(const std::filesystem::path& dir,
                                   std::shared_ptr<const Grid> grid,
                                   std::span<const double> surface, const BankLattice& lattice,
                                   const RobotControlBox& robot_box,
                                   const VehicleParams& params, double horizon,
                                   double collision_radius, double dt,
                                   const SolverSettings& settings,
                                   const std::function<void(int, int)>& progress) {
  std::filesystem::create_directories(dir);
  const std::vector<ControlBounds> cells = lattice.cells();
  if (cells.empty()) throw std::invalid_argument("bank: empty lattice");

  // Shared dissipation from the widest cell keeps every solve on one time
  // discretization, which preserves exact nodewise nesting across cells.
  const ControlBounds full = lattice.full_box();
  RelativeGameHamiltonian full_model(full, robot_box, params);
  SolverSettings cell_settings = settings;
  if (cell_settings.dissipation_override.empty()) {
    cell_settings.dissipation_override =
        estimate_dissipation(*grid, full_model, settings.dissipation_inflation);
  }
  if (dt <= 0.0) {
    dt = stable_time_step(*grid, cell_settings.dissipation_override, settings.cfl);
  }

  const std::filesystem::path manifest_path = dir / "manifest.json";
  if (std::filesystem::exists(manifest_path)) {
    std::ifstream is(manifest_path);
    std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
    const BankManifest existing = BankManifest::from_json_string(text);
    if (existing.grid_fingerprint != grid->fingerprint()) {
      throw std::runtime_error("bank: existing manifest was built on a different grid");
    }
    if (!lattices_equal(existing.lattice, lattice) || existing.horizon != horizon) {
      throw std::runtime_error("bank: existing manifest lattice/horizon mismatch");
    }
  }

  PrecomputeProgress report;
  const int total = static_cast<int>(cells.size());
  int done = 0;
  for (const ControlBounds& cell : cells) {
    const std::filesystem::path file = dir / bank_entry_filename(cell);
    if (std::filesystem::exists(file)) {
      ++report.skipped;
    } else {
      BRTSolution sol =
          solve_hji_vi(grid, surface, cell, robot_box, params, horizon, dt, cell_settings);
      write_value_function(file, sol.value_function);
      ++report.solved;
    }
    ++done;
    if (progress) progress(done, total);
  }

  BankManifest manifest;
  manifest.lattice = lattice;
  manifest.grid_mins = grid->mins();
  manifest.grid_maxs = grid->maxs();
  manifest.grid_points = grid->point_counts();
  manifest.grid_periodic = grid->periodic_flags();
  manifest.grid_fingerprint = grid->fingerprint();
  manifest.horizon = horizon;
  manifest.collision_radius = collision_radius;
  manifest.solver.dt = dt;
  manifest.solver.cfl = settings.cfl;
  manifest.solver.record_dt = settings.record_dt;
  manifest.solver.alphas = cell_settings.dissipation_override;
  manifest.robot_box = robot_box;
  manifest.params = params;
  manifest.entries = cells;
  write_file_atomic(manifest_path, manifest.to_json_string());
  return report;
}

BRTBank::BRTBank(std::filesystem::path dir, BankManifest manifest)
    : dir_(std::move(dir)), manifest_(std::move(manifest)) {}

BRTBank BRTBank::open(const std::filesystem::path& dir) {
  const std::filesystem::path manifest_path = dir / "manifest.json";
  std::ifstream is(manifest_path);
  if (!is) throw std::runtime_error("bank: cannot open " + manifest_path.string());
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  BankManifest manifest = BankManifest::from_json_string(text);
  const std::filesystem::path full_file =
      dir / bank_entry_filename(manifest.lattice.full_box());
  if (!std::filesystem::exists(full_file)) {
    throw std::runtime_error("bank: missing full-box entry " + full_file.string());
  }
  return BRTBank(dir, std::move(manifest));
}

std::shared_ptr<const BRTSolution> BRTBank::load(const ControlBounds& cell) const {
  const std::string name = bank_entry_filename(cell);
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(name);
  if (it != cache_.end()) return it->second;
  const std::filesystem::path file = dir_ / name;
  if (!std::filesystem::exists(file)) return nullptr;
  ValueFunction vf = read_value_function(file);
  auto sol = std::make_shared<BRTSolution>(BRTSolution{std::move(vf), cell, manifest_.horizon,
                                                       manifest_.solver});
  cache_.emplace(name, sol);
  return sol;
}

std::shared_ptr<const BRTSolution> BRTBank::query(const ControlBounds& requested) const {
  const ControlBounds snapped = manifest_.lattice.snap_outward(requested);
  if (auto sol = load(snapped)) return sol;
  {
    std::lock_guard<std::mutex> lock(mutex_);
    ++warning_count_;
  }
  std::cerr << "[bbrt] warning: bank entry " << bank_entry_filename(snapped)
            << " missing; falling back to full box\n";
  return full_entry();
}

std::shared_ptr<const BRTSolution> BRTBank::full_entry() const {
  auto sol = load(manifest_.lattice.full_box());
  if (!sol) throw std::runtime_error("bank: full-box entry unreadable");
  return sol;
}

}  // namespace bbrt
