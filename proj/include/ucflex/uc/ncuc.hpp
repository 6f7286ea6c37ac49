#pragma once

#include <string>
#include <vector>

#include "ucflex/demand/demand.hpp"
#include "ucflex/milp/branch_and_bound.hpp"
#include "ucflex/milp/model.hpp"
#include "ucflex/powersys/network.hpp"

namespace ucflex::uc {

struct UcConfig {
  double reserve_up = 0.0;    // r+, fraction of window peak demand
  double reserve_down = 0.0;  // r-, fraction of window minimum demand
  double mip_gap = 1e-4;
  double time_limit = milp::kInf;  // seconds
  bool network = true;
};

struct RampParams {
  double ramp_up = 0.0;    // max increase of the window average, MW
  double ramp_down = 0.0;  // max decrease of the window average, MW
  double startup = 0.0;    // max window average in the start-up window, MW
  double shutdown = 0.0;   // max window average before a shut-down, MW
  int startup_turn = 1;    // original periods spent ramping after a start
  int shutdown_turn = 1;
};

// Ramp coefficients for a window of `d_cur` original periods following one
// of `d_prev` periods (use 1 for the first window).
RampParams ramp_params(const powersys::ThermalUnit& unit, int d_prev, int d_cur,
                       double step_hours);

// Last window index (0-based) covered by a minimum up/down time of `hours`
// starting at window `t` (0-based).
int min_time_horizon(int t, double hours, const std::vector<int>& durations,
                     double step_hours);

// MILP plus the variable maps needed to read a schedule back.
struct ModelHandle {
  milp::MilpModel model;
  demand::Partition partition;
  std::vector<int> durations;
  double step_hours = 1.0;
  // [unit][window] -> variable index
  std::vector<std::vector<int>> u, p, s;

  int num_units() const { return static_cast<int>(u.size()); }
  int num_windows() const { return partition.size(); }
};

// Network-constrained unit commitment on the windows of `partition`.
// Throws Error("uc.capacity_shortfall") when peak demand plus up-reserve
// exceeds installed capacity.
ModelHandle build_ncuc(const powersys::NetworkCase& c, const demand::DemandSeries& d,
                       const demand::Partition& partition, const UcConfig& config);

// Same model at original resolution.
ModelHandle build_conventional_ncuc(const powersys::NetworkCase& c,
                                    const demand::DemandSeries& d,
                                    const UcConfig& config);

// Original resolution, commitment relaxed to [0, 1], no network rows.
ModelHandle build_relaxed_ncuc(const powersys::NetworkCase& c,
                               const demand::DemandSeries& d, const UcConfig& config);

struct UcSolution {
  milp::Status status = milp::Status::kInfeasible;
  demand::Partition partition;
  std::vector<std::vector<int>> commitment;   // [unit][window]
  std::vector<std::vector<double>> output;    // [unit][window], MW
  double objective = milp::kInf;
  double bound = -milp::kInf;
  double gap = milp::kInf;
  double wall_seconds = 0.0;
  long long nodes = 0;

  bool has_solution() const { return !commitment.empty(); }
};

UcSolution extract_solution(const ModelHandle& h, const milp::MilpSolution& sol);

UcSolution solve_ncuc(const ModelHandle& h, const UcConfig& config);

}  // namespace ucflex::uc
