#pragma once

#include <string>
#include <vector>

#include "ucflex/demand/demand.hpp"
#include "ucflex/powersys/network.hpp"
#include "ucflex/uc/ncuc.hpp"

namespace ucflex::dispatch {

// Commitment at original resolution. Periods are 1-based in the interface;
// vectors are indexed period - 1.
struct ExtendedSchedule {
  std::vector<std::vector<int>> commitment;  // [unit][period - 1]
  std::vector<int> window_of;                // [period - 1] -> 0-based window

  int periods() const { return static_cast<int>(window_of.size()); }
  int num_units() const { return static_cast<int>(commitment.size()); }
  int on(int unit, int period) const { return commitment[unit][period - 1]; }
};

// Block expansion of a window commitment; state changes land on the first
// period of a window.
ExtendedSchedule extend(const std::vector<std::vector<int>>& commitment,
                        const demand::Partition& partition, int horizon);
ExtendedSchedule extend(const uc::UcSolution& sol, int horizon);

// Off -> on transitions, counting the initial state before period 1.
int count_startups(const powersys::NetworkCase& c, const ExtendedSchedule& s);

struct Violation {
  int period = 0;
  std::string constraint;  // row family, e.g. "balance" or "flow_max(L3)"
  double magnitude = 0.0;  // MW
};

struct DispatchResult {
  milp::Status status = milp::Status::kInfeasible;
  bool feasible = false;
  std::vector<std::vector<double>> output;  // [unit][period - 1], MW
  double operating_cost = 0.0;
  double startup_cost = 0.0;
  double cost = 0.0;  // operating + startup, penalties excluded
  std::vector<Violation> violations;

  // Sorted, unique.
  std::vector<int> violated_periods() const;
};

inline constexpr double kSlackPenalty = 1e6;  // $/MW
inline constexpr double kViolationTol = 1e-5;  // MW

// Economic dispatch with the commitment fixed, at original resolution:
// balance, line limits at point demand, output range, and period-to-period
// ramping with start-up/shut-down output capped at p_min. With `soft`, every
// row gets a penalized slack and positive slacks are reported as violations;
// otherwise an infeasible schedule returns status infeasible.
DispatchResult economic_dispatch(const powersys::NetworkCase& c, const demand::DemandSeries& d,
                                 const ExtendedSchedule& schedule, bool soft = true);

struct Correction {
  uc::UcSolution uc;
  ExtendedSchedule schedule;
  DispatchResult dispatch;
  int rounds = 0;
  double wall_seconds = 0.0;  // re-solves and dispatches inside the loop
};

// Dispatches the extended schedule; while violations remain, splits every
// window holding a violated period into single periods, rebuilds and
// re-solves. Throws Error("milp.time_limit") when a solve ends without a
// commitment and Error("dispatch.case_infeasible") when the
// original-resolution model itself has no solution.
Correction correct(const powersys::NetworkCase& c, const demand::DemandSeries& d,
                   const uc::UcSolution& sol, const uc::UcConfig& config);

// `p` with every window containing one of `periods` split into singletons.
demand::Partition split_windows(const demand::Partition& p, int horizon,
                                const std::vector<int>& periods);

}  // namespace ucflex::dispatch
