#pragma once

#include <string>
#include <vector>

#include "ucflex/demand/demand.hpp"
#include "ucflex/powersys/network.hpp"
#include "ucflex/uc/ncuc.hpp"

namespace ucflex::resolution {

// A monitored line loaded near its rating, oriented so that the flagged flow
// is positive (direction -1 means the flow ran to -> from).
struct FlaggedLine {
  int line = 0;
  int direction = 1;
  bool operator==(const FlaggedLine&) const = default;
  auto operator<=>(const FlaggedLine&) const = default;
};

struct CongestionCandidates {
  // Index period - 1; each entry sorted.
  std::vector<std::vector<FlaggedLine>> by_period;
  // Estimated flows, [period - 1][line], MW.
  std::vector<std::vector<double>> flows;

  int periods() const { return static_cast<int>(by_period.size()); }
  bool empty() const;
  // Union over periods first..last (1-based, inclusive).
  std::vector<FlaggedLine> window(int first, int last) const;
  // First period with any flagged line, or 0.
  int first_flagged_period() const;
};

// Flags line l in period t when |flow| >= theta * rating under the
// commitment-relaxed, network-free dispatch at original resolution.
// Throws Error("resolution.relaxation_infeasible").
CongestionCandidates estimate_congestion(const powersys::NetworkCase& c,
                                         const demand::DemandSeries& d, double theta,
                                         const uc::UcConfig& config);

// Candidates computed from externally supplied per-period flows.
CongestionCandidates flag_flows(const powersys::NetworkCase& c,
                                std::vector<std::vector<double>> flows, double theta);

// Value used for a congestion term whose line cannot be relieved from one
// side (an empty unit group). Large enough to dominate any finite term while
// keeping partition objectives comparable.
inline constexpr double kUnrelievable = 1e6;

// Impact values for every window [first, last] of the horizon.
class ImpactTable {
 public:
  ImpactTable() = default;
  explicit ImpactTable(int horizon)
      : horizon_(horizon),
        values_(static_cast<std::size_t>(horizon) * horizon, 0.0) {}

  int horizon() const { return horizon_; }
  double operator()(int first, int last) const {
    return values_[static_cast<std::size_t>(first - 1) * horizon_ + (last - 1)];
  }
  double& at(int first, int last) {
    return values_[static_cast<std::size_t>(first - 1) * horizon_ + (last - 1)];
  }

 private:
  int horizon_ = 0;
  std::vector<double> values_;
};

struct ImpactTerms {
  double demand_range = 0.0;  // max - min of system demand
  double congestion = 0.0;    // largest normalized congestion term
  double peak = 0.0;          // max system demand
  double lambda = 0.0;
};

// Impact of one window, computed directly from its definition.
ImpactTerms impact_terms(const powersys::NetworkCase& c, const powersys::PtdfMatrix& ptdf,
                         const demand::DemandSeries& d,
                         const CongestionCandidates& candidates, int first, int last,
                         double epsilon = 1e-6);

// Table for all windows; incremental in the window end so the cost is
// O(T0^2 * candidate lines).
ImpactTable impact_table(const powersys::NetworkCase& c, const powersys::PtdfMatrix& ptdf,
                         const demand::DemandSeries& d,
                         const CongestionCandidates& candidates, double epsilon = 1e-6);

// Demand-range-only table: (max - min) / max per window.
ImpactTable demand_only_table(const demand::DemandSeries& d);

struct PartitionResult {
  demand::Partition partition;
  double objective = 0.0;
};

// Exact minimum of the summed window impacts over partitions into `windows`
// windows; ties resolve to the lexicographically smallest starts.
// Throws Error("partition.too_many") when windows > horizon.
PartitionResult optimize_partition(int horizon, int windows, const ImpactTable& table);

enum class Baseline { kDemandOnly, kWard, kEven };

Baseline parse_baseline(const std::string& name);
const char* to_string(Baseline b);

demand::Partition even_partition(int horizon, int windows);
demand::Partition ward_partition(const demand::DemandSeries& d, int windows);
demand::Partition baseline_partition(Baseline method, const demand::DemandSeries& d,
                                     int windows);

}  // namespace ucflex::resolution
