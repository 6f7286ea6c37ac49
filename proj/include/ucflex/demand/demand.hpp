#pragma once

#include <optional>
#include <vector>

namespace ucflex::demand {

// Per-bus demand over T0 original periods. Periods are numbered 1..T0 in
// every public interface of this module.
class DemandSeries {
 public:
  DemandSeries() = default;
  DemandSeries(int periods, int buses, double step_hours);
  // Builds a series from rows of per-bus values.
  static DemandSeries from_rows(const std::vector<std::vector<double>>& rows,
                                double step_hours);
  // Single-bus series from system values.
  static DemandSeries from_system(const std::vector<double>& system, double step_hours);

  int periods() const { return periods_; }
  int buses() const { return buses_; }
  double step_hours() const { return step_hours_; }

  double at(int period, int bus) const {
    return values_[static_cast<std::size_t>(period - 1) * buses_ + bus];
  }
  void set(int period, int bus, double mw);
  double system(int period) const { return system_[period - 1]; }
  const std::vector<double>& system_series() const { return system_; }
  double peak() const;

  // Throws Error("demand.invalid") on negative or non-finite entries, a
  // non-positive step or an empty horizon.
  void validate() const;

 private:
  int periods_ = 0;
  int buses_ = 0;
  double step_hours_ = 1.0;
  std::vector<double> values_;
  std::vector<double> system_;
};

struct WindowStats {
  std::vector<double> avg_bus;
  double avg_sys = 0.0;
  double max_sys = 0.0;
  double min_sys = 0.0;
  double max_step_up = 0.0;
  double max_step_down = 0.0;
};

// Statistics over periods first..last (inclusive). Step changes include the
// entry step from `prev_last` when given. Throws Error("window.range").
WindowStats window_stats(const DemandSeries& d, int first, int last,
                         std::optional<int> prev_last = std::nullopt);

// Strictly increasing 1-based starting periods; the first is always 1.
struct Partition {
  std::vector<int> starts;

  int size() const { return static_cast<int>(starts.size()); }
  // Throws Error("partition.invalid").
  void validate(int horizon) const;
  std::vector<int> durations(int horizon) const;
  int first(int t) const { return starts[t]; }
  int last(int t, int horizon) const {
    return t + 1 < size() ? starts[t + 1] - 1 : horizon;
  }
  // Window index containing original period `period`.
  int window_of(int period) const;

  static Partition from_durations(const std::vector<int>& durations);
  static Partition singletons(int horizon);

  bool operator==(const Partition&) const = default;
};

std::vector<int> partition_durations(const Partition& p, int horizon);

// Stats for every window of `p`; window t > 0 takes the last period of
// window t - 1 as its entry step.
std::vector<WindowStats> partition_stats(const DemandSeries& d, const Partition& p);

}  // namespace ucflex::demand
