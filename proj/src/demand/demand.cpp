#include "ucflex/demand/demand.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ucflex/error.hpp"

namespace ucflex::demand {

DemandSeries::DemandSeries(int periods, int buses, double step_hours)
    : periods_(periods),
      buses_(buses),
      step_hours_(step_hours),
      values_(static_cast<std::size_t>(periods) * buses, 0.0),
      system_(periods, 0.0) {}

DemandSeries DemandSeries::from_rows(const std::vector<std::vector<double>>& rows,
                                     double step_hours) {
  const int buses = rows.empty() ? 0 : static_cast<int>(rows.front().size());
  DemandSeries d(static_cast<int>(rows.size()), buses, step_hours);
  for (int t = 0; t < d.periods_; ++t) {
    if (static_cast<int>(rows[t].size()) != buses) {
      throw Error("demand.invalid", "row " + std::to_string(t + 1) + " has " +
                                        std::to_string(rows[t].size()) +
                                        " values, expected " + std::to_string(buses));
    }
    for (int b = 0; b < buses; ++b) d.set(t + 1, b, rows[t][b]);
  }
  return d;
}

DemandSeries DemandSeries::from_system(const std::vector<double>& system,
                                       double step_hours) {
  DemandSeries d(static_cast<int>(system.size()), 1, step_hours);
  for (int t = 0; t < d.periods_; ++t) d.set(t + 1, 0, system[t]);
  return d;
}

void DemandSeries::set(int period, int bus, double mw) {
  double& slot = values_[static_cast<std::size_t>(period - 1) * buses_ + bus];
  system_[period - 1] += mw - slot;
  slot = mw;
}

double DemandSeries::peak() const {
  return system_.empty() ? 0.0 : *std::max_element(system_.begin(), system_.end());
}

void DemandSeries::validate() const {
  if (periods_ < 1) throw Error("demand.invalid", "demand has no periods");
  if (!(step_hours_ > 0.0) || !std::isfinite(step_hours_)) {
    throw Error("demand.invalid", "step length must be positive");
  }
  for (int t = 1; t <= periods_; ++t) {
    for (int b = 0; b < buses_; ++b) {
      const double v = at(t, b);
      if (!std::isfinite(v) || v < 0.0) {
        throw Error("demand.invalid", "period " + std::to_string(t) + ", bus " +
                                          std::to_string(b) + ": invalid value");
      }
    }
  }
}

WindowStats window_stats(const DemandSeries& d, int first, int last,
                         std::optional<int> prev_last) {
  if (first < 1 || first > last || last > d.periods()) {
    throw Error("window.range", "window [" + std::to_string(first) + ", " +
                                    std::to_string(last) + "] outside 1.." +
                                    std::to_string(d.periods()));
  }
  if (prev_last && (*prev_last < 1 || *prev_last > d.periods())) {
    throw Error("window.range", "previous period " + std::to_string(*prev_last) +
                                    " outside the horizon");
  }
  WindowStats s;
  s.avg_bus.assign(d.buses(), 0.0);
  s.max_sys = d.system(first);
  s.min_sys = d.system(first);
  const int len = last - first + 1;
  for (int t = first; t <= last; ++t) {
    for (int b = 0; b < d.buses(); ++b) s.avg_bus[b] += d.at(t, b);
    s.avg_sys += d.system(t);
    s.max_sys = std::max(s.max_sys, d.system(t));
    s.min_sys = std::min(s.min_sys, d.system(t));
  }
  for (double& v : s.avg_bus) v /= len;
  s.avg_sys /= len;
  double before = prev_last ? d.system(*prev_last) : d.system(first);
  for (int t = first; t <= last; ++t) {
    const double step = d.system(t) - before;
    s.max_step_up = std::max(s.max_step_up, step);
    s.max_step_down = std::max(s.max_step_down, -step);
    before = d.system(t);
  }
  return s;
}

void Partition::validate(int horizon) const {
  auto fail = [](const std::string& msg) { throw Error("partition.invalid", msg); };
  if (starts.empty()) fail("no periods");
  if (starts.front() != 1) fail("first period must start at 1");
  for (std::size_t t = 1; t < starts.size(); ++t) {
    if (starts[t] <= starts[t - 1]) fail("starts must be strictly increasing");
  }
  if (starts.back() > horizon) {
    fail("start " + std::to_string(starts.back()) + " beyond horizon " +
         std::to_string(horizon));
  }
}

std::vector<int> Partition::durations(int horizon) const {
  validate(horizon);
  std::vector<int> d(starts.size());
  for (int t = 0; t < size(); ++t) d[t] = last(t, horizon) - starts[t] + 1;
  return d;
}

int Partition::window_of(int period) const {
  auto it = std::upper_bound(starts.begin(), starts.end(), period);
  return static_cast<int>(it - starts.begin()) - 1;
}

Partition Partition::from_durations(const std::vector<int>& durations) {
  Partition p;
  int next = 1;
  for (int d : durations) {
    if (d < 1) throw Error("partition.invalid", "durations must be positive");
    p.starts.push_back(next);
    next += d;
  }
  return p;
}

Partition Partition::singletons(int horizon) {
  Partition p;
  for (int t = 1; t <= horizon; ++t) p.starts.push_back(t);
  return p;
}

std::vector<int> partition_durations(const Partition& p, int horizon) {
  return p.durations(horizon);
}

std::vector<WindowStats> partition_stats(const DemandSeries& d, const Partition& p) {
  p.validate(d.periods());
  std::vector<WindowStats> out;
  out.reserve(p.size());
  for (int t = 0; t < p.size(); ++t) {
    std::optional<int> prev;
    if (t > 0) prev = p.first(t) - 1;
    out.push_back(window_stats(d, p.first(t), p.last(t, d.periods()), prev));
  }
  return out;
}

}  // namespace ucflex::demand
