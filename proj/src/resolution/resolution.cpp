#include "ucflex/resolution/resolution.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "ucflex/error.hpp"
#include "ucflex/milp/simplex.hpp"

namespace ucflex::resolution {

using demand::DemandSeries;
using demand::Partition;
using powersys::NetworkCase;
using powersys::PtdfMatrix;

bool CongestionCandidates::empty() const {
  for (const auto& p : by_period) {
    if (!p.empty()) return false;
  }
  return true;
}

std::vector<FlaggedLine> CongestionCandidates::window(int first, int last) const {
  std::set<FlaggedLine> all;
  for (int t = first; t <= last; ++t) all.insert(by_period[t - 1].begin(), by_period[t - 1].end());
  return {all.begin(), all.end()};
}

int CongestionCandidates::first_flagged_period() const {
  for (int t = 0; t < periods(); ++t) {
    if (!by_period[t].empty()) return t + 1;
  }
  return 0;
}

CongestionCandidates flag_flows(const NetworkCase& c,
                                std::vector<std::vector<double>> flows, double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw Error("resolution.theta", "threshold must lie in (0, 1]");
  }
  CongestionCandidates out;
  out.by_period.resize(flows.size());
  for (std::size_t t = 0; t < flows.size(); ++t) {
    for (int l = 0; l < c.num_lines(); ++l) {
      const auto& line = c.lines[l];
      if (!line.monitored()) continue;
      const double f = flows[t][l];
      if (std::abs(f) >= theta * line.rating - 1e-9) {
        out.by_period[t].push_back({l, f >= 0.0 ? 1 : -1});
      }
    }
  }
  out.flows = std::move(flows);
  return out;
}

CongestionCandidates estimate_congestion(const NetworkCase& c, const DemandSeries& d,
                                         double theta, const uc::UcConfig& config) {
  uc::ModelHandle h;
  try {
    h = uc::build_relaxed_ncuc(c, d, config);
  } catch (const Error& e) {
    if (e.code() != "uc.capacity_shortfall") throw;
    throw Error("resolution.relaxation_infeasible", e.what());
  }
  const milp::MilpSolution sol = milp::solve_lp(h.model);
  if (sol.status != milp::Status::kOptimal) {
    throw Error("resolution.relaxation_infeasible",
                std::string("relaxed commitment problem is ") + milp::to_string(sol.status));
  }
  const PtdfMatrix ptdf = powersys::compute_ptdf(c);
  std::vector<std::vector<double>> flows(d.periods());
  std::vector<double> injection(c.num_buses());
  for (int t = 1; t <= d.periods(); ++t) {
    for (int j = 0; j < c.num_buses(); ++j) injection[j] = -d.at(t, j);
    for (int i = 0; i < c.num_units(); ++i) {
      injection[c.units[i].bus] += sol.values[h.p[i][t - 1]];
    }
    flows[t - 1] = ptdf.flows(injection);
  }
  return flag_flows(c, std::move(flows), theta);
}

namespace {

// Per oriented line: the unit split and the two potential series whose
// forward differences give the congestion terms.
struct LineSeries {
  FlaggedLine key;
  bool unrelievable = false;
  double eta_plus = 0.0, eta_minus = 0.0;
  double spread = 0.0;                  // T+ - T-
  std::vector<double> g_plus, g_minus;  // index period - 1
};

LineSeries line_series(const NetworkCase& c, const PtdfMatrix& ptdf,
                       const DemandSeries& d, FlaggedLine key, double epsilon) {
  LineSeries s;
  s.key = key;
  const auto split = powersys::classify_units(ptdf, c.units, key.line, epsilon, key.direction);
  s.unrelievable = split.plus_empty() || split.minus_empty();
  s.eta_plus = split.eta_plus;
  s.eta_minus = split.eta_minus;
  s.spread = split.ptdf_plus - split.ptdf_minus;
  s.g_plus.resize(d.periods());
  s.g_minus.resize(d.periods());
  for (int t = 1; t <= d.periods(); ++t) {
    double load_flow = 0.0;
    for (int j = 0; j < d.buses(); ++j) load_flow += key.direction * ptdf(key.line, j) * d.at(t, j);
    s.g_plus[t - 1] = split.ptdf_minus * d.system(t) - load_flow;
    s.g_minus[t - 1] = split.ptdf_plus * d.system(t) - load_flow;
  }
  return s;
}

// Normalized congestion term from the largest forward rises of the two
// series.
double congestion_term(const LineSeries& s, double rise_plus, double rise_minus) {
  if (s.unrelievable) return kUnrelievable;
  auto part = [&](double rise, double eta) {
    const double need = std::max(0.0, rise / s.spread);
    if (need <= 0.0) return 0.0;
    return eta > 0.0 ? need / eta : kUnrelievable;
  };
  return std::max(part(rise_plus, s.eta_plus), part(rise_minus, s.eta_minus));
}

double combine(double range, double congestion, double peak) {
  if (congestion >= kUnrelievable) return kUnrelievable;
  if (peak <= 0.0) return 0.0;
  return std::max(range, congestion) / peak;
}

}  // namespace

ImpactTerms impact_terms(const NetworkCase& c, const PtdfMatrix& ptdf, const DemandSeries& d,
                         const CongestionCandidates& candidates, int first, int last,
                         double epsilon) {
  if (first < 1 || first > last || last > d.periods()) {
    throw Error("window.range", "window [" + std::to_string(first) + ", " +
                                    std::to_string(last) + "] outside the horizon");
  }
  ImpactTerms out;
  double lo = d.system(first), hi = d.system(first);
  for (int t = first; t <= last; ++t) {
    lo = std::min(lo, d.system(t));
    hi = std::max(hi, d.system(t));
  }
  out.demand_range = hi - lo;
  out.peak = hi;
  if (last > first) {
    for (const FlaggedLine& key : candidates.window(first, last)) {
      const LineSeries s = line_series(c, ptdf, d, key, epsilon);
      double rise_plus = -milp::kInf, rise_minus = -milp::kInf;
      for (int a = first; a < last; ++a) {
        for (int b = a + 1; b <= last; ++b) {
          rise_plus = std::max(rise_plus, s.g_plus[b - 1] - s.g_plus[a - 1]);
          rise_minus = std::max(rise_minus, s.g_minus[b - 1] - s.g_minus[a - 1]);
        }
      }
      out.congestion = std::max(out.congestion, congestion_term(s, rise_plus, rise_minus));
    }
  }
  out.lambda = combine(out.demand_range, out.congestion, out.peak);
  return out;
}

ImpactTable impact_table(const NetworkCase& c, const PtdfMatrix& ptdf, const DemandSeries& d,
                         const CongestionCandidates& candidates, double epsilon) {
  const int n = d.periods();
  if (candidates.periods() != n) {
    throw Error("resolution.candidates", "candidate periods do not match demand");
  }
  std::set<FlaggedLine> keys;
  for (const auto& p : candidates.by_period) keys.insert(p.begin(), p.end());
  std::vector<LineSeries> series;
  for (const FlaggedLine& k : keys) series.push_back(line_series(c, ptdf, d, k, epsilon));
  // flagged[t][k]: key k is flagged in period t + 1.
  std::vector<std::vector<char>> flagged(n, std::vector<char>(series.size(), 0));
  for (int t = 0; t < n; ++t) {
    for (const FlaggedLine& f : candidates.by_period[t]) {
      const auto pos = std::distance(keys.begin(), keys.find(f));
      flagged[t][pos] = 1;
    }
  }

  ImpactTable table(n);
  const std::size_t nk = series.size();
  std::vector<double> min_p(nk), min_m(nk), rise_p(nk), rise_m(nk);
  std::vector<char> active(nk);
  for (int first = 1; first <= n; ++first) {
    double lo = d.system(first), hi = d.system(first);
    for (std::size_t k = 0; k < nk; ++k) {
      min_p[k] = series[k].g_plus[first - 1];
      min_m[k] = series[k].g_minus[first - 1];
      rise_p[k] = rise_m[k] = -milp::kInf;
      active[k] = flagged[first - 1][k];
    }
    table.at(first, first) = combine(0.0, 0.0, hi);
    for (int last = first + 1; last <= n; ++last) {
      lo = std::min(lo, d.system(last));
      hi = std::max(hi, d.system(last));
      double congestion = 0.0;
      for (std::size_t k = 0; k < nk; ++k) {
        const double gp = series[k].g_plus[last - 1], gm = series[k].g_minus[last - 1];
        rise_p[k] = std::max(rise_p[k], gp - min_p[k]);
        rise_m[k] = std::max(rise_m[k], gm - min_m[k]);
        min_p[k] = std::min(min_p[k], gp);
        min_m[k] = std::min(min_m[k], gm);
        active[k] = active[k] || flagged[last - 1][k];
        if (active[k]) {
          congestion = std::max(congestion, congestion_term(series[k], rise_p[k], rise_m[k]));
        }
      }
      table.at(first, last) = combine(hi - lo, congestion, hi);
    }
  }
  return table;
}

ImpactTable demand_only_table(const DemandSeries& d) {
  const int n = d.periods();
  ImpactTable table(n);
  for (int first = 1; first <= n; ++first) {
    double lo = d.system(first), hi = d.system(first);
    for (int last = first; last <= n; ++last) {
      lo = std::min(lo, d.system(last));
      hi = std::max(hi, d.system(last));
      table.at(first, last) = combine(hi - lo, 0.0, hi);
    }
  }
  return table;
}

PartitionResult optimize_partition(int horizon, int windows, const ImpactTable& table) {
  if (windows > horizon) {
    throw Error("partition.too_many", std::to_string(windows) + " windows requested for " +
                                          std::to_string(horizon) + " periods");
  }
  if (windows < 1) throw Error("partition.invalid", "at least one window is required");
  if (table.horizon() != horizon) {
    throw Error("partition.invalid", "impact table does not cover the horizon");
  }
  const double inf = milp::kInf;
  // best[k][t]: cheapest cover of periods t..horizon by k windows.
  std::vector<std::vector<double>> best(windows + 1, std::vector<double>(horizon + 2, inf));
  best[0][horizon + 1] = 0.0;
  for (int k = 1; k <= windows; ++k) {
    for (int t = horizon - k + 1; t >= 1; --t) {
      double b = inf;
      for (int e = t; e <= horizon - k + 1; ++e) {
        if (best[k - 1][e + 1] == inf) continue;
        b = std::min(b, table(t, e) + best[k - 1][e + 1]);
      }
      best[k][t] = b;
    }
  }
  PartitionResult out;
  int t = 1;
  for (int k = windows; k >= 1; --k) {
    out.partition.starts.push_back(t);
    const double target = best[k][t];
    const double tol = 1e-12 * std::max(1.0, std::abs(target));
    int chosen = -1;
    for (int e = t; e <= horizon - k + 1; ++e) {
      if (best[k - 1][e + 1] == inf) continue;
      if (table(t, e) + best[k - 1][e + 1] <= target + tol) {
        chosen = e;
        break;
      }
    }
    out.objective += table(t, chosen);
    t = chosen + 1;
  }
  return out;
}

Baseline parse_baseline(const std::string& name) {
  if (name == "demand_only") return Baseline::kDemandOnly;
  if (name == "ward") return Baseline::kWard;
  if (name == "even") return Baseline::kEven;
  throw Error("cli.method", "unknown baseline method " + name);
}

const char* to_string(Baseline b) {
  switch (b) {
    case Baseline::kDemandOnly: return "demand_only";
    case Baseline::kWard: return "ward";
    case Baseline::kEven: return "even";
  }
  return "unknown";
}

Partition even_partition(int horizon, int windows) {
  if (windows > horizon) {
    throw Error("partition.too_many", std::to_string(windows) + " windows requested for " +
                                          std::to_string(horizon) + " periods");
  }
  if (windows < 1) throw Error("partition.invalid", "at least one window is required");
  const int base = horizon / windows, extra = horizon % windows;
  std::vector<int> durations(windows, base);
  for (int t = 0; t < extra; ++t) ++durations[t];
  return Partition::from_durations(durations);
}

Partition ward_partition(const DemandSeries& d, int windows) {
  const int n = d.periods();
  const Partition even = even_partition(n, windows);
  struct Cluster {
    int first, last;
    double mean;
  };
  std::vector<Cluster> cl;
  for (int t = 1; t <= n; ++t) cl.push_back({t, t, d.system(t)});
  auto size = [](const Cluster& c) { return static_cast<double>(c.last - c.first + 1); };
  while (static_cast<int>(cl.size()) > windows) {
    int pick = -1;
    double best = milp::kInf;
    bool best_inside = false;
    for (std::size_t k = 0; k + 1 < cl.size(); ++k) {
      const Cluster& a = cl[k];
      const Cluster& b = cl[k + 1];
      const double na = size(a), nb = size(b);
      const double diff = a.mean - b.mean;
      const double cost = na * nb / (na + nb) * diff * diff;
      const bool inside = even.window_of(a.first) == even.window_of(b.last);
      const double tol = 1e-12 * std::max(1.0, std::abs(best));
      const bool better = pick < 0 || cost < best - tol ||
                          (cost <= best + tol && inside && !best_inside);
      if (better) {
        pick = static_cast<int>(k);
        best = cost;
        best_inside = inside;
      }
    }
    Cluster& a = cl[pick];
    const Cluster& b = cl[pick + 1];
    const double na = size(a), nb = size(b);
    a.mean = (a.mean * na + b.mean * nb) / (na + nb);
    a.last = b.last;
    cl.erase(cl.begin() + pick + 1);
  }
  Partition p;
  for (const Cluster& c : cl) p.starts.push_back(c.first);
  return p;
}

Partition baseline_partition(Baseline method, const DemandSeries& d, int windows) {
  switch (method) {
    case Baseline::kDemandOnly:
      return optimize_partition(d.periods(), windows, demand_only_table(d)).partition;
    case Baseline::kWard: return ward_partition(d, windows);
    case Baseline::kEven: return even_partition(d.periods(), windows);
  }
  throw Error("cli.method", "unknown baseline method");
}

}  // namespace ucflex::resolution
