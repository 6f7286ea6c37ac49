#include "ucflex/dispatch/dispatch.hpp"

#include <algorithm>
#include <chrono>
#include <set>

#include "ucflex/error.hpp"
#include "ucflex/milp/simplex.hpp"

namespace ucflex::dispatch {

using milp::Sense;
using milp::Term;
using powersys::ThermalUnit;

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

std::string unit_label(const ThermalUnit& u, int i) {
  return u.name.empty() ? "G" + std::to_string(i) : u.name;
}

std::string line_label(const powersys::Line& l, int i) {
  return l.name.empty() ? "L" + std::to_string(i) : l.name;
}

struct SlackRow {
  int var;
  int period;
  std::string constraint;
};

bool is_ramp(const std::string& constraint) {
  return constraint.rfind("ramp_", 0) == 0;
}

}  // namespace

ExtendedSchedule extend(const std::vector<std::vector<int>>& commitment,
                        const demand::Partition& partition, int horizon) {
  partition.validate(horizon);
  ExtendedSchedule s;
  s.window_of.resize(horizon);
  for (int tau = 1; tau <= horizon; ++tau) s.window_of[tau - 1] = partition.window_of(tau);
  s.commitment.resize(commitment.size());
  for (std::size_t i = 0; i < commitment.size(); ++i) {
    if (static_cast<int>(commitment[i].size()) != partition.size()) {
      throw Error("dispatch.schedule", "commitment does not cover every window");
    }
    s.commitment[i].resize(horizon);
    for (int tau = 0; tau < horizon; ++tau) {
      s.commitment[i][tau] = commitment[i][s.window_of[tau]];
    }
  }
  return s;
}

ExtendedSchedule extend(const uc::UcSolution& sol, int horizon) {
  return extend(sol.commitment, sol.partition, horizon);
}

int count_startups(const powersys::NetworkCase& c, const ExtendedSchedule& s) {
  int starts = 0;
  for (int i = 0; i < s.num_units(); ++i) {
    int prev = c.units[i].init_on ? 1 : 0;
    for (int v : s.commitment[i]) {
      if (v && !prev) ++starts;
      prev = v;
    }
  }
  return starts;
}

std::vector<int> DispatchResult::violated_periods() const {
  std::set<int> periods;
  for (const Violation& v : violations) periods.insert(v.period);
  return {periods.begin(), periods.end()};
}

DispatchResult economic_dispatch(const powersys::NetworkCase& c, const demand::DemandSeries& d,
                                 const ExtendedSchedule& schedule, bool soft) {
  powersys::require_valid(c);
  d.validate();
  const int horizon = d.periods();
  const int ng = c.num_units();
  if (schedule.periods() != horizon || schedule.num_units() != ng) {
    throw Error("dispatch.schedule", "schedule does not match the case and horizon");
  }
  if (d.buses() != c.num_buses()) {
    throw Error("demand.buses", "demand and case bus counts differ");
  }
  const double dt = d.step_hours();

  milp::MilpModel m;
  std::vector<std::vector<int>> p(ng, std::vector<int>(horizon));
  for (int i = 0; i < ng; ++i) {
    const ThermalUnit& g = c.units[i];
    for (int tau = 0; tau < horizon; ++tau) {
      p[i][tau] = m.add_variable("p(" + unit_label(g, i) + "," + std::to_string(tau + 1) + ")",
                                 0.0, g.p_max, g.cost_linear * dt);
    }
  }

  std::vector<SlackRow> slacks;
  // Adds `row` with a penalized slack that relaxes it in its binding direction.
  auto add_row = [&](const std::string& constraint, int tau, std::vector<Term> row,
                     Sense sense, double rhs, double relax_sign) {
    const std::string name = constraint + "_" + std::to_string(tau + 1);
    if (soft) {
      const int s = m.add_variable("slack_" + name, 0.0, milp::kInf, kSlackPenalty);
      row.push_back({s, relax_sign});
      slacks.push_back({s, tau + 1, constraint});
    }
    m.add_constraint(name, std::move(row), sense, rhs);
  };

  std::vector<int> monitored;
  for (int l = 0; l < c.num_lines(); ++l) {
    if (c.lines[l].monitored()) monitored.push_back(l);
  }
  powersys::PtdfMatrix ptdf;
  if (!monitored.empty()) ptdf = powersys::compute_ptdf(c);

  for (int tau = 0; tau < horizon; ++tau) {
    std::vector<Term> sum;
    for (int i = 0; i < ng; ++i) sum.push_back({p[i][tau], 1.0});
    // Unserved and spilled energy are spread over the buses in proportion to
    // their demand, so they move no flow by themselves.
    int shortfall = -1, surplus = -1;
    if (soft) {
      const std::string name = "balance_" + std::to_string(tau + 1);
      shortfall = m.add_variable("slack_short_" + name, 0.0, milp::kInf, kSlackPenalty);
      surplus = m.add_variable("slack_surplus_" + name, 0.0, milp::kInf, kSlackPenalty);
      sum.push_back({shortfall, 1.0});
      sum.push_back({surplus, -1.0});
      slacks.push_back({shortfall, tau + 1, "balance"});
      slacks.push_back({surplus, tau + 1, "balance"});
    }
    const double total = d.system(tau + 1);
    m.add_constraint("balance_" + std::to_string(tau + 1), sum, Sense::kEqual, total);

    for (int l : monitored) {
      double load_flow = 0.0;
      for (int j = 0; j < c.num_buses(); ++j) load_flow += ptdf(l, j) * d.at(tau + 1, j);
      std::vector<Term> flow;
      for (int i = 0; i < ng; ++i) flow.push_back({p[i][tau], ptdf(l, c.units[i].bus)});
      if (soft && total > 0.0) {
        flow.push_back({shortfall, load_flow / total});
        flow.push_back({surplus, -load_flow / total});
      }
      const std::string line = line_label(c.lines[l], l);
      const double f = c.lines[l].rating;
      add_row("flow_max(" + line + ")", tau, flow, Sense::kLessEqual, f + load_flow, -1.0);
      add_row("flow_min(" + line + ")", tau, flow, Sense::kGreaterEqual, -f + load_flow, 1.0);
    }
  }

  for (int i = 0; i < ng; ++i) {
    const ThermalUnit& g = c.units[i];
    const std::string name = unit_label(g, i);
    const double u0 = g.init_on ? 1.0 : 0.0;
    const double p0 = g.init_on ? g.init_power : 0.0;
    for (int tau = 0; tau < horizon; ++tau) {
      const double u = schedule.commitment[i][tau];
      const double up = tau > 0 ? schedule.commitment[i][tau - 1] : u0;
      add_row("range_min(" + name + ")", tau, {{p[i][tau], 1.0}}, Sense::kGreaterEqual,
              g.p_min * u, 1.0);
      add_row("range_max(" + name + ")", tau, {{p[i][tau], 1.0}}, Sense::kLessEqual,
              g.p_max * u, -1.0);
      // Start-ups and shut-downs pass through p_min.
      const double rise = g.ramp_up * dt * up + g.p_min * (u - up) + g.p_max * (1.0 - u);
      const double fall = g.ramp_down * dt * u - g.p_min * (u - up) + g.p_max * (1.0 - up);
      std::vector<Term> inc{{p[i][tau], 1.0}}, dec{{p[i][tau], -1.0}};
      double shift = 0.0;
      if (tau > 0) {
        inc.push_back({p[i][tau - 1], -1.0});
        dec.push_back({p[i][tau - 1], 1.0});
      } else {
        shift = p0;
      }
      add_row("ramp_up(" + name + ")", tau, inc, Sense::kLessEqual, rise + shift, -1.0);
      add_row("ramp_down(" + name + ")", tau, dec, Sense::kLessEqual, fall - shift, -1.0);
    }
  }

  const milp::MilpSolution sol = milp::solve_lp(m);
  DispatchResult out;
  out.status = sol.status;
  for (int i = 0; i < ng; ++i) {
    int prev = c.units[i].init_on ? 1 : 0;
    for (int v : schedule.commitment[i]) {
      if (v && !prev) out.startup_cost += c.units[i].cost_startup;
      prev = v;
    }
  }
  if (!sol.has_solution()) {
    if (sol.status != milp::Status::kInfeasible) {
      throw Error("dispatch.lp", std::string("dispatch LP ended with status ") +
                                     milp::to_string(sol.status));
    }
    return out;
  }

  out.output.assign(ng, std::vector<double>(horizon));
  for (int i = 0; i < ng; ++i) {
    for (int tau = 0; tau < horizon; ++tau) {
      const double v = sol.values[p[i][tau]];
      out.output[i][tau] = v;
      out.operating_cost += (c.units[i].cost_linear * v +
                             c.units[i].cost_noload * schedule.commitment[i][tau]) * dt;
    }
  }
  for (const SlackRow& s : slacks) {
    const double v = sol.values[s.var];
    if (v > kViolationTol) out.violations.push_back({s.period, s.constraint, v});
  }
  std::stable_sort(out.violations.begin(), out.violations.end(),
                   [](const Violation& a, const Violation& b) { return a.period < b.period; });
  out.cost = out.operating_cost + out.startup_cost;
  out.feasible = out.violations.empty();
  return out;
}

demand::Partition split_windows(const demand::Partition& p, int horizon,
                                const std::vector<int>& periods) {
  std::vector<char> split(p.size(), 0);
  for (int tau : periods) {
    if (tau >= 1 && tau <= horizon) split[p.window_of(tau)] = 1;
  }
  demand::Partition out;
  for (int t = 0; t < p.size(); ++t) {
    if (split[t]) {
      for (int tau = p.first(t); tau <= p.last(t, horizon); ++tau) out.starts.push_back(tau);
    } else {
      out.starts.push_back(p.first(t));
    }
  }
  return out;
}

Correction correct(const powersys::NetworkCase& c, const demand::DemandSeries& d,
                   const uc::UcSolution& sol, const uc::UcConfig& config) {
  const double start = now_seconds();
  const int horizon = d.periods();
  Correction out;
  out.uc = sol;
  demand::Partition part = sol.partition;

  auto resolve = [&](const demand::Partition& next) {
    part = next;
    ++out.rounds;
    out.uc = uc::solve_ncuc(uc::build_ncuc(c, d, part, config), config);
  };

  for (;;) {
    if (!out.uc.has_solution()) {
      if (out.uc.status == milp::Status::kTimeLimit) {
        throw Error("milp.time_limit", "no commitment found on " +
                                           std::to_string(part.size()) +
                                           " windows within the time limit");
      }
      if (part.size() == horizon) {
        throw Error("dispatch.case_infeasible",
                    std::string("original-resolution model ended with status ") +
                        milp::to_string(out.uc.status));
      }
      resolve(demand::Partition::singletons(horizon));
      continue;
    }
    out.schedule = extend(out.uc, horizon);
    out.dispatch = economic_dispatch(c, d, out.schedule, true);
    if (out.dispatch.feasible) break;
    if (part.size() == horizon) {
      throw Error("dispatch.case_infeasible",
                  "original-resolution schedule violates " +
                      out.dispatch.violations.front().constraint + " in period " +
                      std::to_string(out.dispatch.violations.front().period));
    }

    std::vector<int> periods;
    for (const Violation& v : out.dispatch.violations) {
      periods.push_back(v.period);
      // A ramp row couples the period with its predecessor.
      if (is_ramp(v.constraint) && v.period > 1) periods.push_back(v.period - 1);
    }
    demand::Partition next = split_windows(part, horizon, periods);
    if (next == part) {
      // Only single-period windows are implicated: split their neighbours.
      std::vector<int> around;
      for (int tau : periods) {
        const int w = part.window_of(tau);
        if (w > 0) around.push_back(part.first(w - 1));
        if (w + 1 < part.size()) around.push_back(part.first(w + 1));
      }
      next = split_windows(part, horizon, around);
      if (next == part) next = demand::Partition::singletons(horizon);
    }
    resolve(next);
  }
  out.wall_seconds = now_seconds() - start;
  return out;
}

}  // namespace ucflex::dispatch
