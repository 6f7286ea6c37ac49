#include "ucflex/uc/ncuc.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "ucflex/error.hpp"

namespace ucflex::uc {

using milp::Sense;
using milp::Term;
using powersys::ThermalUnit;

namespace {

// Average of the steepest trajectory that starts at p_min and climbs by `step`
// per original period (capped at p_max) over `d` periods.
double ramped_average(const ThermalUnit& unit, double step, int d, int& turn) {
  const double range = unit.range();
  turn = d;
  if (step > 0.0) {
    const double climbs = std::floor(range / step + 1e-12);
    if (climbs + 1 < d) turn = static_cast<int>(climbs) + 1;
  }
  const double share = static_cast<double>(turn) / d;
  return share * step * (turn - 1) / 2.0 + (1.0 - share) * range + unit.p_min;
}

std::string tag(const char* what, const std::string& unit, int t) {
  std::ostringstream s;
  s << what << '(' << unit << ',' << t + 1 << ')';
  return s.str();
}

std::string tag(const char* what, int t) {
  return std::string(what) + "(" + std::to_string(t + 1) + ")";
}

std::string unit_label(const ThermalUnit& u, int i) {
  return u.name.empty() ? "G" + std::to_string(i) : u.name;
}

ModelHandle build(const powersys::NetworkCase& c, const demand::DemandSeries& d,
                  const demand::Partition& partition, const UcConfig& config,
                  bool relaxed) {
  powersys::require_valid(c);
  d.validate();
  if (d.buses() != c.num_buses()) {
    throw Error("demand.buses", "demand has " + std::to_string(d.buses()) +
                                    " bus columns, case has " +
                                    std::to_string(c.num_buses()) + " buses");
  }
  if (config.reserve_up < 0.0 || config.reserve_down < 0.0) {
    throw Error("uc.config", "reserve ratios must be non-negative");
  }
  double capacity = 0.0;
  for (const ThermalUnit& u : c.units) capacity += u.p_max;
  const double need = d.peak() * (1.0 + config.reserve_up);
  if (need > capacity * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "peak demand with reserve " << need << " MW exceeds installed capacity "
        << capacity << " MW";
    throw Error("uc.capacity_shortfall", msg.str());
  }

  ModelHandle h;
  h.partition = partition;
  h.durations = partition.durations(d.periods());
  h.step_hours = d.step_hours();
  const auto stats = demand::partition_stats(d, partition);
  const int nt = partition.size();
  const int ng = c.num_units();
  const double dt = d.step_hours();
  milp::MilpModel& m = h.model;

  h.u.assign(ng, std::vector<int>(nt));
  h.p.assign(ng, std::vector<int>(nt));
  h.s.assign(ng, std::vector<int>(nt));
  for (int i = 0; i < ng; ++i) {
    const ThermalUnit& g = c.units[i];
    const std::string name = unit_label(g, i);
    for (int t = 0; t < nt; ++t) {
      const double hours = h.durations[t] * dt;
      h.u[i][t] = m.add_variable(tag("u", name, t), 0.0, 1.0, g.cost_noload * hours,
                                 !relaxed);
      h.p[i][t] = m.add_variable(tag("p", name, t), 0.0, g.p_max, g.cost_linear * hours);
      h.s[i][t] = m.add_variable(tag("s", name, t), 0.0, 1.0, g.cost_startup, !relaxed);
    }
  }

  std::vector<int> monitored;
  for (int l = 0; l < c.num_lines(); ++l) {
    if (c.lines[l].monitored()) monitored.push_back(l);
  }
  powersys::PtdfMatrix ptdf;
  const bool network = config.network && !relaxed && !monitored.empty();
  if (network) ptdf = powersys::compute_ptdf(c);

  for (int t = 0; t < nt; ++t) {
    const demand::WindowStats& w = stats[t];
    std::vector<Term> sum_p, cap_up, cap_dn, ramp_up, ramp_dn;
    for (int i = 0; i < ng; ++i) {
      const ThermalUnit& g = c.units[i];
      sum_p.push_back({h.p[i][t], 1.0});
      cap_up.push_back({h.u[i][t], g.p_max});
      cap_dn.push_back({h.u[i][t], g.p_min});
      ramp_up.push_back({h.u[i][t], g.ramp_up * dt});
      ramp_dn.push_back({h.u[i][t], g.ramp_down * dt});
    }
    m.add_constraint(tag("balance", t), sum_p, Sense::kEqual, w.avg_sys);
    m.add_constraint(tag("reserve_up", t), cap_up, Sense::kGreaterEqual,
                     (1.0 + config.reserve_up) * w.max_sys);
    m.add_constraint(tag("reserve_down", t), cap_dn, Sense::kLessEqual,
                     (1.0 - config.reserve_down) * w.min_sys);
    m.add_constraint(tag("ramp_reserve_up", t), ramp_up, Sense::kGreaterEqual,
                     w.max_step_up);
    m.add_constraint(tag("ramp_reserve_down", t), ramp_dn, Sense::kGreaterEqual,
                     w.max_step_down);
    if (network) {
      for (int l : monitored) {
        std::vector<Term> flow;
        double load_flow = 0.0;
        for (int j = 0; j < c.num_buses(); ++j) load_flow += ptdf(l, j) * w.avg_bus[j];
        for (int i = 0; i < ng; ++i) {
          flow.push_back({h.p[i][t], ptdf(l, c.units[i].bus)});
        }
        const std::string line = c.lines[l].name.empty() ? "L" + std::to_string(l)
                                                          : c.lines[l].name;
        const double f = c.lines[l].rating;
        m.add_constraint(tag("flow_max", line, t), flow, Sense::kLessEqual, f + load_flow);
        m.add_constraint(tag("flow_min", line, t), flow, Sense::kGreaterEqual,
                         -f + load_flow);
      }
    }
  }

  for (int i = 0; i < ng; ++i) {
    const ThermalUnit& g = c.units[i];
    const std::string name = unit_label(g, i);
    const double u0 = g.init_on ? 1.0 : 0.0;
    const double p0 = g.init_on ? g.init_power : 0.0;
    std::vector<RampParams> rp(nt);
    for (int t = 0; t < nt; ++t) {
      rp[t] = ramp_params(g, t > 0 ? h.durations[t - 1] : 1, h.durations[t], dt);
    }
    // The initial state behaves like a one-period window.
    const double sd_initial = g.p_min;

    for (int t = 0; t < nt; ++t) {
      const int u = h.u[i][t], p = h.p[i][t], s = h.s[i][t];
      m.add_constraint(tag("range_min", name, t), {{p, 1.0}, {u, -g.p_min}},
                       Sense::kGreaterEqual, 0.0);
      m.add_constraint(tag("range_max", name, t), {{p, 1.0}, {u, -g.p_max}},
                       Sense::kLessEqual, 0.0);

      const RampParams& r = rp[t];
      const double sd_prev = t > 0 ? rp[t - 1].shutdown : sd_initial;
      // p_t - p_{t-1} <= RU u_{t-1} + SU (u_t - u_{t-1}) + Pmax (1 - u_t)
      // p_{t-1} - p_t <= RD u_t - SD' (u_t - u_{t-1}) + Pmax (1 - u_{t-1})
      if (t > 0) {
        const int up = h.u[i][t - 1], pp = h.p[i][t - 1];
        m.add_constraint(tag("ramp_up", name, t),
                         {{p, 1.0}, {pp, -1.0}, {u, g.p_max - r.startup},
                          {up, r.startup - r.ramp_up}},
                         Sense::kLessEqual, g.p_max);
        m.add_constraint(tag("ramp_down", name, t),
                         {{pp, 1.0}, {p, -1.0}, {u, sd_prev - r.ramp_down},
                          {up, g.p_max - sd_prev}},
                         Sense::kLessEqual, g.p_max);
        m.add_constraint(tag("startup", name, t), {{s, 1.0}, {u, -1.0}, {up, 1.0}},
                         Sense::kGreaterEqual, 0.0);
      } else {
        m.add_constraint(tag("ramp_up", name, t), {{p, 1.0}, {u, g.p_max - r.startup}},
                         Sense::kLessEqual,
                         g.p_max + p0 + (r.ramp_up - r.startup) * u0);
        m.add_constraint(tag("ramp_down", name, t),
                         {{p, -1.0}, {u, sd_prev - r.ramp_down}}, Sense::kLessEqual,
                         g.p_max - p0 - (g.p_max - sd_prev) * u0);
        m.add_constraint(tag("startup", name, t), {{s, 1.0}, {u, -1.0}},
                         Sense::kGreaterEqual, -u0);
      }

    }

    // Minimum up/down in aggregated form: a start-up in window k keeps the
    // unit on through T(k, up time), so the start-ups whose span covers t sum
    // to at most u_t; shut-downs (s_k - u_k + u_{k-1}) likewise to at most
    // 1 - u_t. Each pairwise row u_t >= u_k - u_{k-1} follows from these.
    std::vector<int> up_end(nt), dn_end(nt);
    for (int k = 0; k < nt; ++k) {
      up_end[k] = min_time_horizon(k, g.min_up, h.durations, dt);
      dn_end[k] = min_time_horizon(k, g.min_down, h.durations, dt);
    }
    for (int t = 1; t < nt; ++t) {
      std::vector<Term> on{{h.u[i][t], -1.0}};
      for (int k = 0; k < t; ++k) {
        if (up_end[k] >= t) on.push_back({h.s[i][k], 1.0});
      }
      if (on.size() > 1) {
        on.push_back({h.s[i][t], 1.0});
        m.add_constraint(tag("min_up", name, t), on, Sense::kLessEqual, 0.0);
      }
      std::vector<Term> off{{h.u[i][t], 1.0}};
      double rhs = 1.0;
      for (int k = 0; k < t; ++k) {
        if (dn_end[k] < t) continue;
        off.push_back({h.s[i][k], 1.0});
        off.push_back({h.u[i][k], -1.0});
        if (k > 0) {
          off.push_back({h.u[i][k - 1], 1.0});
        } else {
          rhs -= u0;
        }
      }
      if (off.size() > 1) {
        off.push_back({h.s[i][t], 1.0});
        off.push_back({h.u[i][t], -1.0});
        off.push_back({h.u[i][t - 1], 1.0});
        m.add_constraint(tag("min_down", name, t), off, Sense::kLessEqual, rhs);
      }
    }

    const double remaining = g.init_on ? g.min_up - g.init_duration
                                       : g.min_down - g.init_duration;
    if (remaining > 0.0) {
      const int end = min_time_horizon(0, remaining, h.durations, dt);
      for (int k = 0; k <= end; ++k) {
        m.add_constraint(tag(g.init_on ? "init_up" : "init_down", name, k),
                         {{h.u[i][k], 1.0}}, Sense::kEqual, u0);
      }
    }
  }
  return h;
}

}  // namespace

RampParams ramp_params(const ThermalUnit& unit, int d_prev, int d_cur,
                       double step_hours) {
  RampParams r;
  const double up = unit.ramp_up * step_hours;
  const double dn = unit.ramp_down * step_hours;
  r.ramp_up = (d_cur + d_prev) / 2.0 * up;
  r.ramp_down = (d_cur + d_prev) / 2.0 * dn;
  r.startup = ramped_average(unit, up, d_cur, r.startup_turn);
  r.shutdown = ramped_average(unit, dn, d_cur, r.shutdown_turn);
  return r;
}

int min_time_horizon(int t, double hours, const std::vector<int>& durations,
                     double step_hours) {
  const int last = static_cast<int>(durations.size()) - 1;
  double covered = 0.0;
  for (int k = t; k <= last; ++k) {
    covered += durations[k] * step_hours;
    if (covered >= hours - 1e-9) return k;
  }
  return last;
}

ModelHandle build_ncuc(const powersys::NetworkCase& c, const demand::DemandSeries& d,
                       const demand::Partition& partition, const UcConfig& config) {
  return build(c, d, partition, config, false);
}

ModelHandle build_conventional_ncuc(const powersys::NetworkCase& c,
                                    const demand::DemandSeries& d,
                                    const UcConfig& config) {
  return build(c, d, demand::Partition::singletons(d.periods()), config, false);
}

ModelHandle build_relaxed_ncuc(const powersys::NetworkCase& c,
                               const demand::DemandSeries& d, const UcConfig& config) {
  return build(c, d, demand::Partition::singletons(d.periods()), config, true);
}

UcSolution extract_solution(const ModelHandle& h, const milp::MilpSolution& sol) {
  UcSolution out;
  out.status = sol.status;
  out.partition = h.partition;
  out.objective = sol.objective;
  out.bound = sol.bound;
  out.gap = sol.gap;
  out.wall_seconds = sol.wall_seconds;
  out.nodes = sol.nodes;
  if (!sol.has_solution()) return out;
  const int ng = h.num_units(), nt = h.num_windows();
  out.commitment.assign(ng, std::vector<int>(nt));
  out.output.assign(ng, std::vector<double>(nt));
  for (int i = 0; i < ng; ++i) {
    for (int t = 0; t < nt; ++t) {
      out.commitment[i][t] = sol.values[h.u[i][t]] > 0.5 ? 1 : 0;
      out.output[i][t] = sol.values[h.p[i][t]];
    }
  }
  return out;
}

UcSolution solve_ncuc(const ModelHandle& h, const UcConfig& config) {
  milp::MilpOptions opt;
  opt.gap = config.mip_gap;
  opt.time_limit = config.time_limit;
  return extract_solution(h, milp::solve_milp(h.model, opt));
}

}  // namespace ucflex::uc
