#pragma once

// Textbook hourly unit commitment written directly from the per-period
// formulas (start-up and shut-down limited to p_min, min up/down spans of
// ceil(T/dt) periods). Variables are created in the same order as the
// library builder so that rows can be compared one to one.

#include <cmath>
#include <tuple>
#include <vector>

#include "ucflex/demand/demand.hpp"
#include "ucflex/milp/model.hpp"
#include "ucflex/powersys/network.hpp"

namespace oracle {

struct ConventionalUc {
  ucflex::milp::MilpModel model;
  std::vector<std::vector<int>> u, p, s;
};

inline ConventionalUc conventional_uc(const ucflex::powersys::NetworkCase& c,
                                      const ucflex::demand::DemandSeries& d,
                                      double r_up, double r_dn) {
  using ucflex::milp::Sense;
  using ucflex::milp::Term;
  ConventionalUc out;
  auto& m = out.model;
  const int ng = c.num_units(), nt = d.periods();
  const double dt = d.step_hours();
  out.u.assign(ng, std::vector<int>(nt));
  out.p = out.s = out.u;
  for (int i = 0; i < ng; ++i) {
    const auto& g = c.units[i];
    for (int t = 0; t < nt; ++t) {
      out.u[i][t] = m.add_variable("", 0, 1, g.cost_noload * dt, true);
      out.p[i][t] = m.add_variable("", 0, g.p_max, g.cost_linear * dt);
      out.s[i][t] = m.add_variable("", 0, 1, g.cost_startup, true);
    }
  }
  const auto ptdf = ucflex::powersys::compute_ptdf(c);
  for (int t = 0; t < nt; ++t) {
    const int tau = t + 1;
    const double dem = d.system(tau);
    const double prev = t > 0 ? d.system(tau - 1) : dem;
    std::vector<Term> a, b, e, f, g2;
    for (int i = 0; i < ng; ++i) {
      a.push_back({out.p[i][t], 1});
      b.push_back({out.u[i][t], c.units[i].p_max});
      e.push_back({out.u[i][t], c.units[i].p_min});
      f.push_back({out.u[i][t], c.units[i].ramp_up * dt});
      g2.push_back({out.u[i][t], c.units[i].ramp_down * dt});
    }
    m.add_constraint("", a, Sense::kEqual, dem);
    m.add_constraint("", b, Sense::kGreaterEqual, (1 + r_up) * dem);
    m.add_constraint("", e, Sense::kLessEqual, (1 - r_dn) * dem);
    m.add_constraint("", f, Sense::kGreaterEqual, std::max(0.0, dem - prev));
    m.add_constraint("", g2, Sense::kGreaterEqual, std::max(0.0, prev - dem));
    for (int l = 0; l < c.num_lines(); ++l) {
      if (!c.lines[l].monitored()) continue;
      double load = 0;
      for (int j = 0; j < c.num_buses(); ++j) load += ptdf(l, j) * d.at(tau, j);
      std::vector<Term> fl;
      for (int i = 0; i < ng; ++i) fl.push_back({out.p[i][t], ptdf(l, c.units[i].bus)});
      m.add_constraint("", fl, Sense::kLessEqual, c.lines[l].rating + load);
      m.add_constraint("", fl, Sense::kGreaterEqual, -c.lines[l].rating + load);
    }
  }
  for (int i = 0; i < ng; ++i) {
    const auto& g = c.units[i];
    const double u0 = g.init_on ? 1 : 0, p0 = g.init_on ? g.init_power : 0;
    const double ru = g.ramp_up * dt, rd = g.ramp_down * dt;
    const int up_span = std::max(1, static_cast<int>(std::ceil(g.min_up / dt - 1e-9)));
    const int dn_span = std::max(1, static_cast<int>(std::ceil(g.min_down / dt - 1e-9)));
    for (int t = 0; t < nt; ++t) {
      const int u = out.u[i][t], p = out.p[i][t], s = out.s[i][t];
      m.add_constraint("", {{p, 1}, {u, -g.p_min}}, Sense::kGreaterEqual, 0);
      m.add_constraint("", {{p, 1}, {u, -g.p_max}}, Sense::kLessEqual, 0);
      // p_t - p_{t-1} <= ru u_{t-1} + pmin (u_t - u_{t-1}) + pmax (1 - u_t)
      // p_{t-1} - p_t <= rd u_t + pmin (u_{t-1} - u_t) + pmax (1 - u_{t-1})
      if (t == 0) {
        m.add_constraint("", {{p, 1}, {u, g.p_max - g.p_min}}, Sense::kLessEqual,
                         g.p_max + p0 + (ru - g.p_min) * u0);
        m.add_constraint("", {{p, -1}, {u, g.p_min - rd}}, Sense::kLessEqual,
                         g.p_max - p0 - (g.p_max - g.p_min) * u0);
        m.add_constraint("", {{s, 1}, {u, -1}}, Sense::kGreaterEqual, -u0);
      } else {
        const int up = out.u[i][t - 1], pp = out.p[i][t - 1];
        m.add_constraint("", {{p, 1}, {pp, -1}, {u, g.p_max - g.p_min}, {up, g.p_min - ru}},
                         Sense::kLessEqual, g.p_max);
        m.add_constraint("", {{pp, 1}, {p, -1}, {u, g.p_min - rd}, {up, g.p_max - g.p_min}},
                         Sense::kLessEqual, g.p_max);
        m.add_constraint("", {{s, 1}, {u, -1}, {up, 1}}, Sense::kGreaterEqual, 0);
      }
      for (int k = t + 1; k < std::min(nt, t + up_span); ++k) {
        std::vector<Term> r{{out.u[i][k], 1}, {u, -1}};
        if (t > 0) r.push_back({out.u[i][t - 1], 1});
        m.add_constraint("min_time", r, Sense::kGreaterEqual, t > 0 ? 0 : -u0);
      }
      for (int k = t + 1; k < std::min(nt, t + dn_span); ++k) {
        std::vector<Term> r{{out.u[i][k], 1}, {u, -1}};
        if (t > 0) r.push_back({out.u[i][t - 1], 1});
        m.add_constraint("min_time", r, Sense::kLessEqual, t > 0 ? 1 : 1 - u0);
      }
    }
    const double rem = g.init_on ? g.min_up - g.init_duration : g.min_down - g.init_duration;
    if (rem > 0) {
      const int n = std::max(1, static_cast<int>(std::ceil(rem / dt - 1e-9)));
      for (int k = 0; k < std::min(n, nt); ++k) {
        m.add_constraint("", {{out.u[i][k], 1}}, Sense::kEqual, u0);
      }
    }
  }
  return out;
}

// Canonical row form for order-insensitive comparison.
using RowKey = std::tuple<int, long long, std::vector<std::pair<int, long long>>>;

// Rows whose name starts with "min_" are left out when `skip_min_time` is set.
inline std::vector<RowKey> canonical_rows(const ucflex::milp::MilpModel& m,
                                          bool skip_min_time = false) {
  auto q = [](double v) { return std::llround(v * 1e6); };
  std::vector<RowKey> rows;
  for (const auto& c : m.constraints()) {
    if (skip_min_time && c.name.rfind("min_", 0) == 0) continue;
    std::vector<std::pair<int, long long>> terms;
    for (const auto& t : c.terms) terms.push_back({t.var, q(t.coef)});
    rows.emplace_back(static_cast<int>(c.sense), q(c.rhs), std::move(terms));
  }
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace oracle
