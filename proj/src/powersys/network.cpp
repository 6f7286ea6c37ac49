#include "ucflex/powersys/network.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <queue>
#include <sstream>

#include "ucflex/error.hpp"

namespace ucflex::powersys {

namespace {

std::string describe(const char* kind, int index, const std::string& name) {
  std::ostringstream s;
  s << kind << ' ' << index;
  if (!name.empty()) s << " (" << name << ')';
  return s.str();
}

}  // namespace

bool is_connected(const NetworkCase& c) {
  const int nb = c.num_buses();
  if (nb == 0) return true;
  std::vector<std::vector<int>> adj(nb);
  for (const Line& l : c.lines) {
    if (l.from_bus < 0 || l.from_bus >= nb || l.to_bus < 0 || l.to_bus >= nb) continue;
    adj[l.from_bus].push_back(l.to_bus);
    adj[l.to_bus].push_back(l.from_bus);
  }
  std::vector<char> seen(nb, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    const int b = q.front();
    q.pop();
    for (int n : adj[b]) {
      if (!seen[n]) {
        seen[n] = 1;
        ++count;
        q.push(n);
      }
    }
  }
  return count == nb;
}

std::vector<CaseViolation> validate_case(const NetworkCase& c) {
  std::vector<CaseViolation> out;
  auto add = [&](const char* code, std::string msg, int index = -1) {
    out.push_back({code, std::move(msg), index});
  };
  const int nb = c.num_buses();
  if (nb == 0) add("case.empty", "case has no buses");
  for (int b = 0; b < nb; ++b) {
    if (c.buses[b].id != b) {
      add("bus.id", describe("bus", b, c.buses[b].name) + " has id " +
                        std::to_string(c.buses[b].id) + ", expected dense index",
          b);
    }
  }
  if (nb > 0 && (c.reference_bus < 0 || c.reference_bus >= nb)) {
    add("case.reference_bus", "reference bus " + std::to_string(c.reference_bus) +
                                  " out of range");
  }
  auto valid_bus = [&](int b) { return b >= 0 && b < nb; };
  for (int l = 0; l < c.num_lines(); ++l) {
    const Line& ln = c.lines[l];
    const std::string who = describe("line", l, ln.name);
    if (!valid_bus(ln.from_bus) || !valid_bus(ln.to_bus)) {
      add("line.bus", who + " references an unknown bus", l);
    } else if (ln.from_bus == ln.to_bus) {
      add("line.endpoints", who + " connects bus " + std::to_string(ln.from_bus) +
                                " to itself",
          l);
    }
    if (!(ln.reactance > 0.0) || !std::isfinite(ln.reactance)) {
      add("line.reactance", who + " needs a positive reactance", l);
    }
    if (std::isnan(ln.rating) || ln.rating < 0.0) {
      add("line.rating", who + " has a negative rating", l);
    }
  }
  for (int i = 0; i < c.num_units(); ++i) {
    const ThermalUnit& u = c.units[i];
    const std::string who = describe("unit", i, u.name);
    if (!valid_bus(u.bus)) add("unit.bus", who + " references an unknown bus", i);
    if (!(u.p_min >= 0.0) || !(u.p_min <= u.p_max) || !std::isfinite(u.p_max)) {
      add("unit.range", who + " needs 0 <= p_min <= p_max", i);
    }
    if (!(u.ramp_up > 0.0) || !(u.ramp_down > 0.0)) {
      add("unit.ramp", who + " needs positive ramp rates", i);
    }
    if (!(u.min_up >= 0.0) || !(u.min_down >= 0.0)) {
      add("unit.min_time", who + " has a negative minimum up/down time", i);
    }
    if (!std::isfinite(u.cost_linear) || !std::isfinite(u.cost_noload) ||
        !std::isfinite(u.cost_startup)) {
      add("unit.cost", who + " has a non-finite cost", i);
    }
    if (!(u.init_duration >= 0.0)) {
      add("unit.initial", who + " has a negative initial duration", i);
    }
    if (u.init_on && !(u.init_power >= u.p_min - 1e-9 && u.init_power <= u.p_max + 1e-9)) {
      add("unit.initial", who + " is initially on outside [p_min, p_max]", i);
    }
    if (!u.init_on && u.init_power != 0.0) {
      add("unit.initial", who + " is initially off with nonzero output", i);
    }
  }
  if (nb > 0 && !is_connected(c)) {
    add("network.disconnected", "network graph is not connected");
  }
  return out;
}

void require_valid(const NetworkCase& c) {
  auto v = validate_case(c);
  if (!v.empty()) {
    std::string msg = v.front().message;
    if (v.size() > 1) msg += " (and " + std::to_string(v.size() - 1) + " more)";
    throw Error(v.front().code, msg);
  }
}

std::vector<double> PtdfMatrix::flows(std::span<const double> injection) const {
  std::vector<double> f(lines_, 0.0);
  for (int l = 0; l < lines_; ++l) {
    const auto r = row(l);
    double s = 0.0;
    for (int j = 0; j < buses_; ++j) s += r[j] * injection[j];
    f[l] = s;
  }
  return f;
}

PtdfMatrix compute_ptdf(const NetworkCase& c) {
  const int nb = c.num_buses();
  const int nl = c.num_lines();
  const int ref = c.reference_bus;
  PtdfMatrix ptdf(nl, nb, ref);
  if (nb <= 1 || nl == 0) {
    if (nb > 1) throw Error("network.disconnected", "network has no lines");
    return ptdf;
  }
  if (!is_connected(c)) {
    throw Error("network.disconnected", "network graph is not connected");
  }
  // Reduced index: buses other than the reference.
  std::vector<int> red(nb, -1);
  int n = 0;
  for (int b = 0; b < nb; ++b) {
    if (b != ref) red[b] = n++;
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (const Line& l : c.lines) {
    const double y = 1.0 / l.reactance;
    const int f = red[l.from_bus], t = red[l.to_bus];
    if (f >= 0) trip.emplace_back(f, f, y);
    if (t >= 0) trip.emplace_back(t, t, y);
    if (f >= 0 && t >= 0) {
      trip.emplace_back(f, t, -y);
      trip.emplace_back(t, f, -y);
    }
  }
  Eigen::SparseMatrix<double> bred(n, n);
  bred.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(bred);
  if (ldlt.info() != Eigen::Success) {
    throw Error("network.disconnected", "reduced susceptance matrix is singular");
  }
  const double scale = bred.diagonal().cwiseAbs().maxCoeff();
  if (ldlt.vectorD().minCoeff() <= 1e-12 * scale) {
    throw Error("network.disconnected", "reduced susceptance matrix is singular");
  }
  // Row l of the PTDF is B_red^{-1} (e_from - e_to) / x_l, by symmetry.
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(n, nl);
  for (int l = 0; l < nl; ++l) {
    const Line& ln = c.lines[l];
    const double y = 1.0 / ln.reactance;
    if (red[ln.from_bus] >= 0) rhs(red[ln.from_bus], l) += y;
    if (red[ln.to_bus] >= 0) rhs(red[ln.to_bus], l) -= y;
  }
  const Eigen::MatrixXd sol = ldlt.solve(rhs);
  for (int l = 0; l < nl; ++l) {
    for (int b = 0; b < nb; ++b) {
      if (red[b] >= 0) ptdf(l, b) = sol(red[b], l);
    }
  }
  return ptdf;
}

UnitSplit classify_units(const PtdfMatrix& ptdf, const std::vector<ThermalUnit>& units,
                         int line, double epsilon, int direction) {
  UnitSplit s;
  double total = 0.0, range_plus = 0.0, range_minus = 0.0;
  for (int i = 0; i < static_cast<int>(units.size()); ++i) {
    const ThermalUnit& u = units[i];
    const double r = u.range();
    total += r;
    const double t = direction * ptdf(line, u.bus);
    if (t > epsilon) {
      s.plus.push_back(i);
      s.ptdf_plus += t * r;
      range_plus += r;
    } else if (t < -epsilon) {
      s.minus.push_back(i);
      s.ptdf_minus += t * r;
      range_minus += r;
    }
  }
  // Zero-range groups fall back to a plain average so the value stays within
  // the group's sensitivities.
  auto average = [&](const std::vector<int>& g, double weighted, double range) {
    if (g.empty()) return 0.0;
    if (range > 0.0) return weighted / range;
    double sum = 0.0;
    for (int i : g) sum += direction * ptdf(line, units[i].bus);
    return sum / static_cast<double>(g.size());
  };
  s.ptdf_plus = average(s.plus, s.ptdf_plus, range_plus);
  s.ptdf_minus = average(s.minus, s.ptdf_minus, range_minus);
  if (total > 0.0) {
    s.eta_plus = range_plus / total;
    s.eta_minus = range_minus / total;
  }
  return s;
}

}  // namespace ucflex::powersys
