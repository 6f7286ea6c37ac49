#pragma once

#include <span>
#include <string>
#include <vector>

namespace ucflex::powersys {

struct Bus {
  int id = 0;
  std::string name;
};

// rating <= 0 marks an unmonitored line: it carries flow but is never
// constrained or flagged as congested.
struct Line {
  int id = 0;
  std::string name;
  int from_bus = 0;
  int to_bus = 0;
  double reactance = 0.0;  // per unit
  double rating = 0.0;     // MW

  bool monitored() const { return rating > 0.0; }
};

struct ThermalUnit {
  int id = 0;
  std::string name;
  int bus = 0;
  double p_min = 0.0;      // MW
  double p_max = 0.0;      // MW
  double ramp_up = 0.0;    // MW/h
  double ramp_down = 0.0;  // MW/h
  double min_up = 0.0;     // h
  double min_down = 0.0;   // h
  double cost_linear = 0.0;   // $/MWh
  double cost_noload = 0.0;   // $/h while committed
  double cost_startup = 0.0;  // $ per start
  bool init_on = false;
  double init_power = 0.0;     // MW
  double init_duration = 0.0;  // h already spent in the initial state

  double range() const { return p_max - p_min; }
};

struct NetworkCase {
  std::string name;
  std::vector<Bus> buses;
  std::vector<Line> lines;
  std::vector<ThermalUnit> units;
  int reference_bus = 0;

  int num_buses() const { return static_cast<int>(buses.size()); }
  int num_lines() const { return static_cast<int>(lines.size()); }
  int num_units() const { return static_cast<int>(units.size()); }
};

struct CaseViolation {
  std::string code;  // e.g. "unit.range"
  std::string message;
  int index = -1;  // offending bus, line or unit (see the code prefix)
};

std::vector<CaseViolation> validate_case(const NetworkCase& c);

// Throws Error carrying the code and message of the first violation.
void require_valid(const NetworkCase& c);

bool is_connected(const NetworkCase& c);

// Line-by-bus DC sensitivities: flow on line l (from -> to) per MW injected
// at bus j and withdrawn at the reference bus.
class PtdfMatrix {
 public:
  PtdfMatrix() = default;
  PtdfMatrix(int lines, int buses, int reference_bus)
      : lines_(lines), buses_(buses), reference_(reference_bus),
        values_(static_cast<std::size_t>(lines) * buses, 0.0) {}

  int num_lines() const { return lines_; }
  int num_buses() const { return buses_; }
  int reference_bus() const { return reference_; }

  double operator()(int line, int bus) const {
    return values_[static_cast<std::size_t>(line) * buses_ + bus];
  }
  double& operator()(int line, int bus) {
    return values_[static_cast<std::size_t>(line) * buses_ + bus];
  }
  std::span<const double> row(int line) const {
    return {values_.data() + static_cast<std::size_t>(line) * buses_,
            static_cast<std::size_t>(buses_)};
  }

  // Line flows for a nodal injection vector (balanced by the reference bus).
  std::vector<double> flows(std::span<const double> injection) const;

 private:
  int lines_ = 0;
  int buses_ = 0;
  int reference_ = 0;
  std::vector<double> values_;
};

// Throws Error("network.disconnected") when the reduced susceptance matrix is
// singular.
PtdfMatrix compute_ptdf(const NetworkCase& c);

// Units grouped by the sign of their sensitivity on one line. With
// direction = -1 the line is viewed in its reverse orientation.
struct UnitSplit {
  std::vector<int> plus;
  std::vector<int> minus;
  double ptdf_plus = 0.0;   // range-weighted average over `plus`
  double ptdf_minus = 0.0;  // range-weighted average over `minus`
  double eta_plus = 0.0;    // share of the fleet's total output range
  double eta_minus = 0.0;

  bool plus_empty() const { return plus.empty(); }
  bool minus_empty() const { return minus.empty(); }
};

UnitSplit classify_units(const PtdfMatrix& ptdf,
                         const std::vector<ThermalUnit>& units, int line,
                         double epsilon = 1e-6, int direction = 1);

}  // namespace ucflex::powersys
