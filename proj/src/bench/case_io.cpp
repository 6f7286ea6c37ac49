#include "ucflex/bench/case_io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

#include "ucflex/error.hpp"

namespace ucflex::bench {

using powersys::Line;
using powersys::NetworkCase;
using powersys::ThermalUnit;

namespace {

struct SourceLine {
  int number = 0;
  std::vector<std::string> tokens;
};

std::string where(const std::string& source, int line) {
  return source + ":" + std::to_string(line);
}

[[noreturn]] void fail(const char* code, const std::string& source, int line,
                       const std::string& what) {
  throw Error(code, where(source, line) + ": " + what);
}

std::vector<std::string> split(const std::string& text, const char* separators) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = text.find_first_not_of(separators, i);
    if (start == std::string::npos) break;
    const std::size_t end = text.find_first_of(separators, start);
    out.push_back(text.substr(start, end - start));
    i = end == std::string::npos ? text.size() : end;
  }
  return out;
}

std::vector<SourceLine> tokenize(std::istream& in, char comment) {
  std::vector<SourceLine> out;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (const auto pos = raw.find(comment); pos != std::string::npos) raw.erase(pos);
    auto tokens = split(raw, " \t\r");
    if (!tokens.empty()) out.push_back({number, std::move(tokens)});
  }
  return out;
}

double number(const std::string& token, const std::string& source, int line) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = first + token.size();
  if (!token.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    fail("ingest.parse", source, line, "expected a number, found '" + token + "'");
  }
  return v;
}

bool on_off(const std::string& token, const std::string& source, int line) {
  if (token == "on" || token == "1") return true;
  if (token == "off" || token == "0") return false;
  fail("ingest.parse", source, line, "expected on or off, found '" + token + "'");
}

// Validates and, on failure, points at the source line of the offending
// element when it is known.
void validate_with_lines(const NetworkCase& c, const std::string& source,
                         const std::vector<int>& bus_lines, const std::vector<int>& line_lines,
                         const std::vector<int>& unit_lines) {
  const auto problems = powersys::validate_case(c);
  if (problems.empty()) return;
  const auto& v = problems.front();
  const std::vector<int>* lines = nullptr;
  if (v.code.rfind("bus.", 0) == 0) lines = &bus_lines;
  if (v.code.rfind("line.", 0) == 0) lines = &line_lines;
  if (v.code.rfind("unit.", 0) == 0) lines = &unit_lines;
  if (lines && v.index >= 0 && v.index < static_cast<int>(lines->size())) {
    throw Error(v.code, where(source, (*lines)[v.index]) + ": " + v.message);
  }
  throw Error(v.code, source + ": " + v.message);
}

std::string format(double v) {
  std::ostringstream s;
  s << std::setprecision(15) << v;
  return s.str();
}

}  // namespace

NetworkCase parse_case(std::istream& in, const std::string& source) {
  const auto lines = tokenize(in, '#');
  if (lines.empty() || lines[0].tokens[0] != "ucflex-case") {
    fail("ingest.version", source, lines.empty() ? 1 : lines[0].number,
         "missing 'ucflex-case 1' header");
  }
  if (lines[0].tokens.size() != 2 || lines[0].tokens[1] != "1") {
    fail("ingest.version", source, lines[0].number, "unsupported case format version");
  }

  NetworkCase c;
  std::map<std::string, int> bus_index;
  std::vector<int> bus_lines, line_lines, unit_lines;
  std::string reference;
  int reference_line = 0;
  std::string section;
  auto bus_of = [&](const std::string& label, int line) {
    auto it = bus_index.find(label);
    if (it == bus_index.end()) fail("ingest.unknown_bus", source, line, "unknown bus '" + label + "'");
    return it->second;
  };

  // Buses may be listed after the elements referring to them.
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& t = lines[k].tokens;
    if (t[0].front() == '[') {
      section = t[0];
      continue;
    }
    if (section != "[buses]") continue;
    if (t.size() != 1) fail("ingest.parse", source, lines[k].number, "a bus line holds one label");
    if (!bus_index.emplace(t[0], c.num_buses()).second) {
      fail("ingest.duplicate", source, lines[k].number, "bus '" + t[0] + "' listed twice");
    }
    c.buses.push_back({c.num_buses(), t[0]});
    bus_lines.push_back(lines[k].number);
  }

  section.clear();
  std::map<std::string, int> names;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto& t = lines[k].tokens;
    const int ln = lines[k].number;
    if (t[0].front() == '[') {
      if (t[0] != "[buses]" && t[0] != "[lines]" && t[0] != "[units]") {
        fail("ingest.parse", source, ln, "unknown section " + t[0]);
      }
      section = t[0];
      continue;
    }
    if (section.empty()) {
      if (t[0] == "name" && t.size() >= 2) {
        c.name = t[1];
      } else if (t[0] == "reference" && t.size() == 2) {
        reference = t[1];
        reference_line = ln;
      } else {
        fail("ingest.parse", source, ln, "unexpected '" + t[0] + "' before the first section");
      }
    } else if (section == "[lines]") {
      if (t.size() != 5) fail("ingest.parse", source, ln, "a line needs 5 fields");
      if (!names.emplace("line " + t[0], ln).second) {
        fail("ingest.duplicate", source, ln, "line '" + t[0] + "' listed twice");
      }
      Line l;
      l.id = c.num_lines();
      l.name = t[0];
      l.from_bus = bus_of(t[1], ln);
      l.to_bus = bus_of(t[2], ln);
      l.reactance = number(t[3], source, ln);
      l.rating = number(t[4], source, ln);
      c.lines.push_back(l);
      line_lines.push_back(ln);
    } else if (section == "[units]") {
      if (t.size() != 14) fail("ingest.parse", source, ln, "a unit needs 14 fields");
      if (!names.emplace("unit " + t[0], ln).second) {
        fail("ingest.duplicate", source, ln, "unit '" + t[0] + "' listed twice");
      }
      ThermalUnit u;
      u.id = c.num_units();
      u.name = t[0];
      u.bus = bus_of(t[1], ln);
      double* fields[] = {&u.p_min, &u.p_max, &u.ramp_up, &u.ramp_down, &u.min_up,
                          &u.min_down, &u.cost_linear, &u.cost_noload, &u.cost_startup};
      for (int f = 0; f < 9; ++f) *fields[f] = number(t[2 + f], source, ln);
      u.init_on = on_off(t[11], source, ln);
      u.init_power = number(t[12], source, ln);
      u.init_duration = number(t[13], source, ln);
      c.units.push_back(u);
      unit_lines.push_back(ln);
    }
  }
  if (!reference.empty()) {
    c.reference_bus = bus_of(reference, reference_line);
  }
  validate_with_lines(c, source, bus_lines, line_lines, unit_lines);
  return c;
}

NetworkCase read_case(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("io.read", "cannot open " + path);
  return parse_case(in, path);
}

void write_case(std::ostream& out, const NetworkCase& c) {
  auto label = [&](int b) { return c.buses[b].name.empty() ? std::to_string(b) : c.buses[b].name; };
  out << "ucflex-case 1\n";
  if (!c.name.empty()) out << "name " << c.name << "\n";
  out << "reference " << label(c.reference_bus) << "\n\n[buses]\n";
  for (int b = 0; b < c.num_buses(); ++b) out << label(b) << "\n";
  out << "\n[lines]\n# name from to reactance rating\n";
  for (int l = 0; l < c.num_lines(); ++l) {
    const Line& x = c.lines[l];
    out << (x.name.empty() ? "L" + std::to_string(l) : x.name) << ' ' << label(x.from_bus) << ' '
        << label(x.to_bus) << ' ' << format(x.reactance) << ' ' << format(x.rating) << "\n";
  }
  out << "\n[units]\n# name bus p_min p_max ramp_up ramp_down min_up min_down cost no_load"
         " start_up init init_mw init_h\n";
  for (int i = 0; i < c.num_units(); ++i) {
    const ThermalUnit& u = c.units[i];
    out << (u.name.empty() ? "G" + std::to_string(i) : u.name) << ' ' << label(u.bus);
    for (double v : {u.p_min, u.p_max, u.ramp_up, u.ramp_down, u.min_up, u.min_down,
                     u.cost_linear, u.cost_noload, u.cost_startup}) {
      out << ' ' << format(v);
    }
    out << ' ' << (u.init_on ? "on" : "off") << ' ' << format(u.init_power) << ' '
        << format(u.init_duration) << "\n";
  }
}

namespace {

struct MatrixBlock {
  int line = 0;
  std::vector<std::vector<double>> rows;
  std::vector<int> row_lines;
};

// Collects every "mpc.<name> = [ ... ];" table.
std::map<std::string, MatrixBlock> matpower_tables(std::istream& in, const std::string& source) {
  std::map<std::string, MatrixBlock> out;
  std::string raw;
  int number_ = 0;
  MatrixBlock* open = nullptr;
  while (std::getline(in, raw)) {
    ++number_;
    if (const auto pos = raw.find('%'); pos != std::string::npos) raw.erase(pos);
    std::string body = raw;
    if (!open) {
      const auto eq = raw.find('=');
      const auto bracket = raw.find('[');
      if (eq == std::string::npos || bracket == std::string::npos || bracket < eq) continue;
      auto name = split(raw.substr(0, eq), " \t");
      if (name.size() != 1 || name[0].rfind("mpc.", 0) != 0) continue;
      open = &out[name[0].substr(4)];
      open->line = number_;
      body = raw.substr(bracket + 1);
    }
    const auto close = body.find(']');
    const std::string content = close == std::string::npos ? body : body.substr(0, close);
    for (const auto& row : split(content, ";")) {
      auto tokens = split(row, " \t\r,");
      if (tokens.empty()) continue;
      std::vector<double> values;
      for (const auto& t : tokens) values.push_back(number(t, source, number_));
      open->rows.push_back(std::move(values));
      open->row_lines.push_back(number_);
    }
    if (close != std::string::npos) open = nullptr;
  }
  if (open) fail("ingest.parse", source, open->line, "unterminated table");
  return out;
}

}  // namespace

NetworkCase parse_matpower(std::istream& mpc, const std::string& mpc_source,
                           std::istream& sidecar, const std::string& sidecar_source) {
  auto tables = matpower_tables(mpc, mpc_source);
  for (const char* need : {"bus", "branch", "gen"}) {
    if (!tables.count(need)) {
      fail("ingest.parse", mpc_source, 1, std::string("missing mpc.") + need + " table");
    }
  }
  NetworkCase c;
  c.name = std::filesystem::path(mpc_source).stem().string();
  std::map<long long, int> bus_index;
  std::vector<int> bus_lines, line_lines, unit_lines;
  const auto& bus = tables["bus"];
  for (std::size_t r = 0; r < bus.rows.size(); ++r) {
    const auto& row = bus.rows[r];
    if (row.size() < 2) fail("ingest.parse", mpc_source, bus.row_lines[r], "short bus row");
    const auto id = static_cast<long long>(row[0]);
    if (!bus_index.emplace(id, c.num_buses()).second) {
      fail("ingest.duplicate", mpc_source, bus.row_lines[r], "bus " + std::to_string(id) + " listed twice");
    }
    if (static_cast<int>(row[1]) == 3) c.reference_bus = c.num_buses();
    c.buses.push_back({c.num_buses(), std::to_string(id)});
    bus_lines.push_back(bus.row_lines[r]);
  }
  auto bus_of = [&](double id, const std::string& source, int line) {
    auto it = bus_index.find(static_cast<long long>(id));
    if (it == bus_index.end()) {
      fail("ingest.unknown_bus", source, line, "unknown bus " + format(id));
    }
    return it->second;
  };

  const auto& branch = tables["branch"];
  for (std::size_t r = 0; r < branch.rows.size(); ++r) {
    const auto& row = branch.rows[r];
    const int ln = branch.row_lines[r];
    if (row.size() < 6) fail("ingest.parse", mpc_source, ln, "short branch row");
    if (row.size() > 10 && row[10] == 0.0) continue;
    Line l;
    l.id = c.num_lines();
    l.name = "L" + std::to_string(r + 1);
    l.from_bus = bus_of(row[0], mpc_source, ln);
    l.to_bus = bus_of(row[1], mpc_source, ln);
    l.reactance = row[3];
    l.rating = row[5];
    c.lines.push_back(l);
    line_lines.push_back(ln);
  }

  const auto& gen = tables["gen"];
  const MatrixBlock* gencost = tables.count("gencost") ? &tables["gencost"] : nullptr;
  std::vector<int> gen_unit(gen.rows.size(), -1);
  for (std::size_t r = 0; r < gen.rows.size(); ++r) {
    const auto& row = gen.rows[r];
    const int ln = gen.row_lines[r];
    if (row.size() < 10) fail("ingest.parse", mpc_source, ln, "short gen row");
    if (row[7] <= 0.0) continue;
    ThermalUnit u;
    u.id = c.num_units();
    u.name = "G" + std::to_string(r + 1);
    u.bus = bus_of(row[0], mpc_source, ln);
    u.p_max = row[8];
    u.p_min = row[9];
    if (gencost && r < gencost->rows.size()) {
      const auto& cost = gencost->rows[r];
      const int cl = gencost->row_lines[r];
      if (cost.size() < 4 || cost[0] != 2.0) {
        fail("ingest.parse", mpc_source, cl, "only polynomial gencost rows are supported");
      }
      const int n = static_cast<int>(cost[3]);
      if (n < 1 || n > 3 || static_cast<int>(cost.size()) < 4 + n) {
        fail("ingest.parse", mpc_source, cl, "polynomial gencost of degree above 2");
      }
      u.cost_startup = cost[1];
      // Coefficients are listed highest degree first; a quadratic term is
      // replaced by its secant over [p_min, p_max].
      const double c0 = cost[3 + n];
      const double c1 = n >= 2 ? cost[2 + n] : 0.0;
      const double c2 = n == 3 ? cost[4] : 0.0;
      u.cost_noload = c0 - c2 * u.p_min * u.p_max;
      u.cost_linear = c1 + c2 * (u.p_min + u.p_max);
    }
    gen_unit[r] = c.num_units();
    c.units.push_back(u);
    unit_lines.push_back(ln);
  }

  const auto side = tokenize(sidecar, '#');
  if (side.empty() || side[0].tokens.size() != 2 || side[0].tokens[0] != "ucflex-sidecar" ||
      side[0].tokens[1] != "1") {
    fail("ingest.version", sidecar_source, side.empty() ? 1 : side[0].number,
         "missing 'ucflex-sidecar 1' header");
  }
  std::vector<char> seen(c.units.size(), 0);
  for (std::size_t k = 1; k < side.size(); ++k) {
    const auto& t = side[k].tokens;
    const int ln = side[k].number;
    if (t.size() != 8 && t.size() != 11) {
      fail("ingest.parse", sidecar_source, ln, "a sidecar row needs 8 or 11 fields");
    }
    const double row = number(t[0], sidecar_source, ln);
    if (row < 1 || row > static_cast<double>(gen.rows.size()) || row != std::floor(row)) {
      fail("ingest.parse", sidecar_source, ln, "no gen row " + t[0]);
    }
    const int unit = gen_unit[static_cast<int>(row) - 1];
    if (unit < 0) continue;  // generator out of service
    if (seen[unit]) fail("ingest.duplicate", sidecar_source, ln, "gen row " + t[0] + " listed twice");
    seen[unit] = 1;
    ThermalUnit& u = c.units[unit];
    u.ramp_up = number(t[1], sidecar_source, ln);
    u.ramp_down = number(t[2], sidecar_source, ln);
    u.min_up = number(t[3], sidecar_source, ln);
    u.min_down = number(t[4], sidecar_source, ln);
    u.init_on = on_off(t[5], sidecar_source, ln);
    u.init_power = number(t[6], sidecar_source, ln);
    u.init_duration = number(t[7], sidecar_source, ln);
    if (t.size() == 11) {
      u.cost_linear = number(t[8], sidecar_source, ln);
      u.cost_noload = number(t[9], sidecar_source, ln);
      u.cost_startup = number(t[10], sidecar_source, ln);
    }
  }
  for (std::size_t i = 0; i < seen.size(); ++i) {
    if (!seen[i]) {
      throw Error("ingest.sidecar", sidecar_source + ": no entry for " + c.units[i].name);
    }
  }
  validate_with_lines(c, mpc_source, bus_lines, line_lines, unit_lines);
  return c;
}

NetworkCase read_matpower(const std::string& mpc_path, const std::string& sidecar_path) {
  std::ifstream mpc(mpc_path);
  if (!mpc) throw Error("io.read", "cannot open " + mpc_path);
  std::ifstream side(sidecar_path);
  if (!side) throw Error("io.read", "cannot open " + sidecar_path);
  return parse_matpower(mpc, mpc_path, side, sidecar_path);
}

demand::DemandSeries parse_demand(std::istream& in, const std::string& source,
                                  const NetworkCase& c) {
  std::map<std::string, int> bus_index;
  for (int b = 0; b < c.num_buses(); ++b) {
    bus_index[c.buses[b].name.empty() ? std::to_string(b) : c.buses[b].name] = b;
  }
  double step = 1.0;
  std::vector<int> columns;  // column -> bus, -1 to skip
  int header_line = 0;
  std::vector<std::vector<double>> rows;
  std::string raw;
  int number_ = 0;
  while (std::getline(in, raw)) {
    ++number_;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    if (const auto pos = raw.find('#'); pos != std::string::npos) {
      const auto fields = split(raw.substr(pos + 1), " \t:");
      if (fields.size() == 2 && fields[0] == "step_hours") {
        step = number(fields[1], source, number_);
      }
      raw.erase(pos);
    }
    const auto cells = split(raw, ", \t;");
    if (cells.empty()) continue;
    if (!header_line) {
      header_line = number_;
      std::map<int, int> used;
      for (std::size_t k = 0; k < cells.size(); ++k) {
        if (k == 0 && cells[k] == "period") {
          columns.push_back(-1);
          continue;
        }
        auto it = bus_index.find(cells[k]);
        if (it == bus_index.end()) {
          fail("ingest.unknown_bus", source, number_, "demand column '" + cells[k] + "' names no bus");
        }
        if (used[it->second]++) {
          fail("ingest.duplicate", source, number_, "bus '" + cells[k] + "' has two columns");
        }
        columns.push_back(it->second);
      }
      continue;
    }
    if (cells.size() != columns.size()) {
      fail("ingest.parse", source, number_,
           "expected " + std::to_string(columns.size()) + " values, found " +
               std::to_string(cells.size()));
    }
    std::vector<double> row(c.num_buses(), 0.0);
    for (std::size_t k = 0; k < cells.size(); ++k) {
      const double v = number(cells[k], source, number_);
      if (columns[k] >= 0) row[columns[k]] = v;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("demand.invalid", source + ": no demand rows");
  if (!(step > 0.0)) throw Error("demand.invalid", source + ": step_hours must be positive");
  auto d = demand::DemandSeries::from_rows(rows, step);
  d.validate();
  return d;
}

demand::DemandSeries read_demand(const std::string& path, const NetworkCase& c) {
  std::ifstream in(path);
  if (!in) throw Error("io.read", "cannot open " + path);
  return parse_demand(in, path, c);
}

void write_demand(std::ostream& out, const demand::DemandSeries& d, const NetworkCase& c) {
  out << "# step_hours: " << format(d.step_hours()) << "\nperiod";
  std::vector<int> used;
  for (int b = 0; b < c.num_buses(); ++b) {
    bool any = false;
    for (int t = 1; t <= d.periods() && !any; ++t) any = d.at(t, b) != 0.0;
    if (any) used.push_back(b);
  }
  for (int b : used) out << ',' << (c.buses[b].name.empty() ? std::to_string(b) : c.buses[b].name);
  out << "\n";
  for (int t = 1; t <= d.periods(); ++t) {
    out << t;
    for (int b : used) out << ',' << format(d.at(t, b));
    out << "\n";
  }
}

LoadedCase load_case(const std::string& case_path, const std::string& demand_path,
                     const std::string& sidecar_path) {
  LoadedCase out;
  const bool matpower = case_path.size() > 2 && case_path.substr(case_path.size() - 2) == ".m";
  if (matpower) {
    if (sidecar_path.empty()) {
      throw Error("ingest.sidecar", case_path + ": a MATPOWER case needs a sidecar file");
    }
    out.network = read_matpower(case_path, sidecar_path);
  } else {
    out.network = read_case(case_path);
  }
  out.demand = read_demand(demand_path, out.network);
  return out;
}

}  // namespace ucflex::bench
