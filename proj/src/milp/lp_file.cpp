#include "ucflex/milp/lp_file.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "ucflex/error.hpp"

namespace ucflex::milp {

namespace {

bool lp_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  static const std::string extra = "!\"#$%&()/,.;?@_`'{}|~";
  return extra.find(c) != std::string::npos;
}

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

// Emits "+ 3 x - 2 y" with line breaks to stay under LP line limits.
void write_terms(std::ostream& out, const std::vector<Term>& terms,
                 const std::vector<std::string>& names) {
  int on_line = 0;
  for (const Term& t : terms) {
    if (on_line == 8) {
      out << "\n   ";
      on_line = 0;
    }
    out << (t.coef < 0 ? " - " : " + ") << number(std::abs(t.coef)) << ' '
        << names[t.var];
    ++on_line;
  }
  if (terms.empty()) out << " 0 " << (names.empty() ? "x" : names[0]);
}

}  // namespace

std::string lp_name(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (!lp_char(c)) c = '_';
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0])) || out[0] == '.') {
    out = "_" + out;
  }
  // "e5" would read as an exponent.
  if ((out[0] == 'e' || out[0] == 'E') && out.size() > 1 &&
      std::isdigit(static_cast<unsigned char>(out[1]))) {
    out = "_" + out;
  }
  return out;
}

void write_lp(const MilpModel& model, std::ostream& out) {
  const int n = model.num_variables();
  std::vector<std::string> names(n);
  for (int j = 0; j < n; ++j) {
    names[j] = lp_name(model.variable(j).name.empty() ? "x" + std::to_string(j)
                                                       : model.variable(j).name);
  }
  out << "\\ written by ucflex\n";
  out << "Minimize\n obj:";
  std::vector<Term> obj;
  for (int j = 0; j < n; ++j) {
    if (model.variable(j).cost != 0.0) obj.push_back({j, model.variable(j).cost});
  }
  write_terms(out, obj, names);
  if (model.objective_offset() != 0.0) {
    const double c = model.objective_offset();
    out << (c < 0 ? " - " : " + ") << number(std::abs(c));
  }
  out << "\nSubject To\n";
  for (int i = 0; i < model.num_constraints(); ++i) {
    const Constraint& c = model.constraint(i);
    out << ' ' << lp_name(c.name.empty() ? "c" + std::to_string(i) : c.name) << ':';
    write_terms(out, c.terms, names);
    switch (c.sense) {
      case Sense::kLessEqual: out << " <= "; break;
      case Sense::kGreaterEqual: out << " >= "; break;
      case Sense::kEqual: out << " = "; break;
    }
    out << number(c.rhs) << '\n';
  }
  out << "Bounds\n";
  for (int j = 0; j < n; ++j) {
    const Variable& v = model.variable(j);
    const bool lo = std::isfinite(v.lower), up = std::isfinite(v.upper);
    if (!lo && !up) {
      out << ' ' << names[j] << " free\n";
    } else if (lo && v.lower == v.upper) {
      out << ' ' << names[j] << " = " << number(v.lower) << '\n';
    } else {
      out << ' ' << (lo ? number(v.lower) : "-inf") << " <= " << names[j] << " <= "
          << (up ? number(v.upper) : "+inf") << '\n';
    }
  }
  std::vector<int> binaries, generals;
  for (int j = 0; j < n; ++j) {
    const Variable& v = model.variable(j);
    if (!v.integer) continue;
    (v.lower == 0.0 && v.upper == 1.0 ? binaries : generals).push_back(j);
  }
  if (!binaries.empty()) {
    out << "Binaries\n";
    for (int j : binaries) out << ' ' << names[j] << '\n';
  }
  if (!generals.empty()) {
    out << "General\n";
    for (int j : generals) out << ' ' << names[j] << '\n';
  }
  out << "End\n";
}

void export_lp_file(const MilpModel& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("io.write", "cannot write " + path.string());
  write_lp(model, out);
  if (!out) throw Error("io.write", "failed writing " + path.string());
}

MilpSolution read_solution(const MilpModel& model, std::istream& in) {
  std::unordered_map<std::string, int> index;
  for (int j = 0; j < model.num_variables(); ++j) {
    index.emplace(model.variable(j).name, j);
    index.emplace(lp_name(model.variable(j).name), j);
  }
  std::vector<double> x(model.num_variables(), 0.0);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string name, value, extra;
    if (!(fields >> name)) continue;
    if (!(fields >> value) || (fields >> extra)) {
      throw Error("io.solution_parse",
                  "line " + std::to_string(line_no) + ": expected `name value`");
    }
    auto it = index.find(name);
    if (it == index.end()) {
      throw Error("io.solution_parse",
                  "line " + std::to_string(line_no) + ": unknown variable " + name);
    }
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw Error("io.solution_parse",
                  "line " + std::to_string(line_no) + ": bad value " + value);
    }
    x[it->second] = v;
  }
  const auto worst = model.max_violation(x);
  if (worst.amount > kFeasibilityTol) {
    std::ostringstream msg;
    msg << worst.what << " violated by " << worst.amount;
    throw Error("io.solution_infeasible", msg.str());
  }
  MilpSolution sol;
  sol.status = Status::kOptimal;
  sol.objective = model.objective_value(x);
  sol.bound = sol.objective;
  sol.gap = 0.0;
  sol.values = std::move(x);
  return sol;
}

MilpSolution import_solution_file(const MilpModel& model,
                                  const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io.solution_parse", "cannot read " + path.string());
  return read_solution(model, in);
}

}  // namespace ucflex::milp
