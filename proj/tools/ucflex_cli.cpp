// Command line front end: validate, resolve, solve, export, bench, sweep.
#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ucflex/bench/bench.hpp"
#include "ucflex/error.hpp"
#include "ucflex/milp/lp_file.hpp"
#include "ucflex/uc/ncuc.hpp"

using namespace ucflex;

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kInfeasible = 3, kTimeLimit = 4 };

int exit_code_for(const std::string& code) {
  if (code == "milp.time_limit") return kTimeLimit;
  if (code == "dispatch.case_infeasible" || code == "uc.capacity_shortfall" ||
      code == "resolution.relaxation_infeasible") {
    return kInfeasible;
  }
  if (code.rfind("io.", 0) == 0 || code.rfind("lp.", 0) == 0 || code == "dispatch.lp") {
    return kUsage;
  }
  return kValidation;
}

struct Options {
  std::string case_path, demand_path, sidecar;
  std::vector<std::string> methods;
  std::vector<int> periods;
  bench::RunConfig config;
  double time_limit = -1.0;
  std::string out, format = "json";
  int jobs = 1;
};

void add_case_flags(CLI::App* app, Options& o) {
  app->add_option("--case", o.case_path, "case file (native or MATPOWER .m)")->required();
  app->add_option("--demand", o.demand_path, "demand table")->required();
  app->add_option("--sidecar", o.sidecar, "unit data for a MATPOWER case");
}

void add_run_flags(CLI::App* app, Options& o) {
  app->add_option("--gap", o.config.gap, "relative MIP gap")->capture_default_str();
  app->add_option("--theta", o.config.theta, "congestion flag threshold, fraction of rating")
      ->capture_default_str();
  app->add_option("--reserve-up", o.config.reserve_up, "up-reserve ratio")
      ->capture_default_str();
  app->add_option("--reserve-down", o.config.reserve_down, "down-reserve ratio")
      ->capture_default_str();
  app->add_option("--time-limit", o.time_limit, "seconds per MILP solve");
  app->add_option("--seed", o.config.seed, "recorded in the report")->capture_default_str();
  app->add_option("--out", o.out, "output file (default stdout)");
  app->add_option("--format", o.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
}

std::ostream& open_out(const Options& o, std::ofstream& file) {
  if (o.out.empty()) return std::cout;
  file.open(o.out);
  if (!file) throw Error("io.write", "cannot open " + o.out);
  return file;
}

int status_exit(const bench::Report& rep) {
  for (const auto& r : rep.runs) {
    if (r.status == milp::Status::kTimeLimit) return kTimeLimit;
  }
  return kOk;
}

int cmd_validate(const Options& o) {
  const bench::LoadedCase lc = bench::load_case(o.case_path, o.demand_path, o.sidecar);
  std::cout << "case " << lc.network.name << ": " << lc.network.num_buses() << " buses, "
            << lc.network.num_lines() << " lines, " << lc.network.num_units() << " units, "
            << lc.demand.periods() << " periods of " << lc.demand.step_hours() << " h, peak "
            << lc.demand.peak() << " MW\n";
  return kOk;
}

int cmd_resolve(const Options& o) {
  const bench::LoadedCase lc = bench::load_case(o.case_path, o.demand_path, o.sidecar);
  const bench::Method m = bench::parse_method(o.methods.front());
  const int horizon = lc.demand.periods();
  const demand::Partition p =
      bench::determine_partition(lc, m, o.periods.empty() ? horizon : o.periods.front(), o.config);
  const auto durations = p.durations(horizon);
  std::ofstream file;
  std::ostream& out = open_out(o, file);
  if (o.format == "csv") {
    out << "window,first,last,duration\n";
    for (int t = 0; t < p.size(); ++t) {
      out << t + 1 << ',' << p.first(t) << ',' << p.last(t, horizon) << ',' << durations[t]
          << '\n';
    }
  } else {
    nlohmann::json j = {{"method", bench::to_string(m)},
                        {"windows", p.size()},
                        {"starts", p.starts},
                        {"durations", durations}};
    out << j.dump(2) << '\n';
  }
  return kOk;
}

int emit(const Options& o, const bench::Report& rep) {
  std::ofstream file;
  std::ostream& out = open_out(o, file);
  bench::emit_report(out, rep, bench::parse_format(o.format));
  return status_exit(rep);
}

int cmd_solve(const Options& o) {
  const bench::LoadedCase lc = bench::load_case(o.case_path, o.demand_path, o.sidecar);
  const bench::Method m = bench::parse_method(o.methods.front());
  const int horizon = lc.demand.periods();
  bench::Report rep;
  rep.case_name = lc.network.name;
  rep.config = o.config;
  rep.runs.push_back(
      bench::run(lc, m, o.periods.empty() ? horizon : o.periods.front(), o.config));
  return emit(o, rep);
}

int cmd_export(const Options& o) {
  const bench::LoadedCase lc = bench::load_case(o.case_path, o.demand_path, o.sidecar);
  const bench::Method m = bench::parse_method(o.methods.front());
  const uc::UcConfig ucc = o.config.uc_config();
  const uc::ModelHandle h =
      m == bench::Method::kBM
          ? uc::build_conventional_ncuc(lc.network, lc.demand, ucc)
          : uc::build_ncuc(lc.network, lc.demand,
                           bench::determine_partition(
                               lc, m, o.periods.empty() ? lc.demand.periods() : o.periods.front(),
                               o.config),
                           ucc);
  std::ofstream file;
  milp::write_lp(h.model, open_out(o, file));
  return kOk;
}

int cmd_bench(const Options& o) {
  const bench::LoadedCase lc = bench::load_case(o.case_path, o.demand_path, o.sidecar);
  std::vector<bench::Method> methods;
  for (const auto& name : o.methods) methods.push_back(bench::parse_method(name));
  const int t = o.periods.empty() ? static_cast<int>(std::lround(0.4 * lc.demand.periods()))
                                  : o.periods.front();
  return emit(o, bench::run_matrix(lc, methods, t, o.config, o.jobs));
}

int cmd_sweep(const Options& o) {
  const bench::LoadedCase lc = bench::load_case(o.case_path, o.demand_path, o.sidecar);
  std::vector<int> periods = o.periods;
  if (periods.empty()) {
    for (int t = lc.demand.periods() / 8; t <= lc.demand.periods();
         t += std::max(1, lc.demand.periods() / 8)) {
      periods.push_back(t);
    }
  }
  return emit(o, bench::sweep(lc, periods, o.config, o.jobs));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unit commitment on adaptive time periods"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "load and validate a case and demand");
  add_case_flags(validate, o);

  auto* resolve = app.add_subcommand("resolve", "print the partition a method chooses");
  add_case_flags(resolve, o);
  resolve->add_option("--method", o.methods, "M1..M4 or BM")->expected(1);
  resolve->add_option("--periods", o.periods, "adaptive period count T")->expected(1);
  resolve->add_option("--theta", o.config.theta, "congestion flag threshold")
      ->capture_default_str();
  resolve->add_option("--out", o.out, "output file (default stdout)");
  resolve->add_option("--format", o.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  auto* solve = app.add_subcommand("solve", "run one method end to end");
  add_case_flags(solve, o);
  add_run_flags(solve, o);
  solve->add_option("--method", o.methods, "M1..M4 or BM")->expected(1);
  solve->add_option("--periods", o.periods, "adaptive period count T")->expected(1);

  auto* exporter = app.add_subcommand("export", "write the UC model of one method as LP text");
  add_case_flags(exporter, o);
  exporter->add_option("--method", o.methods, "M1..M4 or BM")->expected(1);
  exporter->add_option("--periods", o.periods, "adaptive period count T")->expected(1);
  exporter->add_option("--theta", o.config.theta, "congestion flag threshold")
      ->capture_default_str();
  exporter->add_option("--reserve-up", o.config.reserve_up, "up-reserve ratio")
      ->capture_default_str();
  exporter->add_option("--reserve-down", o.config.reserve_down, "down-reserve ratio")
      ->capture_default_str();
  exporter->add_option("--out", o.out, "output file (default stdout)");

  auto* matrix = app.add_subcommand("bench", "BM and the aggregating methods at one T");
  add_case_flags(matrix, o);
  add_run_flags(matrix, o);
  matrix->add_option("--method", o.methods, "methods to compare with BM (default M1-M4)")
      ->delimiter(',');
  matrix->add_option("--periods", o.periods, "adaptive period count T (default 0.4 T0)")
      ->expected(1);
  matrix->add_option("--jobs", o.jobs, "parallel runs; 1 keeps timings clean")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  auto* sweep = app.add_subcommand("sweep", "M1 over a list of T against BM");
  add_case_flags(sweep, o);
  add_run_flags(sweep, o);
  sweep->add_option("--periods", o.periods, "comma separated T values")->delimiter(',');
  sweep->add_option("--jobs", o.jobs, "parallel runs; 1 keeps timings clean")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kValidation;
  }
  if (o.time_limit > 0.0) o.config.time_limit = o.time_limit;
  if (o.methods.empty()) {
    if (matrix->parsed()) {
      o.methods = {"M1", "M2", "M3", "M4"};
    } else {
      o.methods = {"M1"};
    }
  }

  try {
    if (validate->parsed()) return cmd_validate(o);
    if (resolve->parsed()) return cmd_resolve(o);
    if (solve->parsed()) return cmd_solve(o);
    if (exporter->parsed()) return cmd_export(o);
    if (matrix->parsed()) return cmd_bench(o);
    if (sweep->parsed()) return cmd_sweep(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
