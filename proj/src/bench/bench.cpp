#include "ucflex/bench/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "ucflex/error.hpp"
#include "ucflex/powersys/network.hpp"
#include "ucflex/resolution/resolution.hpp"

namespace ucflex::bench {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

// Rethrows an Error with the method and stage in front of its message.
[[noreturn]] void rethrow_in(Method m, const char* stage) {
  try {
    throw;
  } catch (const Error& e) {
    std::string msg = e.what();
    const std::string prefix = e.code() + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    throw Error(e.code(), std::string(to_string(m)) + " " + stage + ": " + msg);
  }
}

bool aggregating(Method m) { return m != Method::kBM; }

}  // namespace

Method parse_method(const std::string& name) {
  std::string up = name;
  for (char& c : up) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "M1") return Method::kM1;
  if (up == "M2") return Method::kM2;
  if (up == "M3") return Method::kM3;
  if (up == "M4") return Method::kM4;
  if (up == "BM") return Method::kBM;
  throw Error("cli.method", "unknown method '" + name + "' (expected M1-M4 or BM)");
}

const char* to_string(Method m) {
  switch (m) {
    case Method::kM1: return "M1";
    case Method::kM2: return "M2";
    case Method::kM3: return "M3";
    case Method::kM4: return "M4";
    case Method::kBM: return "BM";
  }
  return "unknown";
}

uc::UcConfig RunConfig::uc_config() const {
  uc::UcConfig c;
  c.reserve_up = reserve_up;
  c.reserve_down = reserve_down;
  c.mip_gap = gap;
  c.time_limit = time_limit;
  return c;
}

ModelSize expected_size(int units, int windows) {
  return {2 * units * windows, units * windows, 0};
}

demand::Partition determine_partition(const LoadedCase& lc, Method method, int periods,
                                      const RunConfig& config) {
  const int horizon = lc.demand.periods();
  if (method == Method::kBM) return demand::Partition::singletons(horizon);
  if (periods < 1 || periods > horizon) {
    throw Error("partition.too_many", std::to_string(periods) + " windows requested for " +
                                          std::to_string(horizon) + " periods");
  }
  switch (method) {
    case Method::kM1: {
      const auto candidates = resolution::estimate_congestion(lc.network, lc.demand,
                                                              config.theta, config.uc_config());
      const auto ptdf = powersys::compute_ptdf(lc.network);
      const auto table = resolution::impact_table(lc.network, ptdf, lc.demand, candidates);
      return resolution::optimize_partition(horizon, periods, table).partition;
    }
    case Method::kM2:
      return resolution::baseline_partition(resolution::Baseline::kDemandOnly, lc.demand,
                                            periods);
    case Method::kM3:
      return resolution::baseline_partition(resolution::Baseline::kWard, lc.demand, periods);
    case Method::kM4:
      return resolution::baseline_partition(resolution::Baseline::kEven, lc.demand, periods);
    case Method::kBM: break;
  }
  throw Error("cli.method", "unknown method");
}

RunResult run(const LoadedCase& lc, Method method, int periods, const RunConfig& config) {
  RunResult r;
  r.method = method;
  const int horizon = lc.demand.periods();
  r.periods = aggregating(method) ? periods : horizon;
  const uc::UcConfig ucc = config.uc_config();
  const double t0 = now_seconds();

  try {
    r.partition = determine_partition(lc, method, periods, config);
  } catch (...) {
    rethrow_in(method, "resolution");
  }
  const double t1 = now_seconds();

  uc::UcSolution sol;
  try {
    const uc::ModelHandle h = method == Method::kBM
                                  ? uc::build_conventional_ncuc(lc.network, lc.demand, ucc)
                                  : uc::build_ncuc(lc.network, lc.demand, r.partition, ucc);
    r.size.binaries = h.model.num_integer();
    r.size.continuous = h.model.num_variables() - r.size.binaries;
    r.size.rows = h.model.num_constraints();
    sol = uc::solve_ncuc(h, ucc);
  } catch (...) {
    rethrow_in(method, "solve");
  }
  const double t2 = now_seconds();
  r.status = sol.status;
  r.uc_objective = sol.objective;
  r.gap = sol.gap;
  r.nodes = sol.nodes;

  dispatch::Correction corr;
  try {
    corr = dispatch::correct(lc.network, lc.demand, sol, ucc);
  } catch (...) {
    rethrow_in(method, "correction");
  }
  const double t3 = now_seconds();
  if (corr.rounds > 0) {
    r.status = corr.uc.status;
    r.uc_objective = corr.uc.objective;
    r.gap = corr.uc.gap;
  }
  r.final_partition = corr.uc.partition;
  r.corrections = corr.rounds;
  r.schedule = std::move(corr.schedule);
  r.cost = corr.dispatch.cost;

  r.time.resolution = t1 - t0;
  r.time.milp = t2 - t1;
  r.time.correction = t3 - t2;
  r.time.total = t3 - t0;
  return r;
}

RunResult run(const RunSpec& spec) {
  const LoadedCase lc = load_case(spec.case_path, spec.demand_path, spec.sidecar_path);
  return run(lc, spec.method, spec.periods, spec.config);
}

int differing_statuses(const dispatch::ExtendedSchedule& a,
                       const dispatch::ExtendedSchedule& b) {
  if (a.num_units() != b.num_units() || a.periods() != b.periods()) {
    throw Error("dispatch.schedule", "schedules cover different units or periods");
  }
  int n = 0;
  for (int i = 0; i < a.num_units(); ++i) {
    for (int tau = 1; tau <= a.periods(); ++tau) n += a.on(i, tau) != b.on(i, tau);
  }
  return n;
}

Comparison compare(const RunResult& r, const RunResult& baseline) {
  Comparison c;
  c.method = r.method;
  c.periods = r.periods;
  c.acceleration = r.time.total > 0.0 ? baseline.time.total / r.time.total : 0.0;
  c.cost_variation_pct = baseline.cost != 0.0
                             ? (r.cost - baseline.cost) / std::abs(baseline.cost) * 100.0
                             : 0.0;
  c.differing_statuses = differing_statuses(r.schedule, baseline.schedule);
  c.corrections = r.corrections;
  return c;
}

void summarize(Report& report, bool with_sweep) {
  report.comparisons.clear();
  report.sweep.clear();
  report.smallest_without_correction.reset();
  const RunResult* bm = nullptr;
  for (const RunResult& r : report.runs) {
    if (r.method == Method::kBM) {
      bm = &r;
      break;
    }
  }
  if (bm == nullptr) return;
  for (const RunResult& r : report.runs) {
    if (&r != bm && r.method != Method::kBM) report.comparisons.push_back(compare(r, *bm));
  }
  if (!with_sweep) return;
  for (std::size_t k = 0, c = 0; k < report.runs.size(); ++k) {
    const RunResult& r = report.runs[k];
    if (r.method == Method::kBM) continue;
    const Comparison& cmp = report.comparisons[c++];
    report.sweep.push_back({r.periods, cmp.cost_variation_pct, r.time.total, cmp.acceleration,
                            r.corrections, r.size.binaries});
  }
  std::sort(report.sweep.begin(), report.sweep.end(),
            [](const SweepPoint& a, const SweepPoint& b) { return a.periods < b.periods; });
  for (auto it = report.sweep.rbegin(); it != report.sweep.rend(); ++it) {
    if (it->corrections > 0) break;
    report.smallest_without_correction = it->periods;
  }
}

namespace {

struct Job {
  Method method;
  int periods;
};

std::vector<RunResult> run_jobs(const LoadedCase& lc, const std::vector<Job>& jobs,
                                const RunConfig& config, int threads) {
  std::vector<RunResult> out(jobs.size());
  if (threads <= 1 || jobs.size() <= 1) {
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      out[k] = run(lc, jobs[k].method, jobs[k].periods, config);
    }
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t k = next++;
      if (k >= jobs.size()) return;
      try {
        out[k] = run(lc, jobs[k].method, jobs[k].periods, config);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  std::vector<std::thread> pool;
  const int n = std::min<int>(threads, static_cast<int>(jobs.size()));
  for (int k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

Report run_matrix(const LoadedCase& lc, const std::vector<Method>& methods, int periods,
                  const RunConfig& config, int jobs) {
  std::vector<Job> list{{Method::kBM, periods}};
  for (Method m : methods) {
    if (m != Method::kBM) list.push_back({m, periods});
  }
  Report rep;
  rep.case_name = lc.network.name;
  rep.config = config;
  rep.runs = run_jobs(lc, list, config, jobs);
  summarize(rep, false);
  return rep;
}

Report sweep(const LoadedCase& lc, const std::vector<int>& periods, const RunConfig& config,
             int jobs) {
  std::vector<Job> list{{Method::kBM, lc.demand.periods()}};
  for (int t : periods) list.push_back({Method::kM1, t});
  Report rep;
  rep.case_name = lc.network.name;
  rep.config = config;
  rep.runs = run_jobs(lc, list, config, jobs);
  summarize(rep, true);
  return rep;
}

Format parse_format(const std::string& name) {
  if (name == "json") return Format::kJson;
  if (name == "csv") return Format::kCsv;
  throw Error("cli.format", "unknown report format '" + name + "' (expected json or csv)");
}

std::vector<std::string> csv_columns() {
  return {"method",       "periods",      "windows",       "status",
          "cost",         "uc_objective", "gap",           "resolution_s",
          "milp_s",       "correction_s", "total_s",       "corrections",
          "binaries",     "continuous",   "rows",          "nodes",
          "acceleration", "cost_variation_pct", "differing_statuses"};
}

namespace {

using nlohmann::json;

// JSON has no infinity; unknown gaps and objectives become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

const Comparison* find_comparison(const Report& rep, std::size_t run_index) {
  if (rep.runs[run_index].method == Method::kBM) return nullptr;
  std::size_t c = 0;
  for (std::size_t k = 0; k < run_index; ++k) c += rep.runs[k].method != Method::kBM;
  return c < rep.comparisons.size() ? &rep.comparisons[c] : nullptr;
}

json run_json(const RunResult& r, const Comparison* cmp) {
  json j;
  j["method"] = to_string(r.method);
  j["periods"] = r.periods;
  j["windows"] = r.partition.size();
  j["partition"] = r.partition.starts;
  j["final_partition"] = r.final_partition.starts;
  j["status"] = milp::to_string(r.status);
  j["cost"] = r.cost;
  j["uc_objective"] = number(r.uc_objective);
  j["gap"] = number(r.gap);
  j["time"] = {{"resolution", r.time.resolution},
               {"milp", r.time.milp},
               {"correction", r.time.correction},
               {"total", r.time.total}};
  j["size"] = {{"binaries", r.size.binaries},
               {"continuous", r.size.continuous},
               {"rows", r.size.rows}};
  j["nodes"] = r.nodes;
  j["corrections"] = r.corrections;
  if (cmp != nullptr) {
    j["comparison"] = {{"acceleration", cmp->acceleration},
                       {"cost_variation_pct", cmp->cost_variation_pct},
                       {"differing_statuses", cmp->differing_statuses}};
  } else {
    j["comparison"] = nullptr;
  }
  return j;
}

json report_json(const Report& rep) {
  json j;
  j["format"] = "ucflex-report";
  j["version"] = 1;
  j["case"] = rep.case_name;
  j["config"] = {{"theta", rep.config.theta},
                 {"gap", rep.config.gap},
                 {"reserve_up", rep.config.reserve_up},
                 {"reserve_down", rep.config.reserve_down},
                 {"time_limit", number(rep.config.time_limit)},
                 {"seed", rep.config.seed}};
  j["runs"] = json::array();
  for (std::size_t k = 0; k < rep.runs.size(); ++k) {
    j["runs"].push_back(run_json(rep.runs[k], find_comparison(rep, k)));
  }
  // Per-method aggregates over the comparisons.
  j["methods"] = json::array();
  for (Method m : {Method::kM1, Method::kM2, Method::kM3, Method::kM4}) {
    int n = 0, diff = 0, corr = 0;
    double acc = 0.0, var = 0.0;
    for (const Comparison& c : rep.comparisons) {
      if (c.method != m) continue;
      ++n;
      acc += c.acceleration;
      var += c.cost_variation_pct;
      diff += c.differing_statuses;
      corr += c.corrections;
    }
    if (n == 0) continue;
    j["methods"].push_back({{"method", to_string(m)},
                            {"runs", n},
                            {"mean_acceleration", acc / n},
                            {"mean_cost_variation_pct", var / n},
                            {"differing_statuses", diff},
                            {"corrections", corr}});
  }
  j["sweep"] = json::array();
  for (const SweepPoint& p : rep.sweep) {
    j["sweep"].push_back({{"periods", p.periods},
                          {"cost_variation_pct", p.cost_variation_pct},
                          {"seconds", p.seconds},
                          {"acceleration", p.acceleration},
                          {"corrections", p.corrections},
                          {"binaries", p.binaries}});
  }
  j["smallest_without_correction"] =
      rep.smallest_without_correction ? json(*rep.smallest_without_correction) : json(nullptr);
  return j;
}

std::string csv_number(double v) {
  if (!std::isfinite(v)) return "";
  std::ostringstream s;
  s << std::setprecision(12) << v;
  return s.str();
}

}  // namespace

void emit_report(std::ostream& out, const Report& rep, Format format) {
  if (format == Format::kJson) {
    out << report_json(rep).dump(2) << '\n';
    return;
  }
  const auto cols = csv_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (std::size_t k = 0; k < rep.runs.size(); ++k) {
    const RunResult& r = rep.runs[k];
    const Comparison* c = find_comparison(rep, k);
    out << to_string(r.method) << ',' << r.periods << ',' << r.partition.size() << ','
        << milp::to_string(r.status) << ',' << csv_number(r.cost) << ','
        << csv_number(r.uc_objective) << ',' << csv_number(r.gap) << ','
        << csv_number(r.time.resolution) << ',' << csv_number(r.time.milp) << ','
        << csv_number(r.time.correction) << ',' << csv_number(r.time.total) << ','
        << r.corrections << ',' << r.size.binaries << ',' << r.size.continuous << ','
        << r.size.rows << ',' << r.nodes << ',';
    if (c != nullptr) {
      out << csv_number(c->acceleration) << ',' << csv_number(c->cost_variation_pct) << ','
          << c->differing_statuses;
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

void write_report(const std::string& path, const Report& report, Format format) {
  std::ofstream f(path);
  if (!f) throw Error("io.write", "cannot open " + path);
  emit_report(f, report, format);
  if (!f) throw Error("io.write", "failed writing " + path);
}

}  // namespace ucflex::bench
