// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/conventional_uc.hpp"
#include "oracles/dc_flow.hpp"
#include "oracles/milp_enum.hpp"
#include "oracles/partition_enum.hpp"
#include "oracles/ramp_enum.hpp"
#include "oracles/random_network.hpp"
#include "ucflex/bench/bench.hpp"
#include "ucflex/dispatch/dispatch.hpp"
#include "ucflex/error.hpp"
#include "ucflex/milp/branch_and_bound.hpp"
#include "ucflex/powersys/network.hpp"
#include "ucflex/resolution/resolution.hpp"
#include "ucflex/uc/ncuc.hpp"

using namespace ucflex;

namespace {

const std::string kFixtures = std::string(UCFLEX_SOURCE_DIR) + "/fixtures";

// Tolerances and budgets.
constexpr double kExampleTol = 1e-9;
constexpr double kExampleBudget = 1e-3;   // s
constexpr double kPartitionBudget = 5.0;  // s
constexpr double kRampTol = 1e-9;
constexpr double kRampBudget = 10.0;
constexpr double kGap = 1e-4;
constexpr double kEquivalenceBudget = 60.0;
constexpr double kMilpTol = 1e-6;
constexpr double kMilpBudget = 30.0;
constexpr double kPtdfTol = 1e-9;
constexpr double kPtdfBudget = 5.0;
constexpr double kMaxCostVariationPct = 0.5;
constexpr double kRunTimeLimit = 300.0;  // s per MILP solve, a guard only

double now() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

const bench::LoadedCase& six_bus() {
  static const bench::LoadedCase lc =
      bench::load_case(kFixtures + "/six_bus/case.txt", kFixtures + "/six_bus/demand.csv");
  return lc;
}

bench::RunConfig run_config() {
  bench::RunConfig cfg;
  cfg.gap = kGap;
  cfg.time_limit = kRunTimeLimit;
  return cfg;
}

int adaptive_periods() {
  return static_cast<int>(std::lround(0.4 * six_bus().demand.periods()));
}

// BM, M1 and M4 at 0.4 T0 on the six-bus fixture, one after another on this
// thread. Shared by the economy and acceleration criteria.
const bench::Report& six_bus_matrix() {
  static const bench::Report rep = bench::run_matrix(
      six_bus(), {bench::Method::kM1, bench::Method::kM4}, adaptive_periods(), run_config(), 1);
  return rep;
}

const bench::RunResult& run_of(const bench::Report& rep, bench::Method m) {
  for (const auto& r : rep.runs) {
    if (r.method == m) return r;
  }
  throw Error("acceptance", std::string("no run for ") + bench::to_string(m));
}

const bench::Comparison& comparison_of(const bench::Report& rep, bench::Method m) {
  for (const auto& c : rep.comparisons) {
    if (c.method == m) return c;
  }
  throw Error("acceptance", std::string("no comparison for ") + bench::to_string(m));
}

// 1. Demand-only worked example through the congestion-aware path with no
// flagged lines.
void worked_example(Outcome& o) {
  powersys::NetworkCase c;
  c.buses = {{0, "only"}};
  powersys::ThermalUnit g;
  g.p_max = 3000;
  g.ramp_up = g.ramp_down = 3000;
  c.units = {g};
  const auto d = demand::DemandSeries::from_system({100, 1000, 1700, 2200, 2500}, 1.0);
  resolution::CongestionCandidates none;
  none.by_period.assign(5, {});

  const double t0 = now();
  const auto ptdf = powersys::compute_ptdf(c);
  const auto table = resolution::impact_table(c, ptdf, d, none);
  const auto best = resolution::optimize_partition(5, 3, table);
  const double elapsed = now() - t0;

  const double alternative = table(1, 1) + table(2, 3) + table(4, 5);
  const double alternative_exact = (1700.0 - 1000.0) / 1700.0 + (2500.0 - 2200.0) / 2500.0;
  o.require(best.partition.starts == std::vector<int>{1, 2, 3}, "starts [1,2,3]");
  o.require(std::abs(best.objective - 0.32) <= kExampleTol, "objective 0.32");
  o.require(std::abs(alternative - alternative_exact) <= kExampleTol, "alternative value");
  o.require(std::abs(alternative - 0.53) < 0.005, "alternative rounds to 0.53");
  o.require(elapsed < kExampleBudget, "runtime");
  o.detail << "starts [1,2,3], objective " << best.objective << ", alternative " << alternative
           << ", " << elapsed * 1e3 << " ms";
}

// 2. Partition DP against enumeration on random tables with dyadic entries,
// so sums are exact in floating point.
void partition_oracle(Outcome& o) {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> horizon(1, 12), grid(0, 4096);
  const double t0 = now();
  int mismatches = 0, cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = horizon(rng);
    resolution::ImpactTable table(n);
    for (int a = 1; a <= n; ++a) {
      for (int b = a; b <= n; ++b) table.at(a, b) = grid(rng) / 1024.0;
    }
    const int windows = std::uniform_int_distribution<int>(1, std::min(n, 5))(rng);
    const auto dp = resolution::optimize_partition(n, windows, table);
    const double brute = oracle::best_partition_objective(n, windows, table);
    double own = 0.0;
    for (int t = 0; t < dp.partition.size(); ++t) own += table(dp.partition.first(t), dp.partition.last(t, n));
    ++cases;
    if (dp.objective != brute || own != dp.objective || dp.partition.size() != windows) ++mismatches;
  }
  const double elapsed = now() - t0;
  o.require(mismatches == 0, "DP equals enumeration");
  o.require(elapsed < kPartitionBudget, "runtime");
  o.detail << cases << " tables, " << mismatches << " mismatches, " << elapsed << " s";
}

// 3. Window ramp coefficients against enumerated steepest trajectories.
void ramp_oracle(Outcome& o) {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> pmin(0, 200), range(20, 400), rate(5, 250);
  std::uniform_int_distribution<int> dur(1, 6), step(0, 2);
  const double steps[3] = {0.25, 0.5, 1.0};
  const double t0 = now();
  double worst = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    powersys::ThermalUnit g;
    g.p_min = pmin(rng);
    g.p_max = g.p_min + range(rng);
    g.ramp_up = rate(rng);
    g.ramp_down = rate(rng);
    const double dt = steps[step(rng)];
    const int d_prev = dur(rng), d_cur = dur(rng);
    const auto r = uc::ramp_params(g, d_prev, d_cur, dt);
    const double up = g.ramp_up * dt, dn = g.ramp_down * dt;
    const oracle::RampUnit rising{g.p_min, g.p_max, up, dn};
    const oracle::RampUnit falling{g.p_min, g.p_max, dn, up};
    worst = std::max(worst, std::abs(r.ramp_up - oracle::steepest_average_rise(up, dn, d_prev, d_cur)));
    worst = std::max(worst, std::abs(r.ramp_down - oracle::steepest_average_rise(dn, up, d_prev, d_cur)));
    worst = std::max(worst, std::abs(r.startup - oracle::steepest_startup_average(rising, d_cur)));
    worst = std::max(worst, std::abs(r.shutdown - oracle::steepest_startup_average(falling, d_cur)));
  }
  const double elapsed = now() - t0;
  o.require(worst <= kRampTol, "coefficients match enumeration");
  o.require(elapsed < kRampBudget, "runtime");
  o.detail << "500 units, worst deviation " << worst << " MW, " << elapsed << " s";
}

// 4. All-singleton adaptive model against the textbook hourly formulation.
void degeneracy(Outcome& o) {
  const auto& lc = six_bus();
  uc::UcConfig cfg;
  cfg.mip_gap = kGap;
  const double t0 = now();
  const auto h = uc::build_ncuc(lc.network, lc.demand,
                                demand::Partition::singletons(lc.demand.periods()), cfg);
  const auto mine = uc::solve_ncuc(h, cfg);
  const double t1 = now();
  const auto conv = oracle::conventional_uc(lc.network, lc.demand, 0.0, 0.0);
  milp::MilpOptions mo;
  mo.gap = kGap;
  const auto ref = milp::solve_milp(conv.model, mo);
  const double t2 = now();
  const bool solved = mine.has_solution() && ref.has_solution();
  const double rel = solved ? std::abs(mine.objective - ref.objective) / std::abs(ref.objective)
                            : milp::kInf;
  o.require(solved, "both models solved");
  o.require(mine.gap <= kGap && ref.gap <= kGap, "both within the gap");
  o.require(rel <= 2 * kGap, "objectives within 2 gap");
  o.require(t2 - t0 < kEquivalenceBudget, "runtime");
  o.detail << "adaptive " << mine.objective << " (" << t1 - t0 << " s), conventional "
           << ref.objective << " (" << t2 - t1 << " s), relative difference " << rel;
}

// 5. Branch and bound against enumeration with LP completion.
void milp_oracle(Outcome& o) {
  std::mt19937 rng(5150);
  milp::MilpOptions opt;
  opt.gap = 0.0;
  const double t0 = now();
  int bad = 0, feasible = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = oracle::random_milp(rng, 12);
    const double want = oracle::enumerate_milp(p);
    const auto sol = milp::solve_milp(p.model, opt);
    if (!std::isfinite(want)) {
      bad += sol.status != milp::Status::kInfeasible;
      continue;
    }
    ++feasible;
    const double dev = std::abs(sol.objective - want);
    worst = std::max(worst, dev);
    bad += sol.status != milp::Status::kOptimal || dev > kMilpTol ||
           !p.model.is_feasible(sol.values);
  }
  const double elapsed = now() - t0;
  o.require(bad == 0, "objectives match");
  o.require(elapsed < kMilpBudget, "runtime");
  o.detail << "100 instances (" << feasible << " feasible), worst deviation " << worst << ", "
           << elapsed << " s";
}

// 6. PTDF against one DC power flow per injection.
void ptdf_oracle(Outcome& o) {
  std::mt19937 rng(31337);
  std::uniform_int_distribution<int> size(2, 20), chords(0, 15);
  const double t0 = now();
  double worst = 0.0;
  int networks = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    auto c = oracle::random_network(rng, n, chords(rng));
    c.reference_bus = std::uniform_int_distribution<int>(0, n - 1)(rng);
    const auto p = powersys::compute_ptdf(c);
    for (int j = 0; j < n; ++j) {
      std::vector<double> inj(n, 0.0);
      inj[j] += 1.0;
      inj[c.reference_bus] -= 1.0;
      const auto f = oracle::dc_flows(c, inj);
      for (int l = 0; l < c.num_lines(); ++l) worst = std::max(worst, std::abs(p(l, j) - f[l]));
    }
    ++networks;
  }
  const double elapsed = now() - t0;
  o.require(worst <= kPtdfTol, "entrywise agreement");
  o.require(elapsed < kPtdfBudget, "runtime");
  o.detail << networks << " networks of 2-20 buses, worst deviation " << worst << ", " << elapsed
           << " s";
}

// 7. M1 splits the congestion onset that M2 keeps inside one window, and
// adding the congested line never lowers a window's impact.
void congestion_split(Outcome& o) {
  const auto& lc = six_bus();
  const auto cfg = run_config();
  const int t = adaptive_periods();
  const int horizon = lc.demand.periods();
  const auto candidates =
      resolution::estimate_congestion(lc.network, lc.demand, cfg.theta, cfg.uc_config());
  const int onset = candidates.first_flagged_period();
  o.require(onset > 0, "a congested period exists");
  if (onset == 0) return;

  const auto m1 = bench::determine_partition(lc, bench::Method::kM1, t, cfg);
  const auto m2 = bench::determine_partition(lc, bench::Method::kM2, t, cfg);
  const int w = m2.window_of(onset);
  const int first = m2.first(w), last = m2.last(w, horizon);
  bool split = false;
  for (int s : m1.starts) split = split || (s > first && s <= last);
  o.require(last > first, "M2 merges the onset into a longer window");
  o.require(split, "M1 places a boundary inside that window");

  const auto ptdf = powersys::compute_ptdf(lc.network);
  const auto with = resolution::impact_table(lc.network, ptdf, lc.demand, candidates);
  resolution::CongestionCandidates without;
  without.by_period.assign(horizon, {});
  const auto base = resolution::impact_table(lc.network, ptdf, lc.demand, without);
  long long violations = 0, windows = 0;
  for (int a = 1; a <= horizon; ++a) {
    for (int b = a; b <= horizon; ++b) {
      ++windows;
      violations += with(a, b) < base(a, b);
    }
  }
  o.require(violations == 0, "impact with the line >= impact without it");
  std::set<int> lines;
  for (const auto& per : candidates.by_period) {
    for (const auto& fl : per) lines.insert(fl.line);
  }
  o.detail << "onset period " << onset << " (line";
  for (int l : lines) o.detail << ' ' << lc.network.lines[l].name;
  o.detail << "), M2 window [" << first << "," << last << "], M1 starts inside:";
  for (int s : m1.starts) {
    if (s > first && s <= last) o.detail << ' ' << s;
  }
  o.detail << "; " << windows << " windows monotone";
}

// 8. Cost of M1 and M4 after correction against BM at 0.4 T0.
void economy(Outcome& o) {
  const auto& rep = six_bus_matrix();
  const auto& m1 = comparison_of(rep, bench::Method::kM1);
  const auto& m4 = comparison_of(rep, bench::Method::kM4);
  o.require(m1.cost_variation_pct <= kMaxCostVariationPct, "M1 variation <= 0.5%");
  o.require(m1.corrections == 0, "M1 needs no correction");
  o.require(m4.cost_variation_pct >= m1.cost_variation_pct, "M4 variation >= M1 variation");
  for (const auto& r : rep.runs) {
    o.require(r.status != milp::Status::kTimeLimit,
              std::string(bench::to_string(r.method)) + " solved within the guard limit");
  }
  o.detail << "T=" << adaptive_periods() << ", BM cost " << run_of(rep, bench::Method::kBM).cost
           << ", M1 " << m1.cost_variation_pct << "% (" << m1.corrections
           << " corrections), M4 " << m4.cost_variation_pct << "% (" << m4.corrections
           << " corrections)";
}

// 9. With runs one after another, M1 (resolution included) beats BM, and
// the binary counts follow 2 * units * windows.
void acceleration(Outcome& o) {
  const auto& rep = six_bus_matrix();
  const auto& lc = six_bus();
  const auto& bm = run_of(rep, bench::Method::kBM);
  const auto& m1 = run_of(rep, bench::Method::kM1);
  const int ng = lc.network.num_units();
  const int t = adaptive_periods();
  o.require(m1.time.total < bm.time.total, "M1 faster than BM");
  o.require(m1.size.binaries == 2 * ng * t, "M1 binaries = 2 NG T");
  o.require(bm.size.binaries == 2 * ng * lc.demand.periods(), "BM binaries = 2 NG T0");
  o.require(m1.size.binaries == bench::expected_size(ng, t).binaries &&
                m1.size.continuous == bench::expected_size(ng, t).continuous,
            "count formula");
  o.detail << "BM " << bm.time.total << " s, M1 " << m1.time.total << " s (resolution "
           << m1.time.resolution << " s), acceleration "
           << comparison_of(rep, bench::Method::kM1).acceleration << "x; binaries "
           << m1.size.binaries << " = 2*" << ng << "*" << t << ", BM " << bm.size.binaries;
}

// 10. Correction loop on the corridor fixture.
void correction_loop(Outcome& o) {
  const auto lc = bench::load_case(kFixtures + "/corridor/case.txt",
                                   kFixtures + "/corridor/demand.csv");
  const auto cfg = run_config();
  const auto ucc = cfg.uc_config();
  const int horizon = lc.demand.periods();
  int runs = 0, needed = 0, max_rounds = 0, failures = 0;
  for (bench::Method m : {bench::Method::kM1, bench::Method::kM2, bench::Method::kM3,
                          bench::Method::kM4}) {
    for (int t = 2; t <= horizon / 2; ++t) {
      ++runs;
      const auto part = bench::determine_partition(lc, m, t, cfg);
      const auto sol = uc::solve_ncuc(uc::build_ncuc(lc.network, lc.demand, part, ucc), ucc);
      const auto first = dispatch::economic_dispatch(lc.network, lc.demand,
                                                     dispatch::extend(sol, horizon));
      const bool infeasible_aggregation = !first.violations.empty();
      dispatch::Correction corr;
      try {
        corr = dispatch::correct(lc.network, lc.demand, sol, ucc);
      } catch (const Error& e) {
        ++failures;
        o.detail << "[" << bench::to_string(m) << " T=" << t << ": " << e.what() << "] ";
        continue;
      }
      const auto check = dispatch::economic_dispatch(lc.network, lc.demand, corr.schedule, true);
      const auto hard = dispatch::economic_dispatch(lc.network, lc.demand, corr.schedule, false);
      const bool ok = check.violations.empty() && hard.feasible && corr.rounds <= horizon - t &&
                      (corr.rounds > 0) == infeasible_aggregation;
      failures += !ok;
      needed += corr.rounds > 0;
      max_rounds = std::max(max_rounds, corr.rounds);
    }
  }
  o.require(failures == 0, "every run ends violation-free within T0 - T rounds");
  o.require(needed > 0, "the fixture triggers correction");
  o.detail << runs << " runs (M1-M4, T=2.." << horizon / 2 << "), " << needed
           << " needed correction, at most " << max_rounds << " rounds";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* title;
    std::function<void(Outcome&)> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "worked example", worked_example},
      {2, "partition DP vs enumeration", partition_oracle},
      {3, "ramp coefficients vs trajectory enumeration", ramp_oracle},
      {4, "singleton model vs conventional model", degeneracy},
      {5, "MILP vs enumeration", milp_oracle},
      {6, "PTDF vs DC power flow", ptdf_oracle},
      {7, "congestion onset split", congestion_split},
      {8, "cost after correction", economy},
      {9, "acceleration and model size", acceleration},
      {10, "correction loop", correction_loop},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      c.check(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    failed += !o.pass;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
