#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ucflex/bench/case_io.hpp"
#include "ucflex/demand/demand.hpp"
#include "ucflex/dispatch/dispatch.hpp"
#include "ucflex/milp/model.hpp"
#include "ucflex/uc/ncuc.hpp"

namespace ucflex::bench {

// M1 congestion-aware partition, M2 demand-range-only partition, M3 Ward
// clustering of system demand, M4 even windows, BM original resolution.
enum class Method { kM1, kM2, kM3, kM4, kBM };

// Accepts "M1".."M4" and "BM" in any case. Throws Error("cli.method").
Method parse_method(const std::string& name);
const char* to_string(Method m);

struct RunConfig {
  double theta = 0.95;
  double gap = 1e-4;
  double reserve_up = 0.0;
  double reserve_down = 0.0;
  double time_limit = milp::kInf;  // seconds, per MILP solve
  // Recorded in reports; every stage of the pipeline is deterministic.
  std::uint64_t seed = 1;

  uc::UcConfig uc_config() const;
};

struct RunSpec {
  std::string case_path;
  std::string demand_path;
  std::string sidecar_path;
  Method method = Method::kM1;
  int periods = 0;  // T; ignored by BM
  RunConfig config;
};

struct Timings {
  double resolution = 0.0;  // partition determination
  double milp = 0.0;        // build and solve on the partition
  double correction = 0.0;  // extension, dispatch and any re-solves
  double total = 0.0;
};

struct ModelSize {
  int binaries = 0;
  int continuous = 0;
  int rows = 0;
};

// Commitment, start-up and output variables: 2 * units * windows binaries
// and units * windows continuous columns, with no auxiliary columns.
ModelSize expected_size(int units, int windows);

struct RunResult {
  Method method = Method::kBM;
  int periods = 0;                // windows requested
  demand::Partition partition;    // as determined
  demand::Partition final_partition;  // after correction
  Timings time;
  ModelSize size;  // of the first model
  milp::Status status = milp::Status::kInfeasible;
  double uc_objective = milp::kInf;
  double gap = milp::kInf;
  long long nodes = 0;
  double cost = 0.0;  // dispatch cost of the corrected schedule, $
  int corrections = 0;
  dispatch::ExtendedSchedule schedule;
};

// Partition used by `method` for `periods` windows.
demand::Partition determine_partition(const LoadedCase& lc, Method method, int periods,
                                      const RunConfig& config);

// Full pipeline: partition, build, solve, extend, dispatch, correct. Errors
// are rethrown with the method and stage prepended to the message.
RunResult run(const LoadedCase& lc, Method method, int periods, const RunConfig& config);
RunResult run(const RunSpec& spec);

// Count of (unit, period) pairs whose on/off status differs. Throws
// Error("dispatch.schedule") on shape mismatch.
int differing_statuses(const dispatch::ExtendedSchedule& a,
                       const dispatch::ExtendedSchedule& b);

struct Comparison {
  Method method = Method::kBM;
  int periods = 0;
  double acceleration = 0.0;        // time(BM) / time(method), total wall time
  double cost_variation_pct = 0.0;  // (cost - cost(BM)) / cost(BM) * 100
  int differing_statuses = 0;
  int corrections = 0;
};

Comparison compare(const RunResult& r, const RunResult& baseline);

struct SweepPoint {
  int periods = 0;
  double cost_variation_pct = 0.0;
  double seconds = 0.0;
  double acceleration = 0.0;
  int corrections = 0;
  int binaries = 0;
};

struct Report {
  std::string case_name;
  RunConfig config;
  std::vector<RunResult> runs;
  // Every non-BM run against the BM run, in run order. Empty without BM.
  std::vector<Comparison> comparisons;
  std::vector<SweepPoint> sweep;
  // Smallest swept T such that no T' >= T needed a correction.
  std::optional<int> smallest_without_correction;
};

// Runs BM and each of `methods` at `periods` windows. With jobs > 1 the runs
// share the machine and their timings interfere; jobs = 1 runs them one
// after another on the calling thread.
Report run_matrix(const LoadedCase& lc, const std::vector<Method>& methods, int periods,
                  const RunConfig& config, int jobs = 1);

// BM plus M1 at every T in `periods`.
Report sweep(const LoadedCase& lc, const std::vector<int>& periods, const RunConfig& config,
             int jobs = 1);

// Fills comparisons (and the sweep table when `with_sweep`) from runs.
void summarize(Report& report, bool with_sweep);

enum class Format { kJson, kCsv };

Format parse_format(const std::string& name);  // Throws Error("cli.format").

// CSV holds one row per run with the comparison columns left blank for BM
// and when no BM run exists. JSON layout is described in
// docs/report-schema.json.
void emit_report(std::ostream& out, const Report& report, Format format);
void write_report(const std::string& path, const Report& report, Format format);

std::vector<std::string> csv_columns();

}  // namespace ucflex::bench
