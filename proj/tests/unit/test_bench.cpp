#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "doctest.h"
#include "oracles/json_schema.hpp"
#include "ucflex/bench/bench.hpp"
#include "ucflex/error.hpp"

using namespace ucflex;
using namespace ucflex::bench;

namespace {

const std::string kRoot = UCFLEX_SOURCE_DIR;

const LoadedCase& two_bus() {
  static const LoadedCase lc = load_case(kRoot + "/fixtures/two_bus/case.txt",
                                         kRoot + "/fixtures/two_bus/demand.csv");
  return lc;
}

nlohmann::json schema() {
  std::ifstream f(kRoot + "/docs/report-schema.json");
  return nlohmann::json::parse(f);
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("method names") {
  for (Method m : {Method::kM1, Method::kM2, Method::kM3, Method::kM4, Method::kBM}) {
    CHECK(parse_method(to_string(m)) == m);
  }
  CHECK(parse_method("m3") == Method::kM3);
  CHECK_THROWS_AS(parse_method("M5"), Error);
}

TEST_CASE("model size follows the count formula") {
  const LoadedCase& lc = two_bus();
  const int ng = lc.network.num_units();
  int last_binaries = 1 << 30;
  for (int t = lc.demand.periods(); t >= 1; --t) {
    const RunResult r = run(lc, Method::kM4, t, {});
    const ModelSize e = expected_size(ng, t);
    CHECK(r.size.binaries == e.binaries);
    CHECK(r.size.continuous == e.continuous);
    CHECK(r.size.binaries == 2 * ng * t);
    CHECK(r.size.binaries <= last_binaries);
    last_binaries = r.size.binaries;
  }
  const RunResult bm = run(lc, Method::kBM, 0, {});
  CHECK(bm.size.binaries == 2 * ng * lc.demand.periods());
}

TEST_CASE("BM compared with itself") {
  const LoadedCase& lc = two_bus();
  const RunResult bm = run(lc, Method::kBM, 0, {});
  CHECK(bm.partition == demand::Partition::singletons(lc.demand.periods()));
  CHECK(bm.corrections == 0);
  const Comparison c = compare(bm, bm);
  CHECK(c.differing_statuses == 0);
  CHECK(c.cost_variation_pct == 0.0);
  CHECK(c.acceleration == doctest::Approx(1.0));
}

TEST_CASE("M4 at full resolution reproduces BM") {
  const LoadedCase& lc = two_bus();
  RunConfig cfg;
  const RunResult bm = run(lc, Method::kBM, 0, cfg);
  const RunResult m4 = run(lc, Method::kM4, lc.demand.periods(), cfg);
  CHECK(m4.partition == bm.partition);
  CHECK(std::abs(m4.cost - bm.cost) <= 2 * cfg.gap * std::abs(bm.cost));
}

TEST_CASE("differing statuses is symmetric and zero only for equal schedules") {
  dispatch::ExtendedSchedule a, b;
  a.commitment = {{1, 1, 0, 0}, {0, 1, 1, 1}};
  a.window_of = {0, 1, 2, 3};
  b = a;
  CHECK(differing_statuses(a, b) == 0);
  b.commitment[0][2] = 1;
  b.commitment[1][0] = 1;
  CHECK(differing_statuses(a, b) == 2);
  CHECK(differing_statuses(b, a) == 2);
  dispatch::ExtendedSchedule c = a;
  c.commitment.pop_back();
  CHECK_THROWS_AS(differing_statuses(a, c), Error);
}

TEST_CASE("partition errors name the method and stage") {
  const LoadedCase& lc = two_bus();
  try {
    run(lc, Method::kM2, lc.demand.periods() + 1, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == "partition.too_many");
    CHECK(std::string(e.what()).find("M2 resolution") != std::string::npos);
  }
}

TEST_CASE("empty report is a header-only CSV") {
  std::ostringstream out;
  emit_report(out, Report{}, Format::kCsv);
  const auto lines = csv_lines(out.str());
  REQUIRE(lines.size() == 1);
  CHECK(lines[0].rfind("method,periods,windows,status,cost", 0) == 0);
}

TEST_CASE("two-method report") {
  const LoadedCase& lc = two_bus();
  const Report rep = run_matrix(lc, {Method::kM1}, 3, {}, 1);
  REQUIRE(rep.runs.size() == 2);
  REQUIRE(rep.comparisons.size() == 1);
  CHECK(rep.comparisons[0].acceleration ==
        doctest::Approx(rep.runs[0].time.total / rep.runs[1].time.total));

  std::ostringstream csv;
  emit_report(csv, rep, Format::kCsv);
  const auto lines = csv_lines(csv.str());
  REQUIRE(lines.size() == 3);
  CHECK(lines[1].rfind("BM,", 0) == 0);
  CHECK(lines[1].substr(lines[1].size() - 3) == ",,,");
  CHECK(lines[2].rfind("M1,3,3,", 0) == 0);

  std::ostringstream js;
  emit_report(js, rep, Format::kJson);
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(oracle::validate_schema(schema(), doc).empty());
  CHECK(doc["runs"][0]["comparison"].is_null());
  CHECK(doc["runs"][1]["comparison"]["acceleration"].get<double>() ==
        doctest::Approx(rep.comparisons[0].acceleration));
  CHECK(doc["methods"].size() == 1);
  CHECK(nlohmann::json::parse(doc.dump()) == doc);
}

TEST_CASE("schema check rejects malformed reports") {
  std::ostringstream js;
  emit_report(js, Report{}, Format::kJson);
  auto doc = nlohmann::json::parse(js.str());
  CHECK(oracle::validate_schema(schema(), doc).empty());
  auto bad = doc;
  bad.erase("runs");
  CHECK_FALSE(oracle::validate_schema(schema(), bad).empty());
  bad = doc;
  bad["config"]["gap"] = "small";
  CHECK_FALSE(oracle::validate_schema(schema(), bad).empty());
  bad = doc;
  bad["extra"] = 1;
  CHECK_FALSE(oracle::validate_schema(schema(), bad).empty());
}

TEST_CASE("sweep table and the smallest T without correction") {
  Report rep;
  auto add = [&](Method m, int t, int corrections, double cost) {
    RunResult r;
    r.method = m;
    r.periods = t;
    r.cost = cost;
    r.corrections = corrections;
    r.partition.starts = {1};
    r.final_partition.starts = {1};
    r.time.total = 1.0;
    r.schedule.commitment = {{1, 1}};
    r.schedule.window_of = {0, 1};
    rep.runs.push_back(r);
  };
  add(Method::kBM, 96, 0, 100.0);
  add(Method::kM1, 48, 0, 100.5);
  add(Method::kM1, 12, 2, 101.0);
  add(Method::kM1, 24, 0, 100.5);
  add(Method::kM1, 16, 1, 101.0);
  add(Method::kM1, 20, 0, 102.0);
  summarize(rep, true);
  REQUIRE(rep.sweep.size() == 5);
  CHECK(rep.sweep.front().periods == 12);
  CHECK(rep.sweep.back().periods == 48);
  CHECK(rep.sweep[1].corrections == 1);
  CHECK(rep.sweep.back().cost_variation_pct == doctest::Approx(0.5));
  REQUIRE(rep.smallest_without_correction.has_value());
  CHECK(*rep.smallest_without_correction == 20);

  std::ostringstream js;
  emit_report(js, rep, Format::kJson);
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(oracle::validate_schema(schema(), doc).empty());
  CHECK(doc["smallest_without_correction"] == 20);
  CHECK(doc["sweep"].size() == 5);
}

TEST_CASE("sweep at full resolution matches BM") {
  const LoadedCase& lc = two_bus();
  RunConfig cfg;
  const Report rep = sweep(lc, {lc.demand.periods()}, cfg, 2);
  REQUIRE(rep.sweep.size() == 1);
  CHECK(std::abs(rep.sweep[0].cost_variation_pct) <= 2 * cfg.gap * 100);
  CHECK(rep.sweep[0].corrections == 0);
}
