#include <sstream>
#include <string>

#include "doctest.h"
#include "ucflex/bench/case_io.hpp"
#include "ucflex/error.hpp"

using namespace ucflex;
using namespace ucflex::bench;
using powersys::NetworkCase;

namespace {

const std::string kFixtures = std::string(UCFLEX_SOURCE_DIR) + "/fixtures";

const char* kSmallCase = R"(ucflex-case 1
name small
reference a
[buses]
a
b
c
[lines]
# name from to reactance rating
ab a b 0.1 100
bc b c 0.2 0
[units]
G1 a 10 100 50 60 2 1.5 20 5 100 on 40 3
G2 c 0 50 25 25 0 0 35 0 0 off 0 2
)";

NetworkCase small_case() {
  std::istringstream in(kSmallCase);
  return parse_case(in, "small.txt");
}

std::string code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

std::string message_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("native case parses with labels mapped to dense indices") {
  const NetworkCase c = small_case();
  CHECK(c.name == "small");
  CHECK(c.num_buses() == 3);
  CHECK(c.reference_bus == 0);
  REQUIRE(c.num_lines() == 2);
  CHECK(c.lines[1].from_bus == 1);
  CHECK(c.lines[1].to_bus == 2);
  CHECK_FALSE(c.lines[1].monitored());
  REQUIRE(c.num_units() == 2);
  const auto& g = c.units[0];
  CHECK(g.p_min == 10);
  CHECK(g.ramp_down == 60);
  CHECK(g.min_down == 1.5);
  CHECK(g.cost_startup == 100);
  CHECK(g.init_on);
  CHECK(g.init_power == 40);
  CHECK(c.units[1].bus == 2);
}

TEST_CASE("case and demand survive a write/read round trip") {
  const NetworkCase c = small_case();
  std::ostringstream out;
  write_case(out, c);
  std::istringstream in(out.str());
  const NetworkCase back = parse_case(in, "back.txt");
  REQUIRE(back.num_units() == c.num_units());
  REQUIRE(back.num_lines() == c.num_lines());
  CHECK(back.reference_bus == c.reference_bus);
  for (int l = 0; l < c.num_lines(); ++l) {
    CHECK(back.lines[l].name == c.lines[l].name);
    CHECK(back.lines[l].reactance == c.lines[l].reactance);
    CHECK(back.lines[l].rating == c.lines[l].rating);
  }
  for (int i = 0; i < c.num_units(); ++i) {
    const auto& a = c.units[i];
    const auto& b = back.units[i];
    CHECK(a.bus == b.bus);
    CHECK(a.p_max == b.p_max);
    CHECK(a.min_up == b.min_up);
    CHECK(a.cost_linear == b.cost_linear);
    CHECK(a.cost_noload == b.cost_noload);
    CHECK(a.init_on == b.init_on);
    CHECK(a.init_duration == b.init_duration);
  }

  auto d = demand::DemandSeries::from_rows({{0, 12.5, 30}, {0, 14.25, 31}, {0, 9, 0.125}}, 0.5);
  std::ostringstream dout;
  write_demand(dout, d, c);
  std::istringstream din(dout.str());
  const auto dback = parse_demand(din, "d.csv", c);
  REQUIRE(dback.periods() == 3);
  CHECK(dback.step_hours() == 0.5);
  for (int t = 1; t <= 3; ++t) {
    for (int b = 0; b < 3; ++b) CHECK(dback.at(t, b) == d.at(t, b));
  }
}

TEST_CASE("bundled six-bus fixture loads and validates") {
  const LoadedCase lc =
      load_case(kFixtures + "/six_bus/case.txt", kFixtures + "/six_bus/demand.csv");
  CHECK(lc.network.num_buses() == 6);
  CHECK(lc.network.num_units() == 8);
  CHECK(lc.demand.periods() == 96);
  CHECK(lc.demand.step_hours() == 0.25);
  int monitored = 0;
  for (const auto& l : lc.network.lines) monitored += l.monitored();
  CHECK(monitored >= 1);
}

TEST_CASE("bundled fixtures all load") {
  CHECK_NOTHROW(load_case(kFixtures + "/two_bus/case.txt", kFixtures + "/two_bus/demand.csv"));
  CHECK_NOTHROW(load_case(kFixtures + "/corridor/case.txt",
                          kFixtures + "/corridor/demand.csv"));
  const LoadedCase mp = load_case(kFixtures + "/five_bus_matpower/case.m",
                                  kFixtures + "/five_bus_matpower/demand.csv",
                                  kFixtures + "/five_bus_matpower/sidecar.txt");
  CHECK(mp.network.num_buses() == 5);
  CHECK(mp.demand.periods() == 24);
}

TEST_CASE("demand column naming an unknown bus is rejected") {
  const NetworkCase c = small_case();
  std::istringstream in("# step_hours: 1\nperiod,a,zz\n1,1,2\n");
  CHECK(code_of([&] { parse_demand(in, "d.csv", c); }) == "ingest.unknown_bus");
  std::istringstream again("# step_hours: 1\nperiod,a,zz\n1,1,2\n");
  CHECK(message_of([&] { parse_demand(again, "d.csv", c); }).find("d.csv:2") !=
        std::string::npos);
}

TEST_CASE("case errors carry source and line number") {
  std::string text = kSmallCase;
  text.replace(text.find("bc b c"), 6, "bc b q");
  std::istringstream in(text);
  const std::string msg = message_of([&] { parse_case(in, "bad.txt"); });
  CHECK(msg.rfind("ingest.unknown_bus", 0) == 0);
  CHECK(msg.find("bad.txt:11") != std::string::npos);

  std::istringstream short_unit("ucflex-case 1\nname x\nreference a\n[buses]\na\n[units]\nG a 1 2\n");
  CHECK(message_of([&] { parse_case(short_unit, "s.txt"); }).find("s.txt:7") !=
        std::string::npos);

  std::istringstream no_header("name x\n");
  CHECK(code_of([&] { parse_case(no_header, "h.txt"); }) == "ingest.version");

  std::string neg = kSmallCase;
  neg.replace(neg.find("G2 c 0 50"), 9, "G2 c 60 50");
  std::istringstream bad_range(neg);
  const std::string range_msg = message_of([&] { parse_case(bad_range, "r.txt"); });
  CHECK(range_msg.rfind("unit.range", 0) == 0);
  CHECK(range_msg.find("r.txt:14") != std::string::npos);
}

TEST_CASE("matpower subset with sidecar") {
  std::istringstream mpc(R"(function mpc = tiny
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
  10 3 0 0 0 0 1 1 0 230 1 1.1 0.9;
  20 1 50 0 0 0 1 1 0 230 1 1.1 0.9;
  30 1 80 0 0 0 1 1 0 230 1 1.1 0.9;
];
mpc.gen = [
  10 0 0 0 0 1 100 1 200 20 0 0 0 0 0 0 0 0 0 0 0;
  30 0 0 0 0 1 100 0 90 0 0 0 0 0 0 0 0 0 0 0 0;
  30 0 0 0 0 1 100 1 90 10 0 0 0 0 0 0 0 0 0 0 0;
];
mpc.branch = [
  10 20 0.01 0.1 0 120 0 0 0 0 1 -360 360;
  20 30 0.01 0.2 0 0 0 0 0 0 1 -360 360;
  10 30 0.01 0.3 0 90 0 0 0 0 0 -360 360;
];
mpc.gencost = [
  2 500 0 3 0.01 20 100;
  2 0 0 2 30 0;
  2 200 0 2 40 15;
];
)");
  std::istringstream side(R"(ucflex-sidecar 1
# row ramp_up ramp_down min_up min_down init init_mw init_h
1 100 100 2 2 on 100 8
2 50 50 1 1 off 0 4
3 60 60 1 1 off 0 4 45 5 250
)");
  const NetworkCase c = parse_matpower(mpc, "tiny.m", side, "tiny.side");
  CHECK(c.num_buses() == 3);
  CHECK(c.reference_bus == 0);
  CHECK(c.num_lines() == 2);  // the status-0 branch is dropped
  CHECK(c.lines[0].rating == 120);
  CHECK(c.lines[0].reactance == 0.1);
  REQUIRE(c.num_units() == 2);  // the status-0 generator is dropped
  const auto& g1 = c.units[0];
  CHECK(g1.p_max == 200);
  CHECK(g1.p_min == 20);
  CHECK(g1.cost_startup == 500);
  // Secant of 0.01 p^2 + 20 p + 100 over [20, 200].
  CHECK(g1.cost_linear == doctest::Approx(20 + 0.01 * 220));
  CHECK(g1.cost_noload == doctest::Approx(100 - 0.01 * 20 * 200));
  CHECK(g1.init_on);
  CHECK(g1.min_up == 2);
  const auto& g3 = c.units[1];
  CHECK(g3.name == "G3");
  CHECK(g3.bus == 2);
  CHECK(g3.cost_linear == 45);  // sidecar costs override gencost
  CHECK(g3.cost_startup == 250);

  std::istringstream mpc2("mpc.bus = [\n1 3 0 0;\n];\nmpc.gen = [\n1 0 0 0 0 1 100 1 10 0;\n];\n"
                          "mpc.branch = [\n1 7 0 0.1 0 10;\n];\n");
  std::istringstream side2("ucflex-sidecar 1\n1 1 1 0 0 off 0 1\n");
  const std::string msg = message_of([&] { parse_matpower(mpc2, "m.m", side2, "s"); });
  CHECK(msg.rfind("ingest.unknown_bus", 0) == 0);
  CHECK(msg.find("m.m:8") != std::string::npos);

  std::istringstream mpc3("mpc.bus = [\n1 3 0 0;\n];\nmpc.gen = [\n1 0 0 0 0 1 100 1 10 0;\n];\n"
                          "mpc.branch = [\n];\n");
  std::istringstream side3("ucflex-sidecar 1\n");
  CHECK(code_of([&] { parse_matpower(mpc3, "m.m", side3, "s"); }) == "ingest.sidecar");
}
