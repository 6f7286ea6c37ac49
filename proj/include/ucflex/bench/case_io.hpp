#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "ucflex/demand/demand.hpp"
#include "ucflex/powersys/network.hpp"

namespace ucflex::bench {

// Native case file, version 1. Whitespace separated, '#' starts a comment:
//
//   ucflex-case 1
//   name <text>
//   reference <bus>
//   [buses]
//   <bus> ...
//   [lines]
//   <name> <from> <to> <reactance pu> <rating MW, 0 = unmonitored>
//   [units]
//   <name> <bus> <p_min> <p_max> <ramp_up MW/h> <ramp_down MW/h> <min_up h>
//       <min_down h> <cost $/MWh> <no-load $/h> <start-up $> <on|off>
//       <initial MW> <initial duration h>
//
// Bus labels are arbitrary tokens, mapped to dense indices in file order.
// Errors carry "source:line" and the codes ingest.parse, ingest.version,
// ingest.unknown_bus, ingest.duplicate or the case validation code.
powersys::NetworkCase parse_case(std::istream& in, const std::string& source);
powersys::NetworkCase read_case(const std::string& path);
void write_case(std::ostream& out, const powersys::NetworkCase& c);

// MATPOWER case subset (bus, branch, gen and optional gencost tables) plus a
// sidecar with the unit data MATPOWER lacks:
//
//   ucflex-sidecar 1
//   <gen row, 1-based> <ramp_up> <ramp_down> <min_up> <min_down> <on|off>
//       <initial MW> <initial duration h> [<cost> <no-load> <start-up>]
//
// Branches with status 0 and generators with status 0 are dropped; rateA
// becomes the line rating, the type-3 bus the reference and the file stem
// the case name.
powersys::NetworkCase parse_matpower(std::istream& mpc, const std::string& mpc_source,
                                     std::istream& sidecar, const std::string& sidecar_source);
powersys::NetworkCase read_matpower(const std::string& mpc_path,
                                    const std::string& sidecar_path);

// Demand table: optional "# step_hours: <h>" line, a header row naming bus
// labels (an optional leading "period" column is ignored), then one row of
// MW values per original period. Buses absent from the header get zero.
demand::DemandSeries parse_demand(std::istream& in, const std::string& source,
                                  const powersys::NetworkCase& c);
demand::DemandSeries read_demand(const std::string& path, const powersys::NetworkCase& c);
void write_demand(std::ostream& out, const demand::DemandSeries& d,
                  const powersys::NetworkCase& c);

struct LoadedCase {
  powersys::NetworkCase network;
  demand::DemandSeries demand;
};

// Reads and validates a case and its demand. A ".m" case is read as MATPOWER
// and needs `sidecar`.
LoadedCase load_case(const std::string& case_path, const std::string& demand_path,
                     const std::string& sidecar_path = "");

}  // namespace ucflex::bench
