#pragma once

#include <filesystem>
#include <iosfwd>

#include "ucflex/milp/model.hpp"

namespace ucflex::milp {

// CPLEX-style LP text. Characters outside the LP name alphabet are replaced
// by '_'; import accepts either spelling.
void write_lp(const MilpModel& model, std::ostream& out);
void export_lp_file(const MilpModel& model, const std::filesystem::path& path);

std::string lp_name(const std::string& name);

// Reads `name value` lines ('#' starts a comment). Variables not listed are
// zero. The point must satisfy the model within kFeasibilityTol; optimality
// is the external solver's claim and is taken as given.
MilpSolution read_solution(const MilpModel& model, std::istream& in);
MilpSolution import_solution_file(const MilpModel& model,
                                  const std::filesystem::path& path);

}  // namespace ucflex::milp
