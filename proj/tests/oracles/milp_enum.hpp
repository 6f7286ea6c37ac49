#pragma once

// Random small MILPs built around a known feasible point, and their optimum
// by exhaustive enumeration of the binaries with the tableau oracle solving
// the continuous remainder.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "oracles/tableau_simplex.hpp"
#include "ucflex/milp/model.hpp"

namespace oracle {

struct RandomMilp {
  ucflex::milp::MilpModel model;
  std::vector<int> binaries;
};

inline RandomMilp random_milp(std::mt19937& rng, int max_binaries = 12) {
  using namespace ucflex::milp;
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> nb_dist(2, max_binaries), nc_dist(0, 5), m_dist(2, 8);
  RandomMilp out;
  const int nb = nb_dist(rng), nc = nc_dist(rng), m = m_dist(rng);
  std::vector<double> x0;
  for (int j = 0; j < nb; ++j) {
    out.binaries.push_back(out.model.add_binary("b" + std::to_string(j),
                                                std::round(u(rng) * 20) / 2));
    x0.push_back(u(rng) > 0 ? 1.0 : 0.0);
  }
  for (int j = 0; j < nc; ++j) {
    out.model.add_variable("c" + std::to_string(j), 0.0, 10.0,
                           std::round(u(rng) * 20) / 4);
    x0.push_back(5.0 + 5.0 * u(rng));
  }
  for (int i = 0; i < m; ++i) {
    std::vector<Term> terms;
    double act = 0.0;
    for (int j = 0; j < nb + nc; ++j) {
      if (u(rng) < 0.2) continue;
      const double a = std::round(u(rng) * 8) / 2;
      terms.push_back({j, a});
      act += a * x0[j];
    }
    const double slack = std::abs(u(rng)) * 3;
    const bool le = u(rng) > 0;
    out.model.add_constraint("r" + std::to_string(i), terms,
                             le ? Sense::kLessEqual : Sense::kGreaterEqual,
                             le ? act + slack : act - slack);
  }
  return out;
}

// Infinity when no assignment is feasible.
inline double enumerate_milp(const RandomMilp& p) {
  const int nb = static_cast<int>(p.binaries.size());
  double best = ucflex::milp::kInf;
  for (int mask = 0; mask < (1 << nb); ++mask) {
    ucflex::milp::MilpModel fixed = p.model;
    for (int k = 0; k < nb; ++k) {
      auto& v = fixed.variable(p.binaries[k]);
      v.lower = v.upper = (mask >> k) & 1;
    }
    auto r = tableau_solve(fixed);
    if (r.status == TableauResult::kOptimal) best = std::min(best, r.objective);
  }
  return best;
}

}  // namespace oracle
