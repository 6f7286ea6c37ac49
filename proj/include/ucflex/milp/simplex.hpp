#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ucflex/milp/model.hpp"

namespace ucflex::milp {

namespace detail {
class BasisFactor;
struct CscMatrix;
}  // namespace detail

struct LpOptions {
  double primal_tol = 1e-7;
  double dual_tol = 1e-7;
  double pivot_tol = 1e-9;
  long long iteration_limit = 50'000'000;
  double time_limit = kInf;  // seconds
  int refactor_interval = 100;
  // Degenerate iterations tolerated before switching to Bland's rule.
  int stall_limit = 50;
};

enum class LpStatus {
  kOptimal,
  kInfeasible,
  kUnbounded,
  kIterationLimit,
  kTimeLimit,
  kNumerical
};

const char* to_string(LpStatus s);

enum class VarState : std::int8_t { kBasic, kLower, kUpper, kFixed, kFree };

// Basis snapshot used to warm start a later solve. Positions in `head` are
// variable indices; structural variables come first, then one logical per row.
struct Basis {
  std::vector<int> head;
  std::vector<VarState> state;
};

// Bounded revised simplex over rows a_i x - s_i = 0 with bounds on both the
// structural variables x and the logicals s. The dual simplex does the main
// work (it also restarts cheaply after bound changes); a primal phase cleans
// up when artificial bounds or cost shifts had to be introduced.
class LpSolver {
 public:
  explicit LpSolver(const MilpModel& model, LpOptions options = {});
  ~LpSolver();
  LpSolver(const LpSolver&) = delete;
  LpSolver& operator=(const LpSolver&) = delete;

  int num_rows() const { return m_; }
  int num_cols() const { return n_; }

  void set_bounds(int j, double lower, double upper);
  double lower(int j) const { return true_lo_[j]; }
  double upper(int j) const { return true_up_[j]; }

  // Solves from the current basis (slack basis on first call).
  LpStatus solve();
  // Solves starting from a saved basis.
  LpStatus solve_from(const Basis& basis);

  Basis basis() const;

  double objective() const;
  // Lower bound from the current duals: sum_j min over [l_j,u_j] of d_j x_j.
  double dual_bound() const;
  std::vector<double> primal() const;
  std::vector<double> row_duals() const;
  std::vector<double> reduced_costs() const;
  long long iterations() const { return iterations_; }
  const std::string& diagnostics() const { return diagnostics_; }

  void set_time_limit(double seconds) { options_.time_limit = seconds; }

 private:
  void install_slack_basis();
  bool refactor();
  void compute_primal();
  void compute_duals();
  void place_nonbasic_dual_feasible();
  void compute_pivot_row(const std::vector<double>& rho);
  void column(int j, std::vector<double>& out) const;
  double nonbasic_value(int j) const;

  LpStatus run();
  LpStatus dual_simplex();
  LpStatus primal_simplex();
  bool expand_blocking_boxes(double sign);
  void repair_dual_feasibility();
  void resolve_artificial(bool& need_primal);
  bool refresh();
  bool confirm_infeasible(int r);
  bool time_exceeded() const;

  LpOptions options_;
  int m_ = 0;
  int n_ = 0;
  std::unique_ptr<detail::CscMatrix> a_;
  // Row-wise copy for pivot row computation.
  std::vector<int> row_start_, row_col_;
  std::vector<double> row_val_;

  std::vector<double> cost_;
  std::vector<double> shift_;
  std::vector<double> true_lo_, true_up_;  // problem bounds
  std::vector<double> lo_, up_;            // working bounds (may be boxed)
  std::vector<char> boxed_;
  double box_size_ = 1e6;

  std::vector<double> x_;
  std::vector<double> d_;
  std::vector<int> head_;
  std::vector<int> pos_;
  std::vector<VarState> state_;
  std::vector<double> dse_;
  std::unique_ptr<detail::BasisFactor> factor_;
  bool have_basis_ = false;
  bool factor_valid_ = false;
  bool primal_dirty_ = true;
  double offset_ = 0.0;
  std::string diagnostics_;

  // Scratch.
  std::vector<double> rho_, alpha_col_, tau_, alpha_row_;
  std::vector<int> touched_;
  std::vector<unsigned> stamp_;
  unsigned stamp_counter_ = 0;
  std::vector<char> tolerated_;
  bool any_tolerated_ = false;

  long long iterations_ = 0;
  double start_time_ = 0.0;
};

// Solves the continuous relaxation (integrality ignored).
MilpSolution solve_lp(const MilpModel& model, const LpOptions& options = {});

}  // namespace ucflex::milp
