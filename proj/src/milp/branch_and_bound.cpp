#include "ucflex/milp/branch_and_bound.hpp"

#include <chrono>
#include <cmath>
#include <algorithm>
#include <memory>
#include <optional>
#include <queue>

#include "ucflex/error.hpp"

namespace ucflex::milp {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

constexpr long long kDiveInterval = 100;  // nodes between dives while no incumbent
constexpr long long kRinsInterval = 500;
constexpr long long kRinsNodes = 500;

struct BoundChange {
  int var;
  double lower;
  double upper;
};

struct Node {
  long long id = 0;
  double bound = -kInf;
  std::vector<BoundChange> changes;  // root-to-node, later entries win
  std::shared_ptr<const Basis> basis;
};

struct WorseNode {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const MilpOptions& options)
      : model_(model), options_(options), lp_(model, options.lp) {
    for (int j = 0; j < model.num_variables(); ++j) {
      lo_.push_back(model.variable(j).lower);
      up_.push_back(model.variable(j).upper);
      if (model.variable(j).integer) integers_.push_back(j);
    }
  }

  MilpRun run();

 private:
  double elapsed() const { return now_seconds() - start_; }
  bool out_of_time() const {
    return std::isfinite(options_.time_limit) && elapsed() >= options_.time_limit;
  }
  // Set by an incumbent or, inside rins(), by the outer incumbent.
  bool has_cutoff() const { return std::isfinite(incumbent_obj_); }
  double prune_level() const {
    return incumbent_obj_ - 1e-9 * std::max(1.0, std::abs(incumbent_obj_));
  }

  bool apply(const Node& node);
  void reset_all_integers();
  int most_fractional(const std::vector<double>& x) const;
  void try_incumbent(std::vector<double> x);
  LpStatus solve_node(const Node& node, bool warm_from_current);
  enum class DiveMode { kNearest, kUp };
  void dive(std::vector<double> x, DiveMode mode);
  void rins(const std::vector<double>& x);
  void fix_by_reduced_cost();

  const MilpModel& model_;
  MilpOptions options_;
  LpSolver lp_;
  std::vector<int> integers_;
  std::vector<int> applied_;
  // Bounds valid for the whole tree (tightened by reduced-cost fixing).
  std::vector<double> lo_, up_;
  double start_ = 0.0;

  bool sub_search_ = false;  // running inside rins(): no further heuristics
  double root_obj_ = -kInf;
  std::vector<double> root_x_, root_d_;

  std::vector<double> incumbent_;
  double incumbent_obj_ = kInf;
  std::vector<double> history_;
};

// Returns false when the node's bounds contradict the global ones.
bool BranchAndBound::apply(const Node& node) {
  for (int j : applied_) lp_.set_bounds(j, lo_[j], up_[j]);
  applied_.clear();
  bool ok = true;
  for (const BoundChange& c : node.changes) {
    const double lo = std::max(c.lower, lo_[c.var]);
    const double up = std::min(c.upper, up_[c.var]);
    if (lo > up) {
      ok = false;
      continue;
    }
    lp_.set_bounds(c.var, lo, up);
    applied_.push_back(c.var);
  }
  return ok;
}

void BranchAndBound::reset_all_integers() {
  for (int j : integers_) lp_.set_bounds(j, lo_[j], up_[j]);
  applied_.clear();
}

int BranchAndBound::most_fractional(const std::vector<double>& x) const {
  int best = -1;
  double best_score = kIntegralityTol;
  for (int j : integers_) {
    const double f = x[j] - std::floor(x[j]);
    const double score = std::min(f, 1.0 - f);
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

// Rounds the integer part of an LP point. If rounding disturbs feasibility,
// the integers are fixed and the LP re-solved for the continuous part.
void BranchAndBound::try_incumbent(std::vector<double> x) {
  for (int j : integers_) x[j] = std::round(x[j]);
  if (!model_.is_feasible(x)) {
    for (int j : integers_) lp_.set_bounds(j, x[j], x[j]);
    const LpStatus st = lp_.solve();
    if (st == LpStatus::kOptimal) {
      x = lp_.primal();
      for (int j : integers_) x[j] = std::round(x[j]);
    }
    reset_all_integers();
    if (st != LpStatus::kOptimal || !model_.is_feasible(x)) return;
  }
  const double obj = model_.objective_value(x);
  if (obj < incumbent_obj_) {
    incumbent_obj_ = obj;
    incumbent_ = std::move(x);
    history_.push_back(obj);
    fix_by_reduced_cost();
  }
}

LpStatus BranchAndBound::solve_node(const Node& node, bool warm_from_current) {
  if (!apply(node)) return LpStatus::kInfeasible;
  if (std::isfinite(options_.time_limit)) {
    lp_.set_time_limit(std::max(0.0, options_.time_limit - elapsed()));
  }
  if (warm_from_current || !node.basis) return lp_.solve();
  return lp_.solve_from(*node.basis);
}

// Diving: rounds one integer at a time and re-solves until the LP point is
// integral. kNearest rounds the variable closest to integrality to its nearest
// value, kUp rounds the largest fractional part up. A rounding that makes the
// LP infeasible is flipped once. Leaves the LP bounds at the global ones.
void BranchAndBound::dive(std::vector<double> x, DiveMode mode) {
  const int max_rounds = static_cast<int>(integers_.size());
  for (int round = 0; round < max_rounds && !out_of_time(); ++round) {
    int pick = -1;
    double pick_score = 1.0;
    for (int j : integers_) {
      const double f = x[j] - std::floor(x[j]);
      if (std::min(f, 1.0 - f) <= kIntegralityTol) continue;
      const double score = mode == DiveMode::kUp ? 1.0 - f : std::min(f, 1.0 - f);
      if (score < pick_score) {
        pick_score = score;
        pick = j;
      }
    }
    if (pick < 0) {
      reset_all_integers();
      try_incumbent(std::move(x));
      break;
    }
    const double near = mode == DiveMode::kUp ? std::ceil(x[pick]) : std::round(x[pick]);
    const double far = near > x[pick] ? std::floor(x[pick]) : std::ceil(x[pick]);
    lp_.set_bounds(pick, near, near);
    LpStatus st = lp_.solve();
    if (st == LpStatus::kInfeasible) {
      lp_.set_bounds(pick, far, far);
      st = lp_.solve();
    }
    if (st != LpStatus::kOptimal) break;
    if (has_cutoff() && lp_.objective() >= prune_level()) break;
    x = lp_.primal();
  }
  reset_all_integers();
}

// Relaxation-induced neighbourhood search: integers on which the incumbent and
// an LP point agree are fixed and the remaining sub-problem gets a short
// branch-and-bound of its own.
void BranchAndBound::rins(const std::vector<double>& x) {
  if (incumbent_.empty() || sub_search_ || out_of_time()) return;
  MilpModel sub = model_;
  int free_count = 0;
  for (int j : integers_) {
    Variable& v = sub.variable(j);
    v.lower = lo_[j];
    v.upper = up_[j];
    if (std::abs(incumbent_[j] - x[j]) <= kIntegralityTol) {
      v.lower = v.upper = incumbent_[j];
    } else {
      ++free_count;
    }
  }
  if (free_count == 0) return;
  MilpOptions o = options_;
  o.node_limit = kRinsNodes;
  if (std::isfinite(options_.time_limit)) o.time_limit = options_.time_limit - elapsed();
  BranchAndBound inner(sub, o);
  inner.sub_search_ = true;
  inner.incumbent_obj_ = incumbent_obj_;
  inner.run();
  if (!inner.incumbent_.empty()) try_incumbent(inner.incumbent_);
}

// A nonbasic integer at a bound whose reduced cost alone would lift the root
// bound past the incumbent can never move away from that bound.
void BranchAndBound::fix_by_reduced_cost() {
  if (incumbent_.empty() || root_d_.empty()) return;
  const double room = incumbent_obj_ - root_obj_;
  const double tol = 1e-6 * std::max(1.0, std::abs(incumbent_obj_));
  for (int j : integers_) {
    const double d = root_d_[j];
    if (lo_[j] == up_[j]) continue;
    if (d > tol && root_x_[j] <= lo_[j] + kIntegralityTol && d > room + tol) {
      up_[j] = lo_[j];
    } else if (d < -tol && root_x_[j] >= up_[j] - kIntegralityTol && -d > room + tol) {
      lo_[j] = up_[j];
    } else {
      continue;
    }
    if (std::find(applied_.begin(), applied_.end(), j) == applied_.end()) {
      lp_.set_bounds(j, lo_[j], up_[j]);
    }
  }
}

MilpRun BranchAndBound::run() {
  start_ = now_seconds();
  MilpRun out;
  MilpSolution& sol = out.solution;

  std::priority_queue<Node, std::vector<Node>, WorseNode> open;
  std::optional<Node> plunge = Node{};
  long long next_id = 1;
  long long nodes = 0;
  bool stopped = false;    // time or node limit
  bool unbounded = false;
  bool lp_dirty = false;  // LP basis left behind by a dive

  for (;;) {
    Node node;
    bool warm = false;
    if (plunge) {
      node = std::move(*plunge);
      plunge.reset();
      warm = true;
    } else if (!open.empty()) {
      node = open.top();
      open.pop();
    } else {
      break;
    }
    if (has_cutoff()) {
      if (node.bound >= prune_level()) continue;
      const double lower = std::min(node.bound, open.empty() ? kInf : open.top().bound);
      if (relative_gap(incumbent_obj_, lower) <= options_.gap) {
        open.push(std::move(node));
        break;
      }
    }
    if (out_of_time() ||
        (options_.node_limit >= 0 && nodes >= options_.node_limit)) {
      open.push(std::move(node));
      stopped = true;
      break;
    }

    ++nodes;
    const LpStatus st = solve_node(node, warm && !lp_dirty);
    lp_dirty = false;
    if (st == LpStatus::kTimeLimit || st == LpStatus::kIterationLimit) {
      open.push(std::move(node));
      stopped = true;
      break;
    }
    if (st == LpStatus::kNumerical) {
      throw Error("lp.numerical", "node LP breakdown (" + lp_.diagnostics() + ")");
    }
    if (st == LpStatus::kInfeasible) continue;
    if (st == LpStatus::kUnbounded) {
      unbounded = true;
      break;
    }

    const double obj = lp_.objective();
    if (has_cutoff() && obj >= prune_level()) continue;
    std::vector<double> x = lp_.primal();
    if (nodes == 1) {
      root_obj_ = obj;
      root_x_ = x;
      root_d_ = lp_.reduced_costs();
    }
    const int j = most_fractional(x);
    if (j < 0) {
      try_incumbent(std::move(x));
      continue;
    }
    auto basis = std::make_shared<const Basis>(lp_.basis());
    if (!sub_search_) {
      if (nodes == 1) {
        dive(x, DiveMode::kNearest);
        dive(x, DiveMode::kUp);
        rins(x);
        lp_dirty = true;
      } else if (incumbent_.empty() && nodes % kDiveInterval == 0) {
        dive(x, DiveMode::kUp);
        lp_dirty = true;
      } else if (nodes % kRinsInterval == 0) {
        rins(x);
        lp_dirty = true;
      }
      if (lp_dirty) apply(node);
    }

    const double v = x[j];
    const double frac = v - std::floor(v);
    double lo = lo_[j], up = up_[j];
    for (const BoundChange& c : node.changes) {
      if (c.var == j) {
        lo = c.lower;
        up = c.upper;
      }
    }
    Node down{next_id++, std::max(node.bound, obj), node.changes, basis};
    down.changes.push_back({j, lo, std::floor(v)});
    Node upc{next_id++, std::max(node.bound, obj), std::move(node.changes), basis};
    upc.changes.push_back({j, std::ceil(v), up});
    if (frac >= 0.5) {
      plunge = std::move(upc);
      open.push(std::move(down));
    } else {
      plunge = std::move(down);
      open.push(std::move(upc));
    }
  }

  if (plunge) open.push(std::move(*plunge));
  sol.nodes = nodes;
  sol.lp_iterations = lp_.iterations();
  sol.wall_seconds = elapsed();

  if (unbounded && incumbent_.empty()) {
    sol.status = Status::kUnbounded;
    sol.objective = -kInf;
    out.incumbent_history = history_;
    return out;
  }
  double lower = incumbent_obj_;
  if (!open.empty()) lower = std::min(lower, open.top().bound);
  if (incumbent_.empty()) {
    sol.status = stopped ? Status::kTimeLimit : Status::kInfeasible;
    sol.bound = lower;
  } else {
    sol.values = incumbent_;
    sol.objective = incumbent_obj_;
    sol.bound = lower;
    sol.gap = relative_gap(sol.objective, sol.bound);
    if (stopped && sol.gap > options_.gap) {
      sol.status = Status::kTimeLimit;
    } else if (open.empty() || sol.gap <= 1e-9) {
      sol.status = Status::kOptimal;
    } else {
      sol.status = Status::kGapReached;
    }
  }
  out.incumbent_history = history_;
  return out;
}

}  // namespace

MilpRun solve_milp_traced(const MilpModel& model, const MilpOptions& options) {
  if (options.gap < 0) throw Error("milp.options", "gap must be non-negative");
  if (auto problems = model.validate(); !problems.empty()) {
    throw Error("milp.invalid_model", problems.front());
  }
  if (model.num_integer() == 0) return {solve_lp(model, options.lp), {}};
  BranchAndBound bb(model, options);
  return bb.run();
}

}  // namespace ucflex::milp
