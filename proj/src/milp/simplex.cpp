#include "ucflex/milp/simplex.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "basis_factor.hpp"
#include "ucflex/error.hpp"

namespace ucflex::milp {

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

constexpr double kBoxLimit = 1e13;

}  // namespace

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration_limit";
    case LpStatus::kTimeLimit: return "time_limit";
    case LpStatus::kNumerical: return "numerical";
  }
  return "unknown";
}

LpSolver::LpSolver(const MilpModel& model, LpOptions options)
    : options_(options),
      m_(model.num_constraints()),
      n_(model.num_variables()),
      a_(std::make_unique<detail::CscMatrix>()),
      factor_(std::make_unique<detail::BasisFactor>()) {
  const int total = n_ + m_;
  // Row-wise storage straight from the model, then transpose into CSC.
  row_start_.assign(m_ + 1, 0);
  for (int i = 0; i < m_; ++i) {
    row_start_[i + 1] =
        row_start_[i] + static_cast<int>(model.constraint(i).terms.size());
  }
  row_col_.resize(row_start_[m_]);
  row_val_.resize(row_start_[m_]);
  std::vector<int> col_count(n_ + 1, 0);
  for (int i = 0; i < m_; ++i) {
    int k = row_start_[i];
    for (const Term& t : model.constraint(i).terms) {
      row_col_[k] = t.var;
      row_val_[k] = t.coef;
      ++col_count[t.var + 1];
      ++k;
    }
  }
  a_->rows = m_;
  a_->cols = n_;
  a_->start.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) a_->start[j + 1] = a_->start[j] + col_count[j + 1];
  a_->index.resize(row_col_.size());
  a_->value.resize(row_col_.size());
  std::vector<int> fill(a_->start.begin(), a_->start.end() - 1);
  for (int i = 0; i < m_; ++i) {
    for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      const int j = row_col_[k];
      a_->index[fill[j]] = i;
      a_->value[fill[j]] = row_val_[k];
      ++fill[j];
    }
  }

  cost_.assign(total, 0.0);
  true_lo_.assign(total, 0.0);
  true_up_.assign(total, 0.0);
  for (int j = 0; j < n_; ++j) {
    const Variable& v = model.variable(j);
    cost_[j] = v.cost;
    true_lo_[j] = v.lower;
    true_up_[j] = v.upper;
  }
  for (int i = 0; i < m_; ++i) {
    const Constraint& c = model.constraint(i);
    const int j = n_ + i;
    switch (c.sense) {
      case Sense::kLessEqual: true_lo_[j] = -kInf; true_up_[j] = c.rhs; break;
      case Sense::kGreaterEqual: true_lo_[j] = c.rhs; true_up_[j] = kInf; break;
      case Sense::kEqual: true_lo_[j] = c.rhs; true_up_[j] = c.rhs; break;
    }
  }
  offset_ = model.objective_offset();
  lo_ = true_lo_;
  up_ = true_up_;
  boxed_.assign(total, 0);
  shift_.assign(total, 0.0);
  x_.assign(total, 0.0);
  d_.assign(total, 0.0);
  head_.assign(m_, -1);
  pos_.assign(total, -1);
  state_.assign(total, VarState::kLower);
  dse_.assign(m_, 1.0);
  rho_.assign(m_, 0.0);
  alpha_col_.assign(m_, 0.0);
  tau_.assign(m_, 0.0);
  alpha_row_.assign(n_, 0.0);
  stamp_.assign(n_, 0);
  tolerated_.assign(m_, 0);
}

LpSolver::~LpSolver() = default;

bool LpSolver::time_exceeded() const {
  return std::isfinite(options_.time_limit) &&
         now_seconds() - start_time_ > options_.time_limit;
}

void LpSolver::install_slack_basis() {
  std::fill(pos_.begin(), pos_.end(), -1);
  for (int i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    pos_[n_ + i] = i;
    state_[n_ + i] = VarState::kBasic;
  }
  for (int j = 0; j < n_; ++j) state_[j] = VarState::kLower;
  std::fill(dse_.begin(), dse_.end(), 1.0);
}

bool LpSolver::refactor() {
  if (factor_->factorize(*a_, head_)) {
    factor_valid_ = true;
    return true;
  }
  install_slack_basis();
  factor_->factorize(*a_, head_);
  factor_valid_ = true;
  return false;
}

void LpSolver::column(int j, std::vector<double>& out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (j >= n_) {
    out[j - n_] = -1.0;
    return;
  }
  for (int k = a_->start[j]; k < a_->start[j + 1]; ++k) {
    out[a_->index[k]] = a_->value[k];
  }
}

double LpSolver::nonbasic_value(int j) const {
  switch (state_[j]) {
    case VarState::kLower: return lo_[j];
    case VarState::kUpper: return up_[j];
    case VarState::kFixed: return lo_[j];
    case VarState::kFree: return x_[j];
    case VarState::kBasic: break;
  }
  return x_[j];
}

void LpSolver::compute_primal() {
  std::vector<double>& rhs = alpha_col_;
  std::fill(rhs.begin(), rhs.end(), 0.0);
  for (int j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::kBasic) continue;
    const double v = nonbasic_value(j);
    x_[j] = v;
    if (v == 0.0) continue;
    if (j >= n_) {
      rhs[j - n_] += v;
    } else {
      for (int k = a_->start[j]; k < a_->start[j + 1]; ++k) {
        rhs[a_->index[k]] -= a_->value[k] * v;
      }
    }
  }
  factor_->ftran(rhs);
  for (int i = 0; i < m_; ++i) x_[head_[i]] = rhs[i];
  primal_dirty_ = false;
}

void LpSolver::compute_duals() {
  std::vector<double>& y = rho_;
  for (int i = 0; i < m_; ++i) y[i] = cost_[head_[i]] + shift_[head_[i]];
  factor_->btran(y);
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == VarState::kBasic) {
      d_[j] = 0.0;
      continue;
    }
    double dj = cost_[j] + shift_[j];
    for (int k = a_->start[j]; k < a_->start[j + 1]; ++k) {
      dj -= a_->value[k] * y[a_->index[k]];
    }
    d_[j] = dj;
  }
  for (int i = 0; i < m_; ++i) {
    const int j = n_ + i;
    d_[j] = state_[j] == VarState::kBasic ? 0.0 : cost_[j] + shift_[j] + y[i];
  }
}

void LpSolver::place_nonbasic_dual_feasible() {
  const int total = n_ + m_;
  for (int j = 0; j < total; ++j) {
    lo_[j] = true_lo_[j];
    up_[j] = true_up_[j];
    boxed_[j] = 0;
  }
  for (int j = 0; j < total; ++j) {
    if (state_[j] == VarState::kBasic) continue;
    const bool has_lo = std::isfinite(lo_[j]);
    const bool has_up = std::isfinite(up_[j]);
    if (lo_[j] == up_[j]) {
      state_[j] = VarState::kFixed;
    } else if (std::abs(d_[j]) <= options_.dual_tol) {
      // Either bound is dual feasible; keep a real bound where there is one.
      if (state_[j] == VarState::kUpper && has_up) continue;
      if (state_[j] == VarState::kLower && has_lo) continue;
      state_[j] = has_lo ? VarState::kLower : has_up ? VarState::kUpper : VarState::kFree;
    } else if (d_[j] >= 0.0) {
      state_[j] = VarState::kLower;
      if (!has_lo) {
        lo_[j] = has_up ? up_[j] - box_size_ : -box_size_;
        boxed_[j] = 1;
      }
    } else {
      state_[j] = VarState::kUpper;
      if (!has_up) {
        up_[j] = has_lo ? lo_[j] + box_size_ : box_size_;
        boxed_[j] = 1;
      }
    }
  }
  primal_dirty_ = true;
}

// After a fresh dual computation: flip boxed variables or shift costs so that
// every nonbasic reduced cost has the sign its position requires.
void LpSolver::repair_dual_feasibility() {
  const int total = n_ + m_;
  const double tol = options_.dual_tol;
  for (int j = 0; j < total; ++j) {
    switch (state_[j]) {
      case VarState::kLower:
        if (d_[j] < -tol) {
          if (std::isfinite(up_[j])) {
            state_[j] = VarState::kUpper;
            primal_dirty_ = true;
          } else {
            shift_[j] -= d_[j];
            d_[j] = 0.0;
          }
        }
        break;
      case VarState::kUpper:
        if (d_[j] > tol) {
          if (std::isfinite(lo_[j])) {
            state_[j] = VarState::kLower;
            primal_dirty_ = true;
          } else {
            shift_[j] -= d_[j];
            d_[j] = 0.0;
          }
        }
        break;
      case VarState::kFree:
        if (std::abs(d_[j]) > tol) {
          shift_[j] -= d_[j];
          d_[j] = 0.0;
        }
        break;
      default: break;
    }
  }
}

void LpSolver::compute_pivot_row(const std::vector<double>& rho) {
  ++stamp_counter_;
  touched_.clear();
  for (int i = 0; i < m_; ++i) {
    const double ri = rho[i];
    if (ri == 0.0) continue;
    for (int k = row_start_[i]; k < row_start_[i + 1]; ++k) {
      const int c = row_col_[k];
      if (stamp_[c] != stamp_counter_) {
        stamp_[c] = stamp_counter_;
        alpha_row_[c] = 0.0;
        touched_.push_back(c);
      }
      alpha_row_[c] += ri * row_val_[k];
    }
  }
}

bool LpSolver::expand_blocking_boxes(double sign) {
  bool blocking = false;
  for (int c : touched_) {
    if (!boxed_[c] || state_[c] == VarState::kBasic) continue;
    const double a = sign * alpha_row_[c];
    if (std::abs(a) <= options_.pivot_tol) continue;
    if ((state_[c] == VarState::kUpper && a > 0) ||
        (state_[c] == VarState::kLower && a < 0)) {
      blocking = true;
    }
  }
  for (int i = 0; i < m_ && !blocking; ++i) {
    const int j = n_ + i;
    if (!boxed_[j] || state_[j] == VarState::kBasic || rho_[i] == 0.0) continue;
    const double a = -sign * rho_[i];
    if ((state_[j] == VarState::kUpper && a > 0) ||
        (state_[j] == VarState::kLower && a < 0)) {
      blocking = true;
    }
  }
  if (!blocking || box_size_ * 100.0 > kBoxLimit) return false;
  box_size_ *= 100.0;
  for (int j = 0; j < n_ + m_; ++j) {
    if (!boxed_[j]) continue;
    if (!std::isfinite(true_lo_[j])) {
      lo_[j] = std::isfinite(true_up_[j]) ? true_up_[j] - box_size_ : -box_size_;
    }
    if (!std::isfinite(true_up_[j])) {
      up_[j] = std::isfinite(true_lo_[j]) ? true_lo_[j] + box_size_ : box_size_;
    }
  }
  compute_primal();
  return true;
}

bool LpSolver::refresh() {
  refactor();
  compute_duals();
  repair_dual_feasibility();
  compute_primal();
  return true;
}

// Called when row `r` admits no entering candidate. Rounding noise in the
// basic value can look like a tiny infeasibility; recompute from a fresh
// factorization and, if the violation is within a loose tolerance, set the
// row aside until the next basis change. Returns true only for a genuine
// infeasibility.
bool LpSolver::confirm_infeasible(int r) {
  const int j = head_[r];
  auto violation = [&] {
    return std::max(lo_[j] - x_[j], x_[j] - up_[j]);
  };
  if (factor_->num_updates() > 0) {
    refresh();
    if (violation() <= options_.primal_tol) return false;
  }
  const double scale = 1.0 + std::max(std::abs(lo_[j]) < kInf ? std::abs(lo_[j]) : 0.0,
                                      std::abs(up_[j]) < kInf ? std::abs(up_[j]) : 0.0);
  if (violation() <= 1e-6 * scale) {
    tolerated_[r] = 1;
    any_tolerated_ = true;
    return false;
  }
  return true;
}

LpStatus LpSolver::dual_simplex() {
  int degenerate = 0;
  int numerical_retries = 0;
  const double ptol = options_.primal_tol;
  for (;;) {
    if (iterations_ >= options_.iteration_limit) return LpStatus::kIterationLimit;
    if ((iterations_ & 31) == 0 && time_exceeded()) return LpStatus::kTimeLimit;
    if (factor_->num_updates() >= options_.refactor_interval) refresh();
    if (primal_dirty_) compute_primal();

    const bool bland = degenerate > options_.stall_limit;
    int r = -1;
    double best = 0.0;
    for (int i = 0; i < m_; ++i) {
      const int j = head_[i];
      const double xv = x_[j];
      double infeas = 0.0;
      if (xv < lo_[j] - ptol) {
        infeas = lo_[j] - xv;
      } else if (xv > up_[j] + ptol) {
        infeas = xv - up_[j];
      } else {
        continue;
      }
      if (tolerated_[i]) continue;
      if (bland) {
        if (r < 0 || j < head_[r]) r = i;
      } else {
        const double score = infeas * infeas / dse_[i];
        if (score > best) {
          best = score;
          r = i;
        }
      }
    }
    if (r < 0) return LpStatus::kOptimal;

    const int leave = head_[r];
    const double sign = x_[leave] > up_[leave] ? 1.0 : -1.0;
    const double target = sign > 0 ? up_[leave] : lo_[leave];

    std::fill(rho_.begin(), rho_.end(), 0.0);
    rho_[r] = 1.0;
    factor_->btran(rho_);
    compute_pivot_row(rho_);

    // Harris two-pass ratio test over structurals (touched) and logicals.
    auto alpha_of = [&](int j) {
      return j >= n_ ? -rho_[j - n_] : alpha_row_[j];
    };
    // Dual slack consumed by the ratio test, or false if not eligible.
    auto eligible = [&](int j, double a, double& s) {
      switch (state_[j]) {
        case VarState::kLower: s = d_[j]; return a > 0;
        case VarState::kUpper: s = -d_[j]; return a < 0;
        case VarState::kFree: s = 0.0; return true;
        default: return false;
      }
    };
    double max_step = kInf;
    auto pass1 = [&](int j) {
      const double a = sign * alpha_of(j);
      double s = 0.0;
      if (std::abs(a) <= options_.pivot_tol || !eligible(j, a, s)) return;
      const double ratio = (std::max(s, 0.0) + options_.dual_tol) / std::abs(a);
      max_step = std::min(max_step, ratio);
    };
    for (int c : touched_) {
      if (state_[c] != VarState::kBasic) pass1(c);
    }
    for (int i = 0; i < m_; ++i) {
      if (rho_[i] != 0.0 && state_[n_ + i] != VarState::kBasic) pass1(n_ + i);
    }
    if (!std::isfinite(max_step)) {
      if (expand_blocking_boxes(sign)) continue;
      if (!confirm_infeasible(r)) continue;
      return LpStatus::kInfeasible;
    }
    int q = -1;
    double q_abs = 0.0;
    double q_ratio = kInf;
    auto pass2 = [&](int j) {
      const double a = sign * alpha_of(j);
      double s = 0.0;
      if (std::abs(a) <= options_.pivot_tol || !eligible(j, a, s)) return;
      const double ratio = std::max(s, 0.0) / std::abs(a);
      if (bland) {
        if (ratio < q_ratio - 1e-12 || (ratio <= q_ratio + 1e-12 && (q < 0 || j < q))) {
          q_ratio = std::min(q_ratio, ratio);
          q = j;
        }
        return;
      }
      if (ratio <= max_step && std::abs(a) > q_abs) {
        q_abs = std::abs(a);
        q = j;
      }
    };
    for (int c : touched_) {
      if (state_[c] != VarState::kBasic) pass2(c);
    }
    for (int i = 0; i < m_; ++i) {
      if (rho_[i] != 0.0 && state_[n_ + i] != VarState::kBasic) pass2(n_ + i);
    }
    if (q < 0) {
      if (expand_blocking_boxes(sign)) continue;
      if (!confirm_infeasible(r)) continue;
      return LpStatus::kInfeasible;
    }

    column(q, alpha_col_);
    factor_->ftran(alpha_col_);
    const double arq = alpha_col_[r];
    const double arq_row = alpha_of(q);
    if (std::abs(arq - arq_row) > 1e-7 * (1.0 + std::abs(arq)) ||
        std::abs(arq) < options_.pivot_tol) {
      if (factor_->num_updates() > 0 && numerical_retries < 3) {
        ++numerical_retries;
        refresh();
        continue;
      }
      if (std::abs(arq) < options_.pivot_tol) {
        diagnostics_ = "pivot " + std::to_string(arq) + " below tolerance";
        return LpStatus::kNumerical;
      }
    }
    numerical_retries = 0;

    // Dual step; a slightly negative slack (Harris) is absorbed by a shift.
    double dq = d_[q];
    {
      double s = 0.0;
      eligible(q, sign * arq_row, s);
      if (s < 0.0) {
        shift_[q] -= dq;
        dq = 0.0;
        d_[q] = 0.0;
      }
    }
    const double theta_d = dq / arq_row;
    if (theta_d != 0.0) {
      for (int c : touched_) {
        if (state_[c] != VarState::kBasic) d_[c] -= theta_d * alpha_row_[c];
      }
      for (int i = 0; i < m_; ++i) {
        if (rho_[i] != 0.0 && state_[n_ + i] != VarState::kBasic) {
          d_[n_ + i] += theta_d * rho_[i];
        }
      }
    }
    d_[leave] = -theta_d;
    d_[q] = 0.0;

    // Primal step.
    const double delta_q = (x_[leave] - target) / arq;
    for (int i = 0; i < m_; ++i) {
      if (alpha_col_[i] != 0.0) x_[head_[i]] -= alpha_col_[i] * delta_q;
    }
    x_[q] += delta_q;
    x_[leave] = target;

    // Dual steepest-edge weights.
    tau_ = rho_;
    factor_->ftran(tau_);
    double wr = 0.0;
    for (int i = 0; i < m_; ++i) wr += rho_[i] * rho_[i];
    for (int i = 0; i < m_; ++i) {
      if (i == r || alpha_col_[i] == 0.0) continue;
      const double ratio = alpha_col_[i] / arq;
      dse_[i] = std::max(dse_[i] - 2.0 * ratio * tau_[i] + ratio * ratio * wr,
                         1e-8);
    }
    dse_[r] = std::max(wr / (arq * arq), 1e-8);

    head_[r] = q;
    pos_[q] = r;
    pos_[leave] = -1;
    state_[q] = VarState::kBasic;
    lo_[q] = true_lo_[q];
    up_[q] = true_up_[q];
    boxed_[q] = 0;
    state_[leave] = lo_[leave] == up_[leave]
                        ? VarState::kFixed
                        : (sign > 0 ? VarState::kUpper : VarState::kLower);
    factor_->update(r, alpha_col_);
    ++iterations_;
    degenerate = std::abs(theta_d) < 1e-12 ? degenerate + 1 : 0;
    if (any_tolerated_) {
      std::fill(tolerated_.begin(), tolerated_.end(), 0);
      any_tolerated_ = false;
    }
  }
}

LpStatus LpSolver::primal_simplex() {
  int degenerate = 0;
  const double ptol = options_.primal_tol;
  const double dtol = options_.dual_tol;
  const int total = n_ + m_;
  for (;;) {
    if (iterations_ >= options_.iteration_limit) return LpStatus::kIterationLimit;
    if ((iterations_ & 31) == 0 && time_exceeded()) return LpStatus::kTimeLimit;
    if (factor_->num_updates() >= options_.refactor_interval) {
      refactor();
      compute_duals();
      compute_primal();
    }
    const bool bland = degenerate > options_.stall_limit;
    int q = -1;
    double best = 0.0;
    for (int j = 0; j < total; ++j) {
      const double dj = d_[j];
      bool eligible = false;
      switch (state_[j]) {
        case VarState::kLower: eligible = dj < -dtol; break;
        case VarState::kUpper: eligible = dj > dtol; break;
        case VarState::kFree: eligible = std::abs(dj) > dtol; break;
        default: break;
      }
      if (!eligible) continue;
      if (bland) {
        q = j;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
      }
    }
    if (q < 0) return LpStatus::kOptimal;

    const double dir = d_[q] < 0 ? 1.0 : -1.0;
    column(q, alpha_col_);
    factor_->ftran(alpha_col_);
    const double own_step = dir > 0 ? up_[q] - x_[q] : x_[q] - lo_[q];

    double max_step = kInf;
    for (int i = 0; i < m_; ++i) {
      const double rate = -alpha_col_[i] * dir;
      if (std::abs(rate) <= options_.pivot_tol) continue;
      const int j = head_[i];
      if (rate < 0 && std::isfinite(lo_[j])) {
        max_step = std::min(max_step, (x_[j] - lo_[j] + ptol) / -rate);
      } else if (rate > 0 && std::isfinite(up_[j])) {
        max_step = std::min(max_step, (up_[j] - x_[j] + ptol) / rate);
      }
    }
    int r = -1;
    double r_abs = 0.0;
    double r_step = kInf;
    for (int i = 0; i < m_; ++i) {
      const double rate = -alpha_col_[i] * dir;
      if (std::abs(rate) <= options_.pivot_tol) continue;
      const int j = head_[i];
      double step = kInf;
      if (rate < 0 && std::isfinite(lo_[j])) {
        step = std::max(x_[j] - lo_[j], 0.0) / -rate;
      } else if (rate > 0 && std::isfinite(up_[j])) {
        step = std::max(up_[j] - x_[j], 0.0) / rate;
      } else {
        continue;
      }
      if (bland) {
        if (step < r_step - 1e-12 || (step <= r_step + 1e-12 && (r < 0 || j < head_[r]))) {
          r_step = std::min(r_step, step);
          r = i;
        }
      } else if (step <= max_step && std::abs(rate) > r_abs) {
        r_abs = std::abs(rate);
        r = i;
        r_step = step;
      }
    }
    if (r < 0 && !std::isfinite(own_step)) return LpStatus::kUnbounded;

    if (r < 0 || own_step <= r_step) {
      // Bound flip of the entering variable.
      const double t = own_step;
      for (int i = 0; i < m_; ++i) {
        if (alpha_col_[i] != 0.0) x_[head_[i]] -= alpha_col_[i] * dir * t;
      }
      state_[q] = dir > 0 ? VarState::kUpper : VarState::kLower;
      x_[q] = dir > 0 ? up_[q] : lo_[q];
      ++iterations_;
      degenerate = 0;
      continue;
    }

    const double t = r_step;
    const int leave = head_[r];
    const double rate_r = -alpha_col_[r] * dir;
    for (int i = 0; i < m_; ++i) {
      if (alpha_col_[i] != 0.0) x_[head_[i]] -= alpha_col_[i] * dir * t;
    }
    x_[q] += dir * t;
    x_[leave] = rate_r < 0 ? lo_[leave] : up_[leave];

    std::fill(rho_.begin(), rho_.end(), 0.0);
    rho_[r] = 1.0;
    factor_->btran(rho_);
    compute_pivot_row(rho_);
    const double arq = alpha_col_[r];
    const double theta_d = d_[q] / arq;
    for (int c : touched_) {
      if (state_[c] != VarState::kBasic) d_[c] -= theta_d * alpha_row_[c];
    }
    for (int i = 0; i < m_; ++i) {
      if (rho_[i] != 0.0 && state_[n_ + i] != VarState::kBasic) {
        d_[n_ + i] += theta_d * rho_[i];
      }
    }
    d_[leave] = -theta_d;
    d_[q] = 0.0;

    head_[r] = q;
    pos_[q] = r;
    pos_[leave] = -1;
    state_[q] = VarState::kBasic;
    state_[leave] = lo_[leave] == up_[leave]
                        ? VarState::kFixed
                        : (rate_r < 0 ? VarState::kLower : VarState::kUpper);
    dse_[r] = 1.0;
    factor_->update(r, alpha_col_);
    ++iterations_;
    degenerate = t < 1e-12 ? degenerate + 1 : 0;
  }
}

// Removes artificial boxes and cost shifts after the dual phase. Returns true
// in `need_primal` when the remaining reduced costs are not optimal for the
// true problem.
void LpSolver::resolve_artificial(bool& need_primal) {
  need_primal = false;
  const int total = n_ + m_;
  bool shifted = false;
  for (int j = 0; j < total; ++j) {
    if (shift_[j] != 0.0) {
      shifted = true;
      shift_[j] = 0.0;
    }
  }
  if (shifted) compute_duals();
  for (int j = 0; j < total; ++j) {
    if (!boxed_[j]) continue;
    boxed_[j] = 0;
    lo_[j] = true_lo_[j];
    up_[j] = true_up_[j];
    if (state_[j] != VarState::kBasic) state_[j] = VarState::kFree;
  }
  const double tol = options_.dual_tol;
  for (int j = 0; j < total && !need_primal; ++j) {
    switch (state_[j]) {
      case VarState::kLower: need_primal = d_[j] < -tol; break;
      case VarState::kUpper: need_primal = d_[j] > tol; break;
      case VarState::kFree: need_primal = std::abs(d_[j]) > tol; break;
      default: break;
    }
  }
}

LpStatus LpSolver::run() {
  start_time_ = now_seconds();
  if (!have_basis_) {
    install_slack_basis();
    have_basis_ = true;
    factor_valid_ = false;
  }
  if (!factor_valid_) refactor();
  std::fill(shift_.begin(), shift_.end(), 0.0);
  compute_duals();
  place_nonbasic_dual_feasible();
  compute_primal();
  LpStatus st = dual_simplex();
  if (st != LpStatus::kOptimal) return st;
  bool need_primal = false;
  resolve_artificial(need_primal);
  if (!need_primal) return LpStatus::kOptimal;
  compute_primal();
  return primal_simplex();
}

LpStatus LpSolver::solve() { return run(); }

LpStatus LpSolver::solve_from(const Basis& basis) {
  if (static_cast<int>(basis.head.size()) == m_ &&
      static_cast<int>(basis.state.size()) == n_ + m_) {
    head_ = basis.head;
    state_ = basis.state;
    std::fill(pos_.begin(), pos_.end(), -1);
    for (int i = 0; i < m_; ++i) pos_[head_[i]] = i;
    std::fill(dse_.begin(), dse_.end(), 1.0);
    have_basis_ = true;
    factor_valid_ = false;
  }
  return run();
}

void LpSolver::set_bounds(int j, double lower, double upper) {
  true_lo_[j] = lower;
  true_up_[j] = upper;
  if (state_[j] == VarState::kBasic) {
    lo_[j] = lower;
    up_[j] = upper;
    boxed_[j] = 0;
  }
  primal_dirty_ = true;
}

Basis LpSolver::basis() const { return {head_, state_}; }

double LpSolver::objective() const {
  double obj = offset_;
  for (int j = 0; j < n_; ++j) obj += cost_[j] * x_[j];
  return obj;
}

double LpSolver::dual_bound() const {
  double bound = offset_;
  for (int j = 0; j < n_ + m_; ++j) {
    const double dj = state_[j] == VarState::kBasic ? 0.0 : d_[j];
    if (dj > 1e-9) {
      if (!std::isfinite(true_lo_[j])) return -kInf;
      bound += dj * true_lo_[j];
    } else if (dj < -1e-9) {
      if (!std::isfinite(true_up_[j])) return -kInf;
      bound += dj * true_up_[j];
    } else {
      bound += dj * x_[j];
    }
  }
  return bound;
}

std::vector<double> LpSolver::primal() const {
  return {x_.begin(), x_.begin() + n_};
}

std::vector<double> LpSolver::row_duals() const {
  std::vector<double> y(m_);
  for (int i = 0; i < m_; ++i) y[i] = cost_[head_[i]];
  factor_->btran(y);
  return y;
}

std::vector<double> LpSolver::reduced_costs() const {
  return {d_.begin(), d_.begin() + n_};
}

MilpSolution solve_lp(const MilpModel& model, const LpOptions& options) {
  const double t0 = now_seconds();
  LpSolver lp(model, options);
  const LpStatus st = lp.solve();
  MilpSolution sol;
  sol.lp_iterations = lp.iterations();
  switch (st) {
    case LpStatus::kOptimal:
      sol.status = Status::kOptimal;
      sol.values = lp.primal();
      sol.objective = lp.objective();
      sol.bound = std::min(lp.dual_bound(), sol.objective);
      sol.gap = relative_gap(sol.objective, sol.bound);
      break;
    case LpStatus::kInfeasible: sol.status = Status::kInfeasible; break;
    case LpStatus::kUnbounded:
      sol.status = Status::kUnbounded;
      sol.objective = -kInf;
      break;
    case LpStatus::kIterationLimit:
    case LpStatus::kTimeLimit: sol.status = Status::kTimeLimit; break;
    case LpStatus::kNumerical:
      throw Error("lp.numerical", "simplex breakdown (" + lp.diagnostics() +
                                      ") after " +
                                      std::to_string(lp.iterations()) +
                                      " iterations");
  }
  sol.wall_seconds = now_seconds() - t0;
  return sol;
}

}  // namespace ucflex::milp
