#include "basis_factor.hpp"

#include <cmath>

namespace ucflex::milp::detail {

bool BasisFactor::factorize(const CscMatrix& a, const std::vector<int>& head) {
  m_ = a.rows;
  a_ = &a;
  etas_.clear();
  struct_pos_.clear();
  struct_col_.clear();
  kernel_row_.clear();
  row_kernel_.assign(m_, -1);
  logical_pos_.assign(m_, -1);
  scratch_.assign(m_, 0.0);
  if (m_ == 0) return true;
  for (int pos = 0; pos < m_; ++pos) {
    const int j = head[pos];
    if (j >= a.cols) {
      logical_pos_[j - a.cols] = pos;
    } else {
      struct_pos_.push_back(pos);
      struct_col_.push_back(j);
    }
  }
  for (int r = 0; r < m_; ++r) {
    if (logical_pos_[r] < 0) {
      row_kernel_[r] = static_cast<int>(kernel_row_.size());
      kernel_row_.push_back(r);
    }
  }
  const int k = static_cast<int>(struct_col_.size());
  if (static_cast<int>(kernel_row_.size()) != k) return false;
  work_.resize(k);
  if (k == 0) return true;

  std::vector<Eigen::Triplet<double>> trip;
  for (int c = 0; c < k; ++c) {
    const int j = struct_col_[c];
    for (int q = a.start[j]; q < a.start[j + 1]; ++q) {
      const int kr = row_kernel_[a.index[q]];
      if (kr >= 0) trip.emplace_back(kr, c, a.value[q]);
    }
  }
  Eigen::SparseMatrix<double> b(k, k);
  b.setFromTriplets(trip.begin(), trip.end());
  b.makeCompressed();
  lu_.analyzePattern(b);
  lu_.factorize(b);
  if (lu_.info() != Eigen::Success) return false;
  // SparseLU accepts tiny pivots; reject bases that are numerically singular.
  const double det = lu_.logAbsDeterminant();
  if (!std::isfinite(det)) return false;
  return true;
}

// Row-indexed right-hand side in, position-indexed solution out.
void BasisFactor::solve_kernel(std::vector<double>& x) const {
  const int k = static_cast<int>(struct_col_.size());
  for (int c = 0; c < k; ++c) work_[c] = x[kernel_row_[c]];
  if (k > 0) work_ = lu_.solve(work_);
  // Logical rows: A_r z_S - z_r = b_r.
  std::vector<double>& z = scratch_;
  for (int r = 0; r < m_; ++r) z[r] = logical_pos_[r] >= 0 ? -x[r] : 0.0;
  for (int c = 0; c < k; ++c) {
    const double v = work_[c];
    if (v == 0.0) continue;
    const int j = struct_col_[c];
    for (int q = a_->start[j]; q < a_->start[j + 1]; ++q) {
      const int r = a_->index[q];
      if (logical_pos_[r] >= 0) z[r] += a_->value[q] * v;
    }
  }
  for (int r = 0; r < m_; ++r) {
    if (logical_pos_[r] >= 0) x[logical_pos_[r]] = z[r];
  }
  for (int c = 0; c < k; ++c) x[struct_pos_[c]] = work_[c];
}

// Position-indexed right-hand side in, row-indexed solution out.
void BasisFactor::solve_kernel_transposed(std::vector<double>& y) const {
  const int k = static_cast<int>(struct_col_.size());
  std::vector<double>& w = scratch_;
  for (int r = 0; r < m_; ++r) w[r] = logical_pos_[r] >= 0 ? -y[logical_pos_[r]] : 0.0;
  for (int c = 0; c < k; ++c) {
    const int j = struct_col_[c];
    double rhs = y[struct_pos_[c]];
    for (int q = a_->start[j]; q < a_->start[j + 1]; ++q) {
      const int r = a_->index[q];
      if (logical_pos_[r] >= 0) rhs -= a_->value[q] * w[r];
    }
    work_[c] = rhs;
  }
  if (k > 0) work_ = lu_.transpose().solve(work_);
  for (int c = 0; c < k; ++c) w[kernel_row_[c]] = work_[c];
  y.swap(w);
  w.resize(m_);
}

void BasisFactor::ftran(std::vector<double>& x) const {
  if (m_ == 0) return;
  solve_kernel(x);
  for (const Eta& e : etas_) {
    const double xr = x[e.pivot_row] / e.pivot;
    if (xr != 0.0) {
      for (std::size_t k = 0; k < e.index.size(); ++k) {
        x[e.index[k]] -= e.value[k] * xr;
      }
    }
    x[e.pivot_row] = xr;
  }
}

void BasisFactor::btran(std::vector<double>& y) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = y[it->pivot_row];
    for (std::size_t k = 0; k < it->index.size(); ++k) {
      s -= it->value[k] * y[it->index[k]];
    }
    y[it->pivot_row] = s / it->pivot;
  }
  solve_kernel_transposed(y);
}

void BasisFactor::update(int r, const std::vector<double>& alpha) {
  Eta e;
  e.pivot_row = r;
  e.pivot = alpha[r];
  for (int i = 0; i < m_; ++i) {
    if (i != r && std::abs(alpha[i]) > 1e-14) {
      e.index.push_back(i);
      e.value.push_back(alpha[i]);
    }
  }
  etas_.push_back(std::move(e));
}

}  // namespace ucflex::milp::detail
