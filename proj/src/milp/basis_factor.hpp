#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <vector>

namespace ucflex::milp::detail {

// Sparse column-compressed storage of the structural constraint matrix.
struct CscMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> start;
  std::vector<int> index;
  std::vector<double> value;
};

// LU factorization of the basis matrix with product-form eta updates between
// refactorizations. Logical column i is -e_i. Rows whose logical is basic are
// eliminated up front, so only the square block of basic structural columns
// against the remaining rows is factorized.
class BasisFactor {
 public:
  // Returns false when the basis is numerically singular.
  bool factorize(const CscMatrix& a, const std::vector<int>& head);

  void ftran(std::vector<double>& x) const;
  void btran(std::vector<double>& y) const;

  // Replaces basis position `r` by a column whose ftran image is `alpha`.
  void update(int r, const std::vector<double>& alpha);

  int num_updates() const { return static_cast<int>(etas_.size()); }

 private:
  struct Eta {
    int pivot_row;
    double pivot;
    std::vector<int> index;
    std::vector<double> value;
  };

  void solve_kernel(std::vector<double>& x) const;
  void solve_kernel_transposed(std::vector<double>& y) const;

  int m_ = 0;
  const CscMatrix* a_ = nullptr;
  std::vector<int> struct_pos_;   // kernel column -> basis position
  std::vector<int> struct_col_;   // kernel column -> structural index
  std::vector<int> kernel_row_;   // kernel row -> constraint row
  std::vector<int> row_kernel_;   // constraint row -> kernel row or -1
  std::vector<int> logical_pos_;  // constraint row -> basis position of its logical, or -1
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  mutable Eigen::VectorXd work_;
  mutable std::vector<double> scratch_;
};

}  // namespace ucflex::milp::detail
