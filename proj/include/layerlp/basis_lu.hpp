#pragma once

#include <Eigen/Core>
#include <Eigen/Sparse>

#include <vector>

namespace layerlp {

// Sparse LU factorization tuned for simplex basis matrices: mostly slack and
// near-triangular columns with a small irreducible kernel. Pivots are found
// by peeling column and row singletons (both fill-free), then by a Markowitz
// style rule with threshold pivoting on whatever kernel remains.
//
// Deterministic: all scans run in fixed index order.
class BasisLu {
 public:
  // Factorizes the m x m matrix held column-wise. Returns false when the
  // matrix is numerically singular.
  bool factorize(const Eigen::SparseMatrix<double>& matrix);

  // x = B^{-1} b, in place.
  void ftran(Eigen::VectorXd& b) const;

  // y = B^{-T} c, in place.
  void btran(Eigen::VectorXd& c) const;

  int size() const { return m_; }

 private:
  struct Entry {
    int index = 0;  // original row (L) or original column (U)
    double value = 0.0;
  };

  int m_ = 0;
  std::vector<int> pivot_row_;     // per elimination step
  std::vector<int> pivot_col_;
  std::vector<double> pivot_val_;
  // L multipliers per step (unit diagonal implicit); U off-pivot row entries
  // per step. Flat storage with per-step offsets.
  std::vector<Entry> l_entries_, u_entries_;
  std::vector<int> l_start_, u_start_;
};

}  // namespace layerlp
