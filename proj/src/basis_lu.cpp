#include "layerlp/basis_lu.hpp"

#include <cmath>
#include <cstdlib>

namespace layerlp {

namespace {
constexpr double kPivotFloor = 1e-11;
}

bool BasisLu::factorize(const Eigen::SparseMatrix<double>& matrix) {
  m_ = static_cast<int>(matrix.rows());
  pivot_row_.assign(m_, -1);
  pivot_col_.assign(m_, -1);
  pivot_val_.assign(m_, 0.0);
  l_entries_.clear();
  u_entries_.clear();
  l_start_.assign(m_ + 1, 0);
  u_start_.assign(m_ + 1, 0);
  if (m_ == 0) return true;

  // Active matrix, row-wise with exact entries; col_rows is a lazy superset.
  std::vector<std::vector<Entry>> rows(m_);
  std::vector<std::vector<int>> col_rows(m_);
  std::vector<int> col_nnz(m_, 0);
  std::vector<char> row_active(m_, 1), col_active(m_, 1);

  for (int c = 0; c < m_; ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(matrix, c); it; ++it) {
      if (it.value() == 0.0) continue;
      rows[it.row()].push_back({c, it.value()});
      col_rows[c].push_back(static_cast<int>(it.row()));
      ++col_nnz[c];
    }

  std::vector<int> col_queue, row_queue;
  for (int c = 0; c < m_; ++c)
    if (col_nnz[c] == 1) col_queue.push_back(c);
  for (int r = 0; r < m_; ++r)
    if (rows[r].size() == 1) row_queue.push_back(r);

  auto find_in_row = [&rows](int r, int c) -> int {
    for (std::size_t idx = 0; idx < rows[r].size(); ++idx)
      if (rows[r][idx].index == c) return static_cast<int>(idx);
    return -1;
  };

  int next_kernel_col = 0;  // rotating start for the kernel scan

  for (int k = 0; k < m_; ++k) {
    int pr = -1, pc = -1;
    double pv = 0.0;

    // Fill-free pivots first: column singletons, then row singletons.
    while (!col_queue.empty() && pr < 0) {
      const int c = col_queue.back();
      col_queue.pop_back();
      if (!col_active[c] || col_nnz[c] != 1) continue;
      for (int r : col_rows[c]) {
        if (!row_active[r]) continue;
        const int idx = find_in_row(r, c);
        if (idx < 0) continue;
        if (std::abs(rows[r][idx].value) >= kPivotFloor) {
          pr = r;
          pc = c;
          pv = rows[r][idx].value;
        }
        break;  // the single active entry, usable or not
      }
    }
    while (!row_queue.empty() && pr < 0) {
      const int r = row_queue.back();
      row_queue.pop_back();
      if (!row_active[r] || rows[r].size() != 1) continue;
      if (std::abs(rows[r][0].value) < kPivotFloor) continue;
      pr = r;
      pc = rows[r][0].index;
      pv = rows[r][0].value;
    }

    // Kernel: smallest active column count, largest magnitude within it.
    if (pr < 0) {
      int best_c = -1;
      for (int scan = 0; scan < m_; ++scan) {
        const int c = (next_kernel_col + scan) % m_;
        if (!col_active[c]) continue;
        if (best_c == -1 || col_nnz[c] < col_nnz[best_c]) best_c = c;
        if (col_nnz[best_c] <= 2) break;
      }
      if (best_c >= 0) {
        next_kernel_col = best_c;
        for (int r : col_rows[best_c]) {
          if (!row_active[r]) continue;
          const int idx = find_in_row(r, best_c);
          if (idx < 0) continue;
          const double v = rows[r][idx].value;
          if (std::abs(v) < kPivotFloor) continue;
          if (pr < 0 || std::abs(v) > std::abs(pv) || (std::abs(v) == std::abs(pv) && r < pr)) {
            pr = r;
            pc = best_c;
            pv = v;
          }
        }
      }
      // A failed minimum-count column falls through to a full search.
      if (pr < 0) {
        for (int c = 0; c < m_ && pr < 0; ++c) {
          if (!col_active[c]) continue;
          for (int r : col_rows[c]) {
            if (!row_active[r]) continue;
            const int idx = find_in_row(r, c);
            if (idx < 0) continue;
            const double v = rows[r][idx].value;
            if (std::abs(v) < kPivotFloor) continue;
            if (pr < 0 || std::abs(v) > std::abs(pv)) {
              pr = r;
              pc = c;
              pv = v;
            }
          }
        }
      }
      if (pr < 0) return false;  // numerically singular
    }

    pivot_row_[k] = pr;
    pivot_col_[k] = pc;
    pivot_val_[k] = pv;

    // U keeps the pivot row's remaining entries.
    for (const Entry& e : rows[pr])
      if (e.index != pc) u_entries_.push_back(e);
    u_start_[k + 1] = static_cast<int>(u_entries_.size());

    // Eliminate the pivot column from every other active row.
    for (int i : col_rows[pc]) {
      if (!row_active[i] || i == pr) continue;
      const int idx = find_in_row(i, pc);
      if (idx < 0) continue;
      const double multiplier = rows[i][idx].value / pv;
      rows[i][idx] = rows[i].back();
      rows[i].pop_back();
      --col_nnz[pc];
      if (multiplier == 0.0) {
        if (rows[i].size() == 1) row_queue.push_back(i);
        continue;
      }
      l_entries_.push_back({i, multiplier});
      for (const Entry& e : rows[pr]) {
        if (e.index == pc) continue;
        const int pos = find_in_row(i, e.index);
        if (pos >= 0) {
          rows[i][pos].value -= multiplier * e.value;
        } else {
          rows[i].push_back({e.index, -multiplier * e.value});
          col_rows[e.index].push_back(i);
          ++col_nnz[e.index];
        }
      }
      if (rows[i].size() == 1) row_queue.push_back(i);
    }
    l_start_[k + 1] = static_cast<int>(l_entries_.size());

    // Deactivate the pivot row and column.
    row_active[pr] = 0;
    col_active[pc] = 0;
    for (const Entry& e : rows[pr]) {
      if (e.index == pc) continue;
      if (--col_nnz[e.index] == 1) col_queue.push_back(e.index);
    }
    rows[pr].clear();
    rows[pr].shrink_to_fit();
  }
  return true;
}

void BasisLu::ftran(Eigen::VectorXd& b) const {
  // Forward: L scatter in elimination order.
  for (int k = 0; k < m_; ++k) {
    const double bk = b[pivot_row_[k]];
    if (bk == 0.0) continue;
    for (int e = l_start_[k]; e < l_start_[k + 1]; ++e) b[l_entries_[e].index] -= l_entries_[e].value * bk;
  }
  // Backward: U gather; x lives on the pivot columns.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m_);
  for (int k = m_ - 1; k >= 0; --k) {
    double s = b[pivot_row_[k]];
    for (int e = u_start_[k]; e < u_start_[k + 1]; ++e) s -= u_entries_[e].value * x[u_entries_[e].index];
    x[pivot_col_[k]] = s / pivot_val_[k];
  }
  b = std::move(x);
}

void BasisLu::btran(Eigen::VectorXd& c) const {
  // U^T scatter in elimination order.
  Eigen::VectorXd w(m_);
  for (int k = 0; k < m_; ++k) {
    const double wk = c[pivot_col_[k]] / pivot_val_[k];
    w[k] = wk;
    if (wk == 0.0) continue;
    for (int e = u_start_[k]; e < u_start_[k + 1]; ++e) c[u_entries_[e].index] -= u_entries_[e].value * wk;
  }
  // L^T gather in reverse order; y lives on the pivot rows.
  Eigen::VectorXd y(m_);
  for (int k = m_ - 1; k >= 0; --k) {
    double s = w[k];
    for (int e = l_start_[k]; e < l_start_[k + 1]; ++e) s -= l_entries_[e].value * y[l_entries_[e].index];
    y[pivot_row_[k]] = s;
  }
  c = std::move(y);
}

}  // namespace layerlp
