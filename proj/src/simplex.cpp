#include "layerlp/simplex.hpp"

#include "layerlp/basis_lu.hpp"

#include <Eigen/Sparse>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace layerlp {

std::string status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::IterationLimit: return "iteration_limit";
  }
  return "?";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-10;
constexpr double kRatioTie = 1e-12;
constexpr int kRefactorInterval = 64;
constexpr int kStallThreshold = 40000;

enum class ColStatus : std::uint8_t { AtLower, AtUpper, Basic };

struct Eta {
  int row = 0;
  double pivot = 0.0;
  std::vector<std::pair<int, double>> entries;  // excludes the pivot row
};

class Simplex {
 public:
  Simplex(const LpProblem& problem, const SolveOptions& options)
      : opts_(options), n_struct_(problem.num_vars), m_(static_cast<int>(problem.rows.size())) {
    ncols_ = n_struct_ + m_;
    lo_.resize(ncols_);
    up_.resize(ncols_);
    cost_ = Eigen::VectorXd::Zero(ncols_);
    b_.resize(m_);

    for (int v = 0; v < n_struct_; ++v) {
      lo_[v] = problem.lower[v];
      up_[v] = problem.upper[v];
      if (!std::isfinite(lo_[v]) && !std::isfinite(up_[v]))
        throw std::invalid_argument("solve: variable " + std::to_string(v) + " is free (unsupported)");
      if (lo_[v] > up_[v])
        throw std::invalid_argument("solve: variable " + std::to_string(v) + " has lower > upper");
    }
    for (const auto& [var, coeff] : problem.objective) cost_[var] += coeff;

    std::vector<Eigen::Triplet<double>> trips;
    for (int r = 0; r < m_; ++r) {
      const ConstraintRow& row = problem.rows[r];
      for (const auto& [var, coeff] : row.coeffs) trips.emplace_back(r, var, coeff);
      const int slack = n_struct_ + r;
      switch (row.relation) {
        case Relation::LessEqual:
          trips.emplace_back(r, slack, 1.0);
          lo_[slack] = 0.0;
          up_[slack] = kInf;
          break;
        case Relation::GreaterEqual:
          trips.emplace_back(r, slack, -1.0);
          lo_[slack] = 0.0;
          up_[slack] = kInf;
          break;
        case Relation::Equal:
          trips.emplace_back(r, slack, 1.0);
          lo_[slack] = 0.0;
          up_[slack] = 0.0;
          break;
      }
      b_[r] = row.rhs;
    }
    A_.resize(m_, ncols_);
    A_.setFromTriplets(trips.begin(), trips.end());
    A_.makeCompressed();

    max_iters_ = opts_.max_iters > 0 ? opts_.max_iters : 20'000 + 40 * static_cast<std::int64_t>(m_ + ncols_);
  }

  LpSolution run(const LpProblem& problem) {
    init_basis();
    const SolveStatus status = iterate();

    LpSolution sol;
    sol.status = status;
    sol.iterations = iterations_;
    sol.values = Eigen::VectorXd::Zero(n_struct_);
    if (status == SolveStatus::Optimal || status == SolveStatus::IterationLimit) {
      const Eigen::VectorXd full = current_point();
      sol.values = full.head(n_struct_);
      sol.objective = objective_value(problem, sol.values);
      sol.max_constraint_violation = constraint_violation(problem, sol.values);
    }
    return sol;
  }

 private:
  // --- basis and factorization ---------------------------------------------

  void init_basis() {
    col_status_.assign(ncols_, ColStatus::AtLower);
    for (int v = 0; v < ncols_; ++v)
      col_status_[v] = std::isfinite(lo_[v]) ? ColStatus::AtLower : ColStatus::AtUpper;
    basic_.resize(m_);
    for (int r = 0; r < m_; ++r) {
      basic_[r] = n_struct_ + r;
      col_status_[n_struct_ + r] = ColStatus::Basic;
    }
    refactorize();
  }

  double nonbasic_value(int col) const { return col_status_[col] == ColStatus::AtUpper ? up_[col] : lo_[col]; }

  void refactorize() {
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(static_cast<std::size_t>(m_) * 3);
    for (int r = 0; r < m_; ++r) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(A_, basic_[r]); it; ++it)
        trips.emplace_back(it.row(), r, it.value());
    }
    Eigen::SparseMatrix<double> B(m_, m_);
    B.setFromTriplets(trips.begin(), trips.end());
    B.makeCompressed();
    if (!lu_.factorize(B)) throw std::runtime_error("solve: basis factorization failed");
    etas_.clear();
    recompute_basic_values();
  }

  void recompute_basic_values() {
    Eigen::VectorXd rhs = b_;
    for (int col = 0; col < ncols_; ++col) {
      if (col_status_[col] == ColStatus::Basic) continue;
      const double x = nonbasic_value(col);
      if (x == 0.0) continue;
      for (Eigen::SparseMatrix<double>::InnerIterator it(A_, col); it; ++it) rhs[it.row()] -= it.value() * x;
    }
    xB_ = ftran(rhs);
  }

  Eigen::VectorXd ftran(const Eigen::VectorXd& v) {
    Eigen::VectorXd x = v;
    lu_.ftran(x);
    for (const Eta& eta : etas_) {
      const double xr = x[eta.row] / eta.pivot;
      x[eta.row] = xr;
      if (xr != 0.0)
        for (const auto& [row, val] : eta.entries) x[row] -= val * xr;
    }
    return x;
  }

  Eigen::VectorXd btran(const Eigen::VectorXd& v) {
    Eigen::VectorXd y = v;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double dot = 0.0;
      for (const auto& [row, val] : it->entries) dot += val * y[row];
      y[it->row] = (y[it->row] - dot) / it->pivot;
    }
    lu_.btran(y);
    return y;
  }

  Eigen::VectorXd column(int col) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m_);
    for (Eigen::SparseMatrix<double>::InnerIterator it(A_, col); it; ++it) v[it.row()] = it.value();
    return v;
  }

  Eigen::VectorXd current_point() const {
    Eigen::VectorXd x(ncols_);
    for (int col = 0; col < ncols_; ++col) x[col] = col_status_[col] == ColStatus::Basic ? 0.0 : nonbasic_value(col);
    for (int r = 0; r < m_; ++r) x[basic_[r]] = xB_[r];
    return x;
  }

  // --- infeasibility bookkeeping --------------------------------------------

  double basic_violation(int r) const {
    const int col = basic_[r];
    if (xB_[r] < lo_[col]) return lo_[col] - xB_[r];
    if (xB_[r] > up_[col]) return xB_[r] - up_[col];
    return 0.0;
  }

  double worst_violation() const {
    double worst = 0.0;
    for (int r = 0; r < m_; ++r) worst = std::max(worst, basic_violation(r));
    return worst;
  }

  // --- main loop -------------------------------------------------------------

  SolveStatus iterate() {
    bool bland = false;
    int degenerate_run = 0;
    int fresh_checks = 0;

    // Deterministic cost perturbation breaks the massive plateau ties of
    // total-variation objectives; a clean-up pass with the true costs runs
    // once the perturbed problem is optimal, so reported solutions are exact.
    bool perturbed = true;
    Eigen::VectorXd price_cost = cost_;
    {
      const double scale = 1e-9 * (1.0 + cost_.cwiseAbs().maxCoeff());
      std::uint64_t h = 0x9e3779b97f4a7c15ULL;
      for (int col = 0; col < ncols_; ++col) {
        h ^= h >> 12, h ^= h << 25, h ^= h >> 27;
        price_cost[col] += scale * (1.0 + double(h % 1024) / 1024.0);
      }
    }

    while (true) {
      if (iterations_ >= max_iters_) return SolveStatus::IterationLimit;

      const bool phase1 = worst_violation() > opts_.feas_tol;

      // Pricing vector: phase 1 prices the infeasibility gradient, phase 2
      // the (perturbed, then true) costs.
      Eigen::VectorXd cb = Eigen::VectorXd::Zero(m_);
      if (phase1) {
        for (int r = 0; r < m_; ++r) {
          const int col = basic_[r];
          if (xB_[r] < lo_[col] - opts_.feas_tol)
            cb[r] = -1.0;
          else if (xB_[r] > up_[col] + opts_.feas_tol)
            cb[r] = 1.0;
        }
      } else {
        const Eigen::VectorXd& active = perturbed ? price_cost : cost_;
        for (int r = 0; r < m_; ++r) cb[r] = active[basic_[r]];
      }
      const Eigen::VectorXd y = btran(cb);

      // Entering variable: Dantzig rule, ties to the lowest index; Bland's
      // first-eligible rule while stalled on degenerate pivots.
      int entering = -1;
      double best_improvement = opts_.opt_tol;
      for (int col = 0; col < ncols_; ++col) {
        if (col_status_[col] == ColStatus::Basic || lo_[col] == up_[col]) continue;
        double dj = phase1 ? 0.0 : (perturbed ? price_cost[col] : cost_[col]);
        for (Eigen::SparseMatrix<double>::InnerIterator it(A_, col); it; ++it) dj -= y[it.row()] * it.value();
        const bool eligible = col_status_[col] == ColStatus::AtLower ? dj < -opts_.opt_tol : dj > opts_.opt_tol;
        if (!eligible) continue;
        if (bland) {
          entering = col;
          break;
        }
        if (std::abs(dj) > best_improvement) {
          best_improvement = std::abs(dj);
          entering = col;
        }
      }

      if (entering < 0) {
        if (!phase1 && perturbed) {
          // Perturbed problem solved; finish on the true costs.
          perturbed = false;
          fresh_checks = 0;
          continue;
        }
        // Verify the verdict on a fresh factorization before reporting.
        if (!etas_.empty() && fresh_checks < 3) {
          ++fresh_checks;
          refactorize();
          continue;
        }
        return phase1 ? SolveStatus::Infeasible : SolveStatus::Optimal;
      }
      fresh_checks = 0;

      const double dir = col_status_[entering] == ColStatus::AtLower ? 1.0 : -1.0;
      const Eigen::VectorXd alpha = ftran(column(entering));

      // Ratio test, pass 1: the smallest blocking step. Infeasible basics
      // (phase 1) block once they reach the violated bound; feasible basics
      // block at the bound they move toward.
      double min_ratio = kInf;
      for (int r = 0; r < m_; ++r) {
        const double a = alpha[r];
        if (std::abs(a) <= kPivotTol) continue;
        const int col = basic_[r];
        const double delta = -dir * a;
        double limit = kInf;
        if (phase1 && xB_[r] < lo_[col] - opts_.feas_tol) {
          if (delta > 0) limit = (lo_[col] - xB_[r]) / delta;
        } else if (phase1 && xB_[r] > up_[col] + opts_.feas_tol) {
          if (delta < 0) limit = (xB_[r] - up_[col]) / (-delta);
        } else if (delta > 0) {
          if (std::isfinite(up_[col])) limit = (up_[col] - xB_[r]) / delta;
        } else if (std::isfinite(lo_[col])) {
          limit = (xB_[r] - lo_[col]) / (-delta);
        }
        min_ratio = std::min(min_ratio, std::max(limit, 0.0));
      }

      const double own_range = up_[entering] - lo_[entering];
      if (own_range <= min_ratio) {
        // Bound flip: cheapest when the entering variable's own range binds.
        if (!std::isfinite(own_range)) {
          if (phase1) {
            if (fresh_checks < 3) {
              ++fresh_checks;
              refactorize();
              continue;
            }
            return SolveStatus::IterationLimit;  // numerically stuck
          }
          return SolveStatus::Unbounded;
        }
        ++iterations_;
        if (own_range > kDegenerateStep) {
          degenerate_run = 0;
          bland = false;
        } else if (++degenerate_run > kStallThreshold) {
          bland = true;
        }
        if (own_range != 0.0) xB_ -= (dir * own_range) * alpha;
        col_status_[entering] =
            col_status_[entering] == ColStatus::AtLower ? ColStatus::AtUpper : ColStatus::AtLower;
        continue;
      }

      // Pass 2: among rows within the ratio tie window pick the largest
      // pivot (Bland mode: the lowest basic variable index).
      int leaving_row = -1;
      bool leaving_to_upper = false;
      double best_pivot_mag = 0.0;
      for (int r = 0; r < m_; ++r) {
        const double a = alpha[r];
        if (std::abs(a) <= kPivotTol) continue;
        const int col = basic_[r];
        const double delta = -dir * a;
        double limit = kInf;
        bool to_upper = false;
        if (phase1 && xB_[r] < lo_[col] - opts_.feas_tol) {
          if (delta > 0) limit = (lo_[col] - xB_[r]) / delta;
        } else if (phase1 && xB_[r] > up_[col] + opts_.feas_tol) {
          if (delta < 0) {
            limit = (xB_[r] - up_[col]) / (-delta);
            to_upper = true;
          }
        } else if (delta > 0) {
          if (std::isfinite(up_[col])) {
            limit = (up_[col] - xB_[r]) / delta;
            to_upper = true;
          }
        } else if (std::isfinite(lo_[col])) {
          limit = (xB_[r] - lo_[col]) / (-delta);
        }
        if (!std::isfinite(limit)) continue;
        limit = std::max(limit, 0.0);
        if (limit > min_ratio + kRatioTie) continue;
        const bool better = leaving_row < 0 || (bland ? basic_[r] < basic_[leaving_row] : std::abs(a) > best_pivot_mag ||
                                                (std::abs(a) == best_pivot_mag && basic_[r] < basic_[leaving_row]));
        if (better) {
          leaving_row = r;
          leaving_to_upper = to_upper;
          best_pivot_mag = std::abs(a);
        }
      }

      // min_ratio < own_range implies a blocking row exists.
      if (leaving_row < 0) throw std::runtime_error("solve: ratio test found no leaving row");

      ++iterations_;
      const double t = min_ratio;
      if (t > kDegenerateStep) {
        degenerate_run = 0;
        bland = false;
      } else if (++degenerate_run > kStallThreshold) {
        bland = true;
      }

      const double pivot = alpha[leaving_row];
      if (t != 0.0) xB_ -= (dir * t) * alpha;
      const int leaving = basic_[leaving_row];
      col_status_[leaving] = leaving_to_upper ? ColStatus::AtUpper : ColStatus::AtLower;
      xB_[leaving_row] = nonbasic_value(entering) + dir * t;
      basic_[leaving_row] = entering;
      col_status_[entering] = ColStatus::Basic;
      Eta eta;
      eta.row = leaving_row;
      eta.pivot = pivot;
      for (int r = 0; r < m_; ++r)
        if (r != leaving_row && std::abs(alpha[r]) > 1e-12) eta.entries.push_back({r, alpha[r]});
      etas_.push_back(std::move(eta));
      if (static_cast<int>(etas_.size()) >= kRefactorInterval || std::abs(pivot) < 1e-7) refactorize();
    }
  }

  SolveOptions opts_;
  int n_struct_ = 0;
  int m_ = 0;
  int ncols_ = 0;
  Eigen::SparseMatrix<double> A_;
  std::vector<double> lo_, up_;
  Eigen::VectorXd cost_;
  Eigen::VectorXd b_;

  std::vector<ColStatus> col_status_;
  std::vector<int> basic_;
  Eigen::VectorXd xB_;
  BasisLu lu_;
  std::vector<Eta> etas_;

  std::int64_t iterations_ = 0;
  std::int64_t max_iters_ = 0;
};

}  // namespace

LpSolution solve(const LpProblem& problem, const SolveOptions& options) {
  if (problem.rows.empty()) {
    // Pure bound problem: each variable sits at the bound its cost prefers.
    LpSolution sol;
    sol.values = Eigen::VectorXd::Zero(problem.num_vars);
    for (int v = 0; v < problem.num_vars; ++v)
      sol.values[v] = std::isfinite(problem.lower[v]) ? problem.lower[v] : problem.upper[v];
    for (const auto& [var, coeff] : problem.objective) {
      if (coeff == 0.0) continue;
      const double target = coeff < 0 ? problem.upper[var] : problem.lower[var];
      if (!std::isfinite(target)) {
        sol.status = SolveStatus::Unbounded;
        return sol;
      }
      sol.values[var] = target;
    }
    sol.status = SolveStatus::Optimal;
    sol.objective = objective_value(problem, sol.values);
    sol.max_constraint_violation = constraint_violation(problem, sol.values);
    return sol;
  }
  Simplex simplex(problem, options);
  return simplex.run(problem);
}

}  // namespace layerlp
