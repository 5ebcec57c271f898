#pragma once

#include "layerlp/lp.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace layerlp {

enum class SolveStatus { Optimal, Infeasible, Unbounded, IterationLimit };

std::string status_name(SolveStatus status);

struct SolveOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  std::int64_t max_iters = 0;  // 0 = choose from problem size
};

struct LpSolution {
  SolveStatus status = SolveStatus::IterationLimit;
  Eigen::VectorXd values;  // structural variables, problem order
  double objective = 0.0;
  std::int64_t iterations = 0;
  double max_constraint_violation = 0.0;
};

// Revised simplex over the sparse constraint matrix with bounded variables.
//
// Rows get one slack each; the all-slack basis starts a composite phase 1
// that drives bound violations to zero, then phase 2 prices with Dantzig's
// rule (ties to the lowest variable index). A stall of degenerate pivots
// switches to Bland's rule until progress resumes, which guarantees
// termination. The basis inverse is kept as a sparse LU plus a product-form
// eta file, refactorized periodically.
//
// Deterministic: identical problems and options give identical solutions.
LpSolution solve(const LpProblem& problem, const SolveOptions& options = {});

}  // namespace layerlp
