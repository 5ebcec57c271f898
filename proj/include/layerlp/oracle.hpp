#pragma once

#include "layerlp/graph.hpp"
#include "layerlp/lp.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace layerlp {

// Exhaustive ground truth over integer labelings. Independent of the LP
// path: it evaluates the model objective directly per labeling.
struct OracleResult {
  std::vector<Eigen::VectorXi> best_labelings;  // at most kMaxStoredTies kept
  std::int64_t tie_count = 0;                   // total optima encountered
  double best_objective = 0.0;                  // +inf when nothing is feasible
  bool feasible = false;
};

inline constexpr int kOracleMaxNodes = 12;
inline constexpr int kOracleMaxLabel = 4;
inline constexpr int kMaxStoredTies = 256;

// Evaluates every labeling in {1..max_label}^n: u_ij = |c_i - c_j|,
// sigma = max c, and for soft models xi_k = clamp(max over pairs of
// 1 - (c_j - c_i), 0, 1) with inversions infeasible. Bounded variants also
// reject labels above config.levels.
OracleResult enumerate_optimum(const AffinityGraph& graph, const ModelConfig& config, int max_label);

}  // namespace layerlp
