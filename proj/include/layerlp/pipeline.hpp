#pragma once

#include "layerlp/affinity.hpp"
#include "layerlp/graph.hpp"
#include "layerlp/labeling.hpp"
#include "layerlp/lp.hpp"
#include "layerlp/simplex.hpp"

namespace layerlp {

struct PipelineOptions {
  AffinityParams affinity;           // applied when the graph has no weights
  SolveOptions solver;
  bool threshold_rounding = false;   // coarea rounding (hard, L = 2 only)
};

struct PipelineResult {
  LpProblem problem;
  LpSolution solution;
  DepthLabeling labeling;  // empty unless solution.status == Optimal
  bool rounding_fell_back = false;
};

// Translates each graph-connected component so its smallest label sits at 1.
// Objective-preserving for every model variant (the anisotropic TV term and
// the seed rows are shift-invariant within a component); pins down the
// shift-degenerate optima so labelings compare deterministically across
// model variants and re-solves.
Eigen::VectorXd anchor_components(const AffinityGraph& graph, Eigen::VectorXd labels);

// validate -> weights -> build -> solve -> anchor -> round -> objects.
// Throws on invalid graphs; a non-optimal solve is returned as-is with an
// empty labeling.
PipelineResult solve_depth(const AffinityGraph& graph, const ModelConfig& config,
                           const PipelineOptions& options = {});

}  // namespace layerlp
