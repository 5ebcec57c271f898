#pragma once

#include "layerlp/graph.hpp"
#include "layerlp/lp.hpp"
#include "layerlp/simplex.hpp"

#include <string>
#include <vector>

namespace layerlp {

// Nearest integer with ties toward the smaller integer (1.5 -> 1).
int round_label(double value);

// Nearest-integer rounding of the label variables followed by compaction to
// consecutive layers 1..L'. Slacks are copied from the slack variables when
// the model has them. The stored objective is the integer-model cost of the
// compacted labels.
DepthLabeling round_and_compact(const LpSolution& solution, const AffinityGraph& graph,
                                const LpProblem& problem, const ModelConfig& config);

// Coarea rounding for Hard L=2: tries every threshold at midpoints between
// distinct label values, keeps those satisfying all seed pairs, and returns
// the feasible binarization of least cost. Falls back to round_and_compact
// (reported through fell_back) when no threshold is feasible.
DepthLabeling threshold_round(const LpSolution& solution, const AffinityGraph& graph,
                              const LpProblem& problem, const ModelConfig& config,
                              bool* fell_back = nullptr);

// Per-layer connected components on the region graph: nodes of layer 1 get
// id 0 (background), every connected same-label group in layers > 1 gets a
// distinct id >= 1.
Eigen::VectorXi extract_objects(const DepthLabeling& labeling, const AffinityGraph& graph);

struct SlackEntry {
  int component = 0;  // 1-based k
  double xi = 0.0;
  bool rejected = false;  // xi > 0.5; otherwise weakened (0 < xi <= 0.5)
};

struct SlackReport {
  std::vector<SlackEntry> entries;
  std::string to_string() const;
};

// Components with xi > 0.5 are reported as rejected occlusion evidence,
// 0 < xi <= 0.5 as weakened evidence.
SlackReport slack_report(const DepthLabeling& labeling);

// Integer-model cost of a labeling: sum w|dc| plus gamma*max(c) for Mdl
// variants plus lambda*sum xi with the minimal feasible slacks for Soft
// variants. Returns +inf when the labeling is infeasible for the model.
double integer_objective(const AffinityGraph& graph, const ModelConfig& config,
                         const Eigen::VectorXi& labels);

}  // namespace layerlp
