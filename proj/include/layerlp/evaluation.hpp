#pragma once

#include "layerlp/graph.hpp"
#include "layerlp/pipeline.hpp"

#include <string>
#include <vector>

namespace layerlp {

enum class OverlapVariant { Literal, Jaccard };

OverlapVariant overlap_from_name(const std::string& name);

// Area-weighted best-overlap score of the truth segments by the predicted
// segments. Overlap per pair is |a & b| / (|a| + |b|) for the literal
// variant (caps the score at 0.5) and |a & b| / |a | b| for jaccard.
// Segment sizes are pixel areas (summed node areas); segments within one
// list must be disjoint.
double covering_score(const std::vector<std::vector<int>>& truth_segments,
                      const std::vector<std::vector<int>>& predicted_segments,
                      const Eigen::VectorXd& node_areas, OverlapVariant variant);

// Prediction segments for scoring: one segment per object id, id 0 being
// the background.
std::vector<std::vector<int>> segments_from_objects(const Eigen::VectorXi& object_map);

struct SweepRow {
  double gamma = 0.0;
  SolveStatus status = SolveStatus::IterationLimit;
  int sigma_hat = 0;
  double objective = 0.0;
  DepthLabeling labeling;
};

// One model-selection solve per gamma (ascending, positive). lambda > 0
// uses the soft seed rows with that penalty; lambda <= 0 keeps them hard.
// Non-optimal rows are flagged through their status and the sweep continues.
std::vector<SweepRow> gamma_sweep(const AffinityGraph& graph, const std::vector<double>& gammas,
                                  double lambda, const PipelineOptions& options = {});

struct BenchmarkCase {
  std::string name;
  AffinityGraph graph;
  std::vector<std::vector<int>> truth_segments;
  int true_levels = 2;
  double gamma = 0.1;
  double lambda = 50.0;  // <= 0: hard seed rows throughout
  OverlapVariant variant = OverlapVariant::Jaccard;
};

struct BenchmarkRow {
  std::string name;
  double with_model_selection = 0.0;
  double with_true_levels = 0.0;
  double forced_two_levels = 0.0;
  bool all_optimal = true;
};

// Covering scores per case for: model selection on, the true layer count,
// and a forced two-layer model.
std::vector<BenchmarkRow> benchmark_report(const std::vector<BenchmarkCase>& cases,
                                           const PipelineOptions& options = {});

std::string benchmark_text(const std::vector<BenchmarkRow>& rows);
std::string benchmark_json(const std::vector<BenchmarkRow>& rows);

}  // namespace layerlp
