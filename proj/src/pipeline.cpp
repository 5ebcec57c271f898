#include "layerlp/pipeline.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

namespace layerlp {

Eigen::VectorXd anchor_components(const AffinityGraph& graph, Eigen::VectorXd labels) {
  const int n = graph.node_count();
  if (labels.size() != n) throw std::invalid_argument("anchor_components: label count does not match graph");
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const Edge& edge : graph.edges) parent[find(edge.i)] = find(edge.j);

  std::vector<double> min_label(n, 0.0);
  std::vector<bool> seen(n, false);
  for (int i = 0; i < n; ++i) {
    const int root = find(i);
    if (!seen[root] || labels[i] < min_label[root]) {
      min_label[root] = labels[i];
      seen[root] = true;
    }
  }
  for (int i = 0; i < n; ++i) labels[i] -= min_label[find(i)] - 1.0;
  return labels;
}

PipelineResult solve_depth(const AffinityGraph& graph, const ModelConfig& config,
                           const PipelineOptions& options) {
  const ValidationReport report = validate(graph);
  if (!report.structurally_ok())
    throw std::invalid_argument("solve_depth: invalid graph:\n" + report.to_string());

  const AffinityGraph* working = &graph;
  AffinityGraph weighted;
  if (!graph.has_weights) {
    weighted = graph;
    compute_weights(weighted, options.affinity);
    working = &weighted;
  }

  PipelineResult result;
  result.problem = build(*working, config);
  result.solution = solve(result.problem, options.solver);
  if (result.solution.status != SolveStatus::Optimal) return result;

  // Anchored copy for rounding; the raw solver output stays untouched.
  LpSolution anchored = result.solution;
  anchored.values.head(graph.node_count()) =
      anchor_components(*working, anchored.values.head(graph.node_count()));

  if (options.threshold_rounding && config.variant == Variant::Hard && config.levels == 2)
    result.labeling =
        threshold_round(anchored, *working, result.problem, config, &result.rounding_fell_back);
  else
    result.labeling = round_and_compact(anchored, *working, result.problem, config);
  result.labeling.object_map = extract_objects(result.labeling, *working);
  return result;
}

}  // namespace layerlp
