#include "layerlp/temporal.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace layerlp {

Eigen::VectorXi warp_labels(const DepthLabeling& prev_labeling, const RegionMap& prev_regions,
                            const FlowField& backward_flow, const RegionMap& current_regions,
                            int current_node_count) {
  const int height = current_regions.height();
  const int width = current_regions.width();
  if (backward_flow.height() != height || backward_flow.width() != width)
    throw std::invalid_argument("warp_labels: backward flow does not cover the current domain");
  if (prev_labeling.rounded_labels.size() == 0)
    throw std::invalid_argument("warp_labels: previous labeling has no rounded labels");

  const int prev_h = prev_regions.height();
  const int prev_w = prev_regions.width();
  std::vector<std::map<int, int>> votes(current_node_count);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int node = current_regions.ids(y, x);
      if (node < 0 || node >= current_node_count)
        throw std::invalid_argument("warp_labels: region map id out of range");
      // Pixel centers; the target pixel is the one containing the warped point.
      const double tx = x + 0.5 + backward_flow.vx(y, x);
      const double ty = y + 0.5 + backward_flow.vy(y, x);
      const int px = static_cast<int>(std::floor(tx));
      const int py = static_cast<int>(std::floor(ty));
      int label = 1;  // off-domain votes background
      if (px >= 0 && px < prev_w && py >= 0 && py < prev_h) {
        const int prev_node = prev_regions.ids(py, px);
        if (prev_node < 0 || prev_node >= prev_labeling.rounded_labels.size())
          throw std::invalid_argument("warp_labels: previous region map id out of range");
        label = prev_labeling.rounded_labels[prev_node];
      }
      ++votes[node][label];
    }

  Eigen::VectorXi warped = Eigen::VectorXi::Constant(current_node_count, 1);
  for (int node = 0; node < current_node_count; ++node) {
    int best_label = 1, best_count = 0;
    for (const auto& [label, count] : votes[node])
      if (count > best_count) {  // map iterates ascending: ties stay with the smaller label
        best_count = count;
        best_label = label;
      }
    warped[node] = best_label;
  }
  return warped;
}

AffinityGraph augment_weights(const AffinityGraph& graph, const Eigen::VectorXi& warped_labels,
                              const TemporalParams& params) {
  if (!(params.tau > 0)) throw std::invalid_argument("augment_weights: tau must be > 0");
  if (warped_labels.size() != graph.node_count())
    throw std::invalid_argument("augment_weights: warped labels do not cover all nodes");
  AffinityGraph out = graph;
  for (Edge& edge : out.edges)
    edge.weight += edge.boundary_length / params.tau * h_indicator(warped_labels[edge.i], warped_labels[edge.j]);
  return out;
}

}  // namespace layerlp
