#pragma once

#include "layerlp/graph.hpp"
#include "layerlp/image.hpp"

#include <Eigen/Core>

namespace layerlp {

struct TemporalParams {
  double tau = 2.0;  // forgetting factor, > 0
};

// 1 iff both labels agree on a non-background layer.
inline int h_indicator(int a, int b) { return (a == b && a > 1 && b > 1) ? 1 : 0; }

// Carries the previous frame's rounded labels into the current frame: each
// pixel votes with the previous label found at its backward-flow target,
// off-domain pixels vote background, and each node takes the majority (ties
// toward the smaller label, i.e. toward background).
Eigen::VectorXi warp_labels(const DepthLabeling& prev_labeling, const RegionMap& prev_regions,
                            const FlowField& backward_flow, const RegionMap& current_regions,
                            int current_node_count);

// Adds (1/tau) * boundary_length * H(warped_i, warped_j) to every edge
// weight; the boundary_length factor keeps the term in the same units as
// the superpixel affinities. Never decreases a weight.
AffinityGraph augment_weights(const AffinityGraph& graph, const Eigen::VectorXi& warped_labels,
                              const TemporalParams& params);

}  // namespace layerlp
