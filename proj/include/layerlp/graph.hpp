#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

namespace layerlp {

using Vec2 = Eigen::Vector2d;

enum class RegionRole : std::uint8_t { Free, Occluded, Occluder };

// A node's occlusion role; `component` is the 1-based occlusion component k,
// 0 for free nodes.
struct RegionClass {
  RegionRole role = RegionRole::Free;
  int component = 0;

  bool operator==(const RegionClass&) const = default;
};

struct Node {
  int id = 0;
  Vec2 centroid = Vec2::Zero();
  std::int64_t area = 1;          // pixels^2
  double mean_intensity = 0.0;    // [0,1]
  Vec2 mean_flow = Vec2::Zero();  // pixels/frame
  RegionClass region_class;
};

// Undirected, stored once with i < j. `weight` is meaningful only after the
// affinity pass (or when loaded from a weights_precomputed document).
struct Edge {
  int i = 0;
  int j = 0;
  double boundary_length = 0.0;
  double pb_mean = 0.0;
  double weight = 0.0;
};

struct SeedPair {
  int occluded = 0;
  int occluder = 0;
};

// Ordered pairs grouped per occlusion component k = index + 1. One slack
// variable attaches to each component in the soft models, so the grouping is
// structural, not cosmetic.
struct SeedConstraintSet {
  std::vector<std::vector<SeedPair>> components;

  int component_count() const { return static_cast<int>(components.size()); }
  std::size_t pair_count() const {
    std::size_t n = 0;
    for (const auto& c : components) n += c.size();
    return n;
  }
};

struct AffinityGraph {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  SeedConstraintSet seeds;
  bool has_weights = false;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
};

struct ValidationIssue {
  std::string message;
  // Metadata issues (region-class tags disagreeing with the seed roles) do
  // not block LP construction: opposing seed pairs are a legal degenerate
  // input for the soft models and must reach the solver.
  bool metadata_only = false;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
  bool structurally_ok() const {
    for (const auto& issue : issues)
      if (!issue.metadata_only) return false;
    return true;
  }
  std::string to_string() const;
};

// Checks every structural invariant and reports all violations with the
// offending node/edge/pair indices. Never throws.
ValidationReport validate(const AffinityGraph& graph);

// Per-node pixel memberships of a superpixelization; ids index graph nodes.
struct RegionMap {
  Eigen::ArrayXXi ids;

  int height() const { return static_cast<int>(ids.rows()); }
  int width() const { return static_cast<int>(ids.cols()); }
};

// The labeling produced by solving and rounding one frame.
struct DepthLabeling {
  Eigen::VectorXd real_labels;        // label variables as the rounding saw them
  Eigen::VectorXi rounded_labels;     // compacted to 1..sigma_hat
  int sigma_hat = 0;
  Eigen::VectorXd component_slacks;   // xi_k per component; empty for hard models
  Eigen::VectorXi object_map;         // 0 = background
  double objective = 0.0;             // integer-model cost of rounded_labels
};

// Graph document: {"nodes": [...], "edges": [...], "seeds": [...]}. Region
// classes are implied by the seed pairs and restored on load. Edge weights
// are written only when "weights_precomputed" is true.
std::string graph_to_json(const AffinityGraph& graph);
AffinityGraph graph_from_json(const std::string& text);
void save_graph(const std::string& path, const AffinityGraph& graph);
AffinityGraph load_graph(const std::string& path);

std::string labeling_to_json(const DepthLabeling& labeling);
DepthLabeling labeling_from_json(const std::string& text);
void save_labeling(const std::string& path, const DepthLabeling& labeling);
DepthLabeling load_labeling(const std::string& path);

void save_region_map(const std::string& path, const RegionMap& regions);
RegionMap load_region_map(const std::string& path);

}  // namespace layerlp
