#include "layerlp/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace layerlp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTieTol = 1e-12;
}  // namespace

OracleResult enumerate_optimum(const AffinityGraph& graph, const ModelConfig& config, int max_label) {
  const int n = graph.node_count();
  if (n > kOracleMaxNodes || max_label > kOracleMaxLabel || max_label < 1)
    throw std::invalid_argument("enumerate_optimum: bound exceeded (nodes <= " + std::to_string(kOracleMaxNodes) +
                                ", max_label <= " + std::to_string(kOracleMaxLabel) + ")");

  const bool bounded = !variant_has_sigma(config.variant);
  const bool soft = variant_has_slacks(config.variant);
  const int top = bounded ? std::min(max_label, config.levels) : max_label;

  OracleResult result;
  result.best_objective = kInf;
  Eigen::VectorXi labels = Eigen::VectorXi::Constant(n, 1);

  auto evaluate = [&]() {
    double total = 0.0;
    for (const Edge& edge : graph.edges) total += edge.weight * std::abs(labels[edge.i] - labels[edge.j]);
    if (!bounded) total += config.gamma * (n > 0 ? std::max(1, labels.maxCoeff()) : 1);
    for (const auto& component : graph.seeds.components) {
      double xi = 0.0;
      for (const SeedPair& pair : component) {
        const int gap = labels[pair.occluder] - labels[pair.occluded];
        if (gap < (soft ? 0 : 1)) return kInf;
        xi = std::max(xi, 1.0 - gap);
      }
      if (soft) total += config.lambda * xi;
    }
    return total;
  };

  // Odometer over {1..top}^n; n == 0 contributes the single empty labeling.
  bool done = false;
  while (!done) {
    const double objective = evaluate();
    if (objective < result.best_objective - kTieTol) {
      result.best_objective = objective;
      result.best_labelings.clear();
      result.best_labelings.push_back(labels);
      result.tie_count = 1;
    } else if (std::isfinite(objective) && objective <= result.best_objective + kTieTol) {
      ++result.tie_count;
      if (static_cast<int>(result.best_labelings.size()) < kMaxStoredTies) result.best_labelings.push_back(labels);
    }
    done = true;
    for (int i = 0; i < n; ++i) {
      if (labels[i] < top) {
        ++labels[i];
        for (int j = 0; j < i; ++j) labels[j] = 1;
        done = false;
        break;
      }
    }
  }

  result.feasible = std::isfinite(result.best_objective);
  if (!result.feasible) {
    result.best_labelings.clear();
    result.tie_count = 0;
  }
  return result;
}

}  // namespace layerlp
