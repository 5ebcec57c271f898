#include "layerlp/labeling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace layerlp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd copy_slacks(const LpSolution& solution, const LpProblem& problem) {
  std::vector<double> xs;
  for (int v = 0; v < problem.num_vars; ++v)
    if (problem.var_roles[v].role == VarRole::Slack) xs.push_back(solution.values[v]);
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

Eigen::VectorXi compact(Eigen::VectorXi labels) {
  std::set<int> distinct(labels.begin(), labels.end());
  std::map<int, int> rank;
  int next = 1;
  for (int v : distinct) rank[v] = next++;
  for (Eigen::Index i = 0; i < labels.size(); ++i) labels[i] = rank[labels[i]];
  return labels;
}

DepthLabeling finish(Eigen::VectorXd real_labels, Eigen::VectorXi rounded, const LpSolution& solution,
                     const AffinityGraph& graph, const LpProblem& problem, const ModelConfig& config) {
  DepthLabeling out;
  out.real_labels = std::move(real_labels);
  out.rounded_labels = compact(std::move(rounded));
  out.sigma_hat = out.rounded_labels.size() > 0 ? out.rounded_labels.maxCoeff() : 0;
  if (variant_has_slacks(config.variant)) out.component_slacks = copy_slacks(solution, problem);
  out.objective = integer_objective(graph, config, out.rounded_labels);
  return out;
}

}  // namespace

int round_label(double value) { return static_cast<int>(std::ceil(value - 0.5)); }

DepthLabeling round_and_compact(const LpSolution& solution, const AffinityGraph& graph,
                                const LpProblem& problem, const ModelConfig& config) {
  if (solution.status != SolveStatus::Optimal)
    throw std::invalid_argument("round_and_compact: solution status is " + status_name(solution.status));
  const int n = graph.node_count();
  Eigen::VectorXd real_labels = solution.values.head(n);
  Eigen::VectorXi rounded(n);
  for (int i = 0; i < n; ++i) rounded[i] = round_label(real_labels[i]);
  return finish(std::move(real_labels), std::move(rounded), solution, graph, problem, config);
}

DepthLabeling threshold_round(const LpSolution& solution, const AffinityGraph& graph,
                              const LpProblem& problem, const ModelConfig& config, bool* fell_back) {
  if (config.variant != Variant::Hard || config.levels != 2)
    throw std::invalid_argument("threshold_round: requires the hard model with levels = 2");
  if (solution.status != SolveStatus::Optimal)
    throw std::invalid_argument("threshold_round: solution status is " + status_name(solution.status));
  if (fell_back) *fell_back = false;

  const int n = graph.node_count();
  const Eigen::VectorXd labels = solution.values.head(n);
  std::vector<double> distinct(labels.begin(), labels.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  // Candidate cuts: every level set of the solution, including the trivial
  // ones outside the value range (those subsume nearest-integer rounding of
  // constant-side solutions).
  std::vector<double> thetas;
  if (!distinct.empty()) {
    thetas.push_back(distinct.front() - 1.0);
    for (std::size_t d = 0; d + 1 < distinct.size(); ++d) thetas.push_back(0.5 * (distinct[d] + distinct[d + 1]));
    thetas.push_back(distinct.back() + 1.0);
  }

  double best_objective = kInf;
  double best_theta = 0.0;
  bool found = false;
  for (const double theta : thetas) {
    bool feasible = true;
    for (const auto& component : graph.seeds.components) {
      for (const SeedPair& pair : component)
        if (!(labels[pair.occluded] <= theta && labels[pair.occluder] > theta)) {
          feasible = false;
          break;
        }
      if (!feasible) break;
    }
    if (!feasible) continue;
    double objective = 0.0;
    for (const Edge& edge : graph.edges)
      if ((labels[edge.i] > theta) != (labels[edge.j] > theta)) objective += edge.weight;
    if (objective < best_objective - 1e-12) {
      best_objective = objective;
      best_theta = theta;
      found = true;
    }
  }

  if (!found) {
    if (fell_back) *fell_back = true;
    return round_and_compact(solution, graph, problem, config);
  }
  Eigen::VectorXi rounded(n);
  for (int i = 0; i < n; ++i) rounded[i] = labels[i] > best_theta ? 2 : 1;
  return finish(labels, std::move(rounded), solution, graph, problem, config);
}

Eigen::VectorXi extract_objects(const DepthLabeling& labeling, const AffinityGraph& graph) {
  const int n = graph.node_count();
  if (labeling.rounded_labels.size() != n)
    throw std::invalid_argument("extract_objects: labeling does not match the graph");
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (const Edge& edge : graph.edges)
    if (labeling.rounded_labels[edge.i] == labeling.rounded_labels[edge.j]) parent[find(edge.i)] = find(edge.j);

  Eigen::VectorXi objects = Eigen::VectorXi::Zero(n);
  std::map<int, int> id_of_root;
  int next_id = 1;
  for (int i = 0; i < n; ++i) {
    if (labeling.rounded_labels[i] <= 1) continue;  // background layer
    const int root = find(i);
    auto [it, inserted] = id_of_root.try_emplace(root, next_id);
    if (inserted) ++next_id;
    objects[i] = it->second;
  }
  return objects;
}

std::string SlackReport::to_string() const {
  std::ostringstream out;
  for (const SlackEntry& entry : entries)
    out << "component " << entry.component << ": xi = " << entry.xi << " ("
        << (entry.rejected ? "rejected occlusion evidence" : "weakened evidence") << ")\n";
  return out.str();
}

SlackReport slack_report(const DepthLabeling& labeling) {
  SlackReport report;
  for (Eigen::Index k = 0; k < labeling.component_slacks.size(); ++k) {
    const double xi = labeling.component_slacks[k];
    if (xi <= 0.0) continue;
    report.entries.push_back({static_cast<int>(k) + 1, xi, xi > 0.5});
  }
  return report;
}

double integer_objective(const AffinityGraph& graph, const ModelConfig& config, const Eigen::VectorXi& labels) {
  const bool bounded = !variant_has_sigma(config.variant);
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] < 1 || (bounded && labels[i] > config.levels)) return kInf;
  double total = 0.0;
  for (const Edge& edge : graph.edges) total += edge.weight * std::abs(labels[edge.i] - labels[edge.j]);
  if (variant_has_sigma(config.variant)) {
    const int sigma = labels.size() > 0 ? std::max(1, labels.maxCoeff()) : 1;
    total += config.gamma * sigma;
  }
  const bool soft = variant_has_slacks(config.variant);
  for (const auto& component : graph.seeds.components) {
    double xi = 0.0;
    for (const SeedPair& pair : component) {
      const int gap = labels[pair.occluder] - labels[pair.occluded];
      if (gap < 0) return kInf;            // inversion: not repairable
      if (!soft && gap < 1) return kInf;   // hard separation violated
      xi = std::max(xi, 1.0 - gap);
    }
    if (soft) total += config.lambda * xi;
  }
  return total;
}

}  // namespace layerlp
