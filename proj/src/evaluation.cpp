#include "layerlp/evaluation.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace layerlp {

OverlapVariant overlap_from_name(const std::string& name) {
  if (name == "literal") return OverlapVariant::Literal;
  if (name == "jaccard") return OverlapVariant::Jaccard;
  throw std::invalid_argument("unknown overlap variant '" + name + "'");
}

double covering_score(const std::vector<std::vector<int>>& truth_segments,
                      const std::vector<std::vector<int>>& predicted_segments,
                      const Eigen::VectorXd& node_areas, OverlapVariant variant) {
  const int n = static_cast<int>(node_areas.size());
  auto assign = [n](const std::vector<std::vector<int>>& segments, const char* which) {
    std::vector<int> of_node(n, -1);
    for (std::size_t s = 0; s < segments.size(); ++s)
      for (int node : segments[s]) {
        if (node < 0 || node >= n)
          throw std::invalid_argument(std::string("covering_score: ") + which + " segment " + std::to_string(s) +
                                      " references node " + std::to_string(node) + " out of range");
        if (of_node[node] != -1)
          throw std::invalid_argument(std::string("covering_score: ") + which + " segments overlap at node " +
                                      std::to_string(node));
        of_node[node] = static_cast<int>(s);
      }
    return of_node;
  };
  const std::vector<int> pred_of = assign(predicted_segments, "predicted");
  assign(truth_segments, "truth");

  std::vector<double> pred_size(predicted_segments.size(), 0.0);
  for (std::size_t s = 0; s < predicted_segments.size(); ++s)
    for (int node : predicted_segments[s]) pred_size[s] += node_areas[node];

  double total_truth = 0.0;
  double score = 0.0;
  for (const auto& truth : truth_segments) {
    double size = 0.0;
    std::map<int, double> intersect;  // predicted segment -> overlap area
    for (int node : truth) {
      size += node_areas[node];
      if (pred_of[node] >= 0) intersect[pred_of[node]] += node_areas[node];
    }
    double best = 0.0;
    for (const auto& [s, inter] : intersect) {
      const double denom = variant == OverlapVariant::Literal ? pred_size[s] + size
                                                              : pred_size[s] + size - inter;
      if (denom > 0) best = std::max(best, inter / denom);
    }
    total_truth += size;
    score += size * best;
  }
  return total_truth > 0 ? score / total_truth : 0.0;
}

std::vector<std::vector<int>> segments_from_objects(const Eigen::VectorXi& object_map) {
  int max_id = 0;
  for (Eigen::Index i = 0; i < object_map.size(); ++i) max_id = std::max(max_id, object_map[i]);
  std::vector<std::vector<int>> segments(max_id + 1);
  for (Eigen::Index i = 0; i < object_map.size(); ++i)
    segments[object_map[i]].push_back(static_cast<int>(i));
  // Drop empty ids (none expected, but keep the contract tight).
  segments.erase(std::remove_if(segments.begin(), segments.end(),
                                [](const std::vector<int>& s) { return s.empty(); }),
                 segments.end());
  return segments;
}

std::vector<SweepRow> gamma_sweep(const AffinityGraph& graph, const std::vector<double>& gammas,
                                  double lambda, const PipelineOptions& options) {
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    if (gammas[i] <= 0) throw std::invalid_argument("gamma_sweep: gammas must be positive");
    if (i > 0 && gammas[i] <= gammas[i - 1]) throw std::invalid_argument("gamma_sweep: gammas must be ascending");
  }
  std::vector<SweepRow> rows;
  for (double gamma : gammas) {
    ModelConfig config;
    config.variant = lambda > 0 ? Variant::MdlSoft : Variant::Mdl;
    config.gamma = gamma;
    config.lambda = lambda;
    SweepRow row;
    row.gamma = gamma;
    const PipelineResult result = solve_depth(graph, config, options);
    row.status = result.solution.status;
    if (row.status == SolveStatus::Optimal) {
      row.sigma_hat = result.labeling.sigma_hat;
      row.objective = result.solution.objective;
      row.labeling = result.labeling;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

double scored_solve(const BenchmarkCase& bench, const ModelConfig& config, const PipelineOptions& options,
                    bool& optimal) {
  const PipelineResult result = solve_depth(bench.graph, config, options);
  if (result.solution.status != SolveStatus::Optimal) {
    optimal = false;
    return std::nan("");
  }
  Eigen::VectorXd areas(bench.graph.node_count());
  for (int i = 0; i < bench.graph.node_count(); ++i) areas[i] = static_cast<double>(bench.graph.nodes[i].area);
  return covering_score(bench.truth_segments, segments_from_objects(result.labeling.object_map), areas,
                        bench.variant);
}

}  // namespace

std::vector<BenchmarkRow> benchmark_report(const std::vector<BenchmarkCase>& cases,
                                           const PipelineOptions& options) {
  std::vector<BenchmarkRow> rows;
  for (const BenchmarkCase& bench : cases) {
    BenchmarkRow row;
    row.name = bench.name;
    const bool soft = bench.lambda > 0;

    ModelConfig selection;
    selection.variant = soft ? Variant::MdlSoft : Variant::Mdl;
    selection.gamma = bench.gamma;
    selection.lambda = bench.lambda;
    row.with_model_selection = scored_solve(bench, selection, options, row.all_optimal);

    ModelConfig true_levels;
    true_levels.variant = soft ? Variant::Soft : Variant::Hard;
    true_levels.levels = std::max(2, bench.true_levels);
    true_levels.lambda = bench.lambda;
    row.with_true_levels = scored_solve(bench, true_levels, options, row.all_optimal);

    ModelConfig forced;
    forced.variant = soft ? Variant::Soft : Variant::Hard;
    forced.levels = 2;
    forced.lambda = bench.lambda;
    row.forced_two_levels = scored_solve(bench, forced, options, row.all_optimal);

    rows.push_back(std::move(row));
  }
  return rows;
}

std::string benchmark_text(const std::vector<BenchmarkRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "case" << std::right << std::setw(18) << "model selection"
      << std::setw(12) << "true L" << std::setw(12) << "L = 2" << "\n";
  auto cell = [](double v) {
    std::ostringstream s;
    if (std::isnan(v))
      s << "n/a";
    else
      s << std::fixed << std::setprecision(3) << v;
    return s.str();
  };
  for (const BenchmarkRow& row : rows)
    out << std::left << std::setw(24) << row.name << std::right << std::setw(18)
        << cell(row.with_model_selection) << std::setw(12) << cell(row.with_true_levels) << std::setw(12)
        << cell(row.forced_two_levels) << "\n";
  return out.str();
}

std::string benchmark_json(const std::vector<BenchmarkRow>& rows) {
  nlohmann::json doc = nlohmann::json::array();
  for (const BenchmarkRow& row : rows) {
    nlohmann::json entry;
    entry["case"] = row.name;
    auto cell = [](double v) -> nlohmann::json {
      if (std::isnan(v)) return nullptr;
      return v;
    };
    entry["with_model_selection"] = cell(row.with_model_selection);
    entry["with_true_levels"] = cell(row.with_true_levels);
    entry["forced_two_levels"] = cell(row.forced_two_levels);
    entry["all_optimal"] = row.all_optimal;
    doc.push_back(std::move(entry));
  }
  return doc.dump(2);
}

}  // namespace layerlp
