#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "layerlp/labeling.hpp"
#include "layerlp/oracle.hpp"
#include "layerlp/pipeline.hpp"
#include "test_support.hpp"

#include <random>

using namespace layerlp;
using namespace layerlp::testing;

namespace {

LpSolution solution_with_labels(const LpProblem& lp, const std::vector<double>& labels) {
  LpSolution sol;
  sol.status = SolveStatus::Optimal;
  sol.values = Eigen::VectorXd::Zero(lp.num_vars);
  for (std::size_t i = 0; i < labels.size(); ++i) sol.values[static_cast<Eigen::Index>(i)] = labels[i];
  return sol;
}

}  // namespace

TEST_CASE("rounding keeps already integral labelings") {
  const AffinityGraph graph = path_graph({1.0, 1.0}, {{0, 1, 1}});
  const ModelConfig config{Variant::Hard, 2, 0.0, 0.0};
  const LpProblem lp = build(graph, config);
  const DepthLabeling out = round_and_compact(solution_with_labels(lp, {1.0, 2.0, 2.0}), graph, lp, config);
  CHECK(out.rounded_labels(0) == 1);
  CHECK(out.rounded_labels(1) == 2);
  CHECK(out.rounded_labels(2) == 2);
  CHECK(out.sigma_hat == 2);
  CHECK(out.objective == doctest::Approx(1.0));
}

TEST_CASE("compaction removes empty layers") {
  const AffinityGraph graph = path_graph({1.0, 1.0});
  const ModelConfig config{Variant::Hard, 4, 0.0, 0.0};
  const LpProblem lp = build(graph, config);
  const DepthLabeling out = round_and_compact(solution_with_labels(lp, {1.0, 2.6, 2.6}), graph, lp, config);
  CHECK(out.rounded_labels(0) == 1);
  CHECK(out.rounded_labels(1) == 2);  // 2.6 rounds to 3, compaction pulls it to 2
  CHECK(out.rounded_labels(2) == 2);
  CHECK(out.sigma_hat == 2);
}

TEST_CASE("rounding boundary splits at one half") {
  const AffinityGraph graph = path_graph({1.0});
  const ModelConfig config{Variant::Hard, 2, 0.0, 0.0};
  const LpProblem lp = build(graph, config);
  const DepthLabeling out = round_and_compact(solution_with_labels(lp, {1.49, 1.51}), graph, lp, config);
  CHECK(out.rounded_labels(0) == 1);
  CHECK(out.rounded_labels(1) == 2);
}

TEST_CASE("ties round toward the smaller integer") {
  CHECK(round_label(1.5) == 1);
  CHECK(round_label(2.5) == 2);
  CHECK(round_label(2.4999) == 2);
  CHECK(round_label(2.5001) == 3);
}

TEST_CASE("compaction preserves order relations") {
  std::mt19937_64 rng(47);
  std::uniform_real_distribution<double> value(1.0, 4.0);
  const AffinityGraph graph = path_graph({1.0, 1.0, 1.0, 1.0});
  const ModelConfig config{Variant::Hard, 4, 0.0, 0.0};
  const LpProblem lp = build(graph, config);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> labels(5);
    for (double& v : labels) v = value(rng);
    const DepthLabeling out = round_and_compact(solution_with_labels(lp, labels), graph, lp, config);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        const int before_i = round_label(labels[i]);
        const int before_j = round_label(labels[j]);
        if (before_i < before_j) CHECK(out.rounded_labels(i) < out.rounded_labels(j));
        if (before_i == before_j) CHECK(out.rounded_labels(i) == out.rounded_labels(j));
      }
  }
}

TEST_CASE("non-optimal solutions are rejected") {
  const AffinityGraph graph = path_graph({1.0});
  const ModelConfig config{Variant::Hard, 2, 0.0, 0.0};
  const LpProblem lp = build(graph, config);
  LpSolution sol = solution_with_labels(lp, {1.0, 1.0});
  sol.status = SolveStatus::Infeasible;
  CHECK_THROWS_AS(round_and_compact(sol, graph, lp, config), std::invalid_argument);
}

TEST_CASE("object extraction separates layers and components") {
  const AffinityGraph graph = path_graph({1.0, 1.0});
  DepthLabeling labeling;
  labeling.rounded_labels = Eigen::Vector3i(1, 2, 2);
  const Eigen::VectorXi objects = extract_objects(labeling, graph);
  CHECK(objects(0) == 0);
  CHECK(objects(1) == 1);
  CHECK(objects(2) == 1);

  // Path 0-1-2-3 labeled (2,1,1,2): the two layer-2 nodes are disconnected.
  const AffinityGraph path4 = path_graph({1.0, 1.0, 1.0});
  DepthLabeling split;
  split.rounded_labels = Eigen::Vector4i(2, 1, 1, 2);
  const Eigen::VectorXi ids = extract_objects(split, path4);
  CHECK(ids(1) == 0);
  CHECK(ids(2) == 0);
  CHECK(ids(0) != 0);
  CHECK(ids(3) != 0);
  CHECK(ids(0) != ids(3));
}

TEST_CASE("all background yields zero detachable objects") {
  const AffinityGraph graph = path_graph({1.0, 1.0});
  DepthLabeling labeling;
  labeling.rounded_labels = Eigen::Vector3i(1, 1, 1);
  const Eigen::VectorXi objects = extract_objects(labeling, graph);
  CHECK(objects.maxCoeff() == 0);
}

TEST_CASE("threshold rounding keeps integral binary solutions") {
  const AffinityGraph graph = path_graph({1.0, 1.0}, {{0, 1, 1}});
  const ModelConfig config{Variant::Hard, 2, 0.0, 0.0};
  const LpProblem lp = build(graph, config);
  bool fell_back = true;
  const DepthLabeling out =
      threshold_round(solution_with_labels(lp, {1.0, 2.0, 2.0}), graph, lp, config, &fell_back);
  CHECK_FALSE(fell_back);
  CHECK(out.rounded_labels(0) == 1);
  CHECK(out.rounded_labels(1) == 2);
  CHECK(out.rounded_labels(2) == 2);
  CHECK(out.objective == doctest::Approx(1.0));
}

TEST_CASE("threshold rounding picks the cheaper feasible cut") {
  // Triangle with seed (0 < 2); fractional labels (1, 1.5, 2).
  const AffinityGraph graph =
      make_graph(3, {{0, 1, 2.0}, {1, 2, 1.0}, {0, 2, 1.0}}, {{0, 2, 1}});
  const ModelConfig config{Variant::Hard, 2, 0.0, 0.0};
  const LpProblem lp = build(graph, config);
  const DepthLabeling out = threshold_round(solution_with_labels(lp, {1.0, 1.5, 2.0}), graph, lp, config);
  // theta = 1.25 labels (1,2,2) at cost 3; theta = 1.75 labels (1,1,2) at cost 2.
  CHECK(out.rounded_labels(0) == 1);
  CHECK(out.rounded_labels(1) == 1);
  CHECK(out.rounded_labels(2) == 2);
  CHECK(out.objective == doctest::Approx(2.0));
  // Matches the enumeration optimum (coarea property).
  const OracleResult oracle = enumerate_optimum(graph, config, 2);
  CHECK(out.objective == doctest::Approx(oracle.best_objective));
}

TEST_CASE("threshold rounding falls back when no threshold is feasible") {
  // Constant labels cannot separate the seed pair at any midpoint.
  const AffinityGraph graph = path_graph({1.0}, {{0, 1, 1}});
  const ModelConfig config{Variant::Hard, 2, 0.0, 0.0};
  const LpProblem lp = build(graph, config);
  bool fell_back = false;
  const DepthLabeling out = threshold_round(solution_with_labels(lp, {1.5, 1.5}), graph, lp, config, &fell_back);
  CHECK(fell_back);
  CHECK(out.rounded_labels(0) == out.rounded_labels(1));
}

TEST_CASE("threshold rounding requires hard with two levels") {
  const AffinityGraph graph = path_graph({1.0});
  const ModelConfig config{Variant::Hard, 3, 0.0, 0.0};
  const LpProblem lp = build(graph, config);
  CHECK_THROWS_AS(threshold_round(solution_with_labels(lp, {1.0, 1.0}), graph, lp, config),
                  std::invalid_argument);
}

TEST_CASE("threshold objective never exceeds nearest-integer rounding") {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> value(1.0, 2.0);
  for (int trial = 0; trial < 30; ++trial) {
    const AffinityGraph graph = random_instance(rng, [] {
      RandomInstanceOptions o;
      o.max_components = 0;  // unconstrained labels stress the thresholds
      return o;
    }());
    const ModelConfig config{Variant::Hard, 2, 0.0, 0.0};
    const LpProblem lp = build(graph, config);
    std::vector<double> labels(graph.node_count());
    for (double& v : labels) v = value(rng);
    const LpSolution sol = solution_with_labels(lp, labels);
    const DepthLabeling thresh = threshold_round(sol, graph, lp, config);
    const DepthLabeling nearest = round_and_compact(sol, graph, lp, config);
    CHECK(thresh.objective <= nearest.objective + 1e-9);
  }
}

TEST_CASE("object extraction is a partition refined by layers and adjacency") {
  std::mt19937_64 rng(59);
  std::uniform_int_distribution<int> label(1, 3);
  for (int trial = 0; trial < 30; ++trial) {
    const AffinityGraph graph = random_instance(rng);
    DepthLabeling labeling;
    labeling.rounded_labels.resize(graph.node_count());
    for (int i = 0; i < graph.node_count(); ++i) labeling.rounded_labels[i] = label(rng);
    const Eigen::VectorXi objects = extract_objects(labeling, graph);
    for (int i = 0; i < graph.node_count(); ++i) {
      if (labeling.rounded_labels[i] == 1) CHECK(objects[i] == 0);
      if (labeling.rounded_labels[i] > 1) CHECK(objects[i] >= 1);
    }
    for (const Edge& edge : graph.edges) {
      if (labeling.rounded_labels[edge.i] != labeling.rounded_labels[edge.j]) continue;
      CHECK(objects[edge.i] == objects[edge.j]);  // same label + adjacent => same object
    }
  }
}

TEST_CASE("slack report classifies rejected and weakened evidence") {
  DepthLabeling labeling;
  labeling.component_slacks = Eigen::Vector2d(0.0, 1.0);
  SlackReport report = slack_report(labeling);
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].component == 2);
  CHECK(report.entries[0].rejected);

  labeling.component_slacks = Eigen::VectorXd::Constant(1, 0.2);
  report = slack_report(labeling);
  REQUIRE(report.entries.size() == 1);
  CHECK(report.entries[0].component == 1);
  CHECK_FALSE(report.entries[0].rejected);

  labeling.component_slacks = Eigen::VectorXd();
  CHECK(slack_report(labeling).entries.empty());
}

TEST_CASE("anchoring pins every connected component at label one") {
  // Two disconnected edges.
  const AffinityGraph graph = make_graph(4, {{0, 1, 1.0}, {2, 3, 1.0}});
  Eigen::VectorXd labels(4);
  labels << 2.0, 3.0, 1.5, 1.5;
  const Eigen::VectorXd anchored = anchor_components(graph, labels);
  CHECK(anchored(0) == doctest::Approx(1.0));
  CHECK(anchored(1) == doctest::Approx(2.0));
  CHECK(anchored(2) == doctest::Approx(1.0));
  CHECK(anchored(3) == doctest::Approx(1.0));
}
