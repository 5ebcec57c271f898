#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "layerlp/labeling.hpp"
#include "layerlp/oracle.hpp"
#include "layerlp/pipeline.hpp"
#include "layerlp/simplex.hpp"
#include "test_support.hpp"

#include <limits>
#include <random>

using namespace layerlp;
using namespace layerlp::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

LpProblem one_dimensional() {
  // min x  s.t.  x >= 3, x <= 10, x >= 0.
  LpProblem lp;
  lp.num_vars = 1;
  lp.objective = {{0, 1.0}};
  lp.lower = Eigen::VectorXd::Zero(1);
  lp.upper = Eigen::VectorXd::Constant(1, kInf);
  lp.var_roles = {{VarRole::Label, 0, -1}};
  lp.rows.push_back({{{0, 1.0}}, Relation::GreaterEqual, 3.0});
  lp.rows.push_back({{{0, 1.0}}, Relation::LessEqual, 10.0});
  return lp;
}

}  // namespace

TEST_CASE("one dimensional LP") {
  const LpSolution sol = solve(one_dimensional());
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.values[0] == doctest::Approx(3.0));
  CHECK(sol.objective == doctest::Approx(3.0));
  CHECK(sol.max_constraint_violation <= 1e-7);
}

TEST_CASE("three node path, hard L=2: labels (1,2,2) with objective 1") {
  const AffinityGraph graph = path_graph({1.0, 1.0}, {{0, 1, 1}});
  ModelConfig config;
  config.variant = Variant::Hard;
  config.levels = 2;
  const LpSolution sol = solve(build(graph, config));
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(1.0));
  CHECK(sol.values[0] == doctest::Approx(1.0));
  CHECK(sol.values[1] == doctest::Approx(2.0));
  CHECK(sol.values[2] == doctest::Approx(2.0));
}

TEST_CASE("opposing seeds: hard infeasible, soft saturates the slacks") {
  const AffinityGraph graph = make_graph(2, {{0, 1, 10.0}}, {{0, 1, 1}, {1, 0, 2}});
  ModelConfig hard;
  hard.variant = Variant::Hard;
  hard.levels = 2;
  CHECK(solve(build(graph, hard)).status == SolveStatus::Infeasible);

  ModelConfig soft;
  soft.variant = Variant::Soft;
  soft.levels = 2;
  soft.lambda = 1.0;
  const LpProblem lp = build(graph, soft);
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.objective == doctest::Approx(2.0));
  CHECK(sol.values[0] == doctest::Approx(sol.values[1]));
  // Slack variables are the last two.
  CHECK(sol.values[3] == doctest::Approx(1.0));
  CHECK(sol.values[4] == doctest::Approx(1.0));
}

TEST_CASE("unbounded problems are reported") {
  LpProblem lp;
  lp.num_vars = 1;
  lp.objective = {{0, -1.0}};
  lp.lower = Eigen::VectorXd::Zero(1);
  lp.upper = Eigen::VectorXd::Constant(1, kInf);
  lp.var_roles = {{VarRole::Label, 0, -1}};
  lp.rows.push_back({{{0, 1.0}}, Relation::GreaterEqual, 1.0});
  CHECK(solve(lp).status == SolveStatus::Unbounded);
}

TEST_CASE("equality rows are honored") {
  // min x + y  s.t.  x + y = 4, x - y <= 1, x,y >= 0.
  LpProblem lp;
  lp.num_vars = 2;
  lp.objective = {{0, 1.0}, {1, 2.0}};
  lp.lower = Eigen::VectorXd::Zero(2);
  lp.upper = Eigen::VectorXd::Constant(2, kInf);
  lp.var_roles = {{VarRole::Label, 0, -1}, {VarRole::Label, 1, -1}};
  lp.rows.push_back({{{0, 1.0}, {1, 1.0}}, Relation::Equal, 4.0});
  lp.rows.push_back({{{0, 1.0}, {1, -1.0}}, Relation::LessEqual, 1.0});
  const LpSolution sol = solve(lp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  // Cheapest mix: x as large as allowed (x - y <= 1, x + y = 4 -> x = 2.5).
  CHECK(sol.values[0] == doctest::Approx(2.5));
  CHECK(sol.values[1] == doctest::Approx(1.5));
  CHECK(sol.objective == doctest::Approx(5.5));
}

TEST_CASE("determinism: repeated solves produce identical bit patterns") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 5; ++i) {
    const AffinityGraph graph = random_instance(rng);
    ModelConfig config;
    config.variant = Variant::MdlSoft;
    config.gamma = 0.35;
    config.lambda = 0.9;
    const LpProblem lp = build(graph, config);
    const LpSolution a = solve(lp);
    const LpSolution b = solve(lp);
    REQUIRE(a.status == b.status);
    REQUIRE(a.values.size() == b.values.size());
    for (Eigen::Index v = 0; v < a.values.size(); ++v) CHECK(a.values[v] == b.values[v]);
    CHECK(a.objective == b.objective);
    CHECK(a.iterations == b.iterations);
  }
}

TEST_CASE("scale equivariance: scaling costs scales the optimum") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 10; ++i) {
    const AffinityGraph graph = random_instance(rng);
    ModelConfig config;
    config.variant = Variant::Hard;
    config.levels = 2;
    LpProblem lp = build(graph, config);
    const LpSolution base = solve(lp);
    if (base.status != SolveStatus::Optimal) continue;
    const double t = 3.5;
    for (auto& [var, coeff] : lp.objective) coeff *= t;
    const LpSolution scaled = solve(lp);
    REQUIRE(scaled.status == SolveStatus::Optimal);
    CHECK(scaled.objective == doctest::Approx(t * base.objective).epsilon(1e-9));
    CHECK(scaled.max_constraint_violation <= 1e-7);
  }
}

TEST_CASE("idempotence: restarting on the solved problem repeats the objective") {
  std::mt19937_64 rng(13);
  const AffinityGraph graph = random_instance(rng);
  ModelConfig config;
  config.variant = Variant::Mdl;
  config.gamma = 0.2;
  const LpProblem lp = build(graph, config);
  const LpSolution first = solve(lp);
  REQUIRE(first.status == SolveStatus::Optimal);
  const LpSolution second = solve(lp);
  CHECK(second.objective == doctest::Approx(first.objective).epsilon(1e-9));
}

TEST_CASE("oracle sandwich on random instances, every variant") {
  std::mt19937_64 rng(17);
  ModelConfig configs[4];
  configs[0] = {Variant::Hard, 2, 0.0, 0.0};
  configs[1] = {Variant::Mdl, 2, 0.35, 0.0};
  configs[2] = {Variant::Soft, 2, 0.0, 0.9};
  configs[3] = {Variant::MdlSoft, 2, 0.35, 0.9};
  for (int i = 0; i < 30; ++i) {
    const AffinityGraph graph = random_instance(rng);
    for (const ModelConfig& config : configs) {
      const int max_label = variant_has_sigma(config.variant) ? 3 : config.levels;
      const OracleResult oracle = enumerate_optimum(graph, config, max_label);
      const PipelineResult pipe = solve_depth(graph, config);
      REQUIRE(oracle.feasible);
      REQUIRE(pipe.solution.status == SolveStatus::Optimal);
      CHECK(pipe.solution.objective <= oracle.best_objective + 1e-6);
      CHECK(oracle.best_objective <= pipe.labeling.objective + 1e-6);
      CHECK(pipe.solution.max_constraint_violation <= 1e-7);
    }
  }
}

TEST_CASE("soft rows permit equality but never inversion") {
  // xi <= 1 can close the gap to zero but cannot flip the order; rounded
  // soft solutions therefore never invert a seed pair.
  std::mt19937_64 rng(19);
  for (int i = 0; i < 20; ++i) {
    const AffinityGraph graph = random_instance(rng);
    ModelConfig config;
    config.variant = Variant::Soft;
    config.levels = 3;
    config.lambda = 0.1;  // cheap slacks make violations attractive
    const PipelineResult pipe = solve_depth(graph, config);
    REQUIRE(pipe.solution.status == SolveStatus::Optimal);
    for (const auto& component : graph.seeds.components)
      for (const SeedPair& pair : component) {
        CHECK(pipe.labeling.rounded_labels[pair.occluder] >= pipe.labeling.rounded_labels[pair.occluded]);
        CHECK(pipe.solution.values[pair.occluder] >= pipe.solution.values[pair.occluded] - 1e-6);
      }
  }
}

TEST_CASE("fixing labels to an oracle optimum reproduces its objective") {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 10; ++i) {
    const AffinityGraph graph = random_instance(rng);
    ModelConfig config;
    config.variant = Variant::MdlSoft;
    config.gamma = 0.35;
    config.lambda = 0.9;
    const OracleResult oracle = enumerate_optimum(graph, config, 3);
    REQUIRE(oracle.feasible);
    LpProblem lp = build(graph, config);
    const Eigen::VectorXi& labels = oracle.best_labelings[0];
    for (int v = 0; v < graph.node_count(); ++v) {
      lp.lower[v] = labels[v];
      lp.upper[v] = labels[v];
    }
    const LpSolution sol = solve(lp);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.objective == doctest::Approx(oracle.best_objective).epsilon(1e-7));
  }
}
