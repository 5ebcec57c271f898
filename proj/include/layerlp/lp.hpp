#pragma once

#include "layerlp/graph.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace layerlp {

enum class Variant { Hard, Mdl, Soft, MdlSoft };

bool variant_has_sigma(Variant v);
bool variant_has_slacks(Variant v);
std::string variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct ModelConfig {
  Variant variant = Variant::Hard;
  int levels = 4;        // label upper bound L; Hard/Soft only
  double gamma = 0.1;    // layer cost; Mdl variants
  double lambda = 50.0;  // seed violation penalty; Soft variants
};

enum class Relation { LessEqual, GreaterEqual, Equal };

enum class VarRole { Label, AuxU, Sigma, Slack };

struct VarInfo {
  VarRole role = VarRole::Label;
  int a = -1;  // Label: node id; AuxU: edge endpoint i; Slack: component k (1-based)
  int b = -1;  // AuxU: edge endpoint j
};

struct ConstraintRow {
  std::vector<std::pair<int, double>> coeffs;  // sorted by variable index
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;
};

struct LpProblem {
  int num_vars = 0;
  std::vector<std::pair<int, double>> objective;  // sparse, ascending variable index
  std::vector<ConstraintRow> rows;
  Eigen::VectorXd lower;  // per-variable bounds; upper may be +inf
  Eigen::VectorXd upper;
  std::vector<VarInfo> var_roles;
};

// Variable layout: labels by node id, aux u by edge order, then sigma (Mdl
// variants), then one slack per seed component (Soft variants). Row layout:
// seed rows by component then pair order, the two absolute-value rows per
// edge, then the c_i <= sigma rows.
//
// Hard:     min sum w u          1 <= c <= L,  c_j - c_i >= 1
// Mdl:      min sum w u + g*s    1 <= c <= s (rows), seed rows hard
// Soft:     min sum w u + l*sum xi,  seed rows c_j - c_i + xi_k >= 1, xi in [0,1]
// MdlSoft:  union of Mdl and Soft structure.
LpProblem build(const AffinityGraph& graph, const ModelConfig& config);

// Objective value of the given assignment under the problem's cost vector.
double objective_value(const LpProblem& problem, const Eigen::VectorXd& values);

// Largest violation of any row or bound at the given assignment.
double constraint_violation(const LpProblem& problem, const Eigen::VectorXd& values);

// Free-form MPS dump (minimization) for external solver debugging.
std::string to_mps(const LpProblem& problem, const std::string& name = "layerlp");

}  // namespace layerlp
