#include "layerlp/lp.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace layerlp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool variant_has_sigma(Variant v) { return v == Variant::Mdl || v == Variant::MdlSoft; }
bool variant_has_slacks(Variant v) { return v == Variant::Soft || v == Variant::MdlSoft; }

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::Hard: return "hard";
    case Variant::Mdl: return "mdl";
    case Variant::Soft: return "soft";
    case Variant::MdlSoft: return "mdl-soft";
  }
  return "?";
}

Variant variant_from_name(const std::string& name) {
  if (name == "hard") return Variant::Hard;
  if (name == "mdl") return Variant::Mdl;
  if (name == "soft") return Variant::Soft;
  if (name == "mdl-soft" || name == "mdl_soft") return Variant::MdlSoft;
  throw std::invalid_argument("unknown variant '" + name + "'");
}

LpProblem build(const AffinityGraph& graph, const ModelConfig& config) {
  const bool bounded_levels = !variant_has_sigma(config.variant);
  if (bounded_levels && config.levels < 2)
    throw std::invalid_argument("build: levels must be >= 2 for " + variant_name(config.variant));
  if (variant_has_sigma(config.variant) && config.gamma < 0)
    throw std::invalid_argument("build: gamma must be >= 0");
  if (variant_has_slacks(config.variant) && config.lambda < 0)
    throw std::invalid_argument("build: lambda must be >= 0");

  const int n = graph.node_count();
  const int m = graph.edge_count();
  const int num_components = graph.seeds.component_count();

  // Seed pairs must be graph edges; fail fast with the offending pair.
  {
    std::set<std::pair<int, int>> edge_set;
    for (const Edge& e : graph.edges) edge_set.insert(std::minmax(e.i, e.j));
    for (int k = 0; k < num_components; ++k)
      for (const SeedPair& p : graph.seeds.components[k]) {
        if (p.occluded < 0 || p.occluded >= n || p.occluder < 0 || p.occluder >= n ||
            !edge_set.count(std::minmax(p.occluded, p.occluder)))
          throw std::invalid_argument("build: seed pair (" + std::to_string(p.occluded) + "," +
                                      std::to_string(p.occluder) + ") in component " + std::to_string(k + 1) +
                                      " is not a graph edge");
      }
  }

  LpProblem lp;
  const int sigma_var = variant_has_sigma(config.variant) ? n + m : -1;
  const int first_slack = variant_has_slacks(config.variant) ? n + m + (sigma_var >= 0 ? 1 : 0) : -1;
  lp.num_vars = n + m + (sigma_var >= 0 ? 1 : 0) + (first_slack >= 0 ? num_components : 0);

  lp.lower.resize(lp.num_vars);
  lp.upper.resize(lp.num_vars);
  lp.var_roles.resize(lp.num_vars);
  for (int i = 0; i < n; ++i) {
    lp.var_roles[i] = {VarRole::Label, i, -1};
    lp.lower[i] = 1.0;
    lp.upper[i] = bounded_levels ? double(config.levels) : kInf;
  }
  for (int e = 0; e < m; ++e) {
    lp.var_roles[n + e] = {VarRole::AuxU, graph.edges[e].i, graph.edges[e].j};
    lp.lower[n + e] = 0.0;
    lp.upper[n + e] = kInf;
  }
  if (sigma_var >= 0) {
    lp.var_roles[sigma_var] = {VarRole::Sigma, -1, -1};
    lp.lower[sigma_var] = 1.0;
    lp.upper[sigma_var] = kInf;
  }
  if (first_slack >= 0)
    for (int k = 0; k < num_components; ++k) {
      lp.var_roles[first_slack + k] = {VarRole::Slack, k + 1, -1};
      lp.lower[first_slack + k] = 0.0;
      lp.upper[first_slack + k] = 1.0;
    }

  for (int e = 0; e < m; ++e) lp.objective.push_back({n + e, graph.edges[e].weight});
  if (sigma_var >= 0) lp.objective.push_back({sigma_var, config.gamma});
  if (first_slack >= 0)
    for (int k = 0; k < num_components; ++k) lp.objective.push_back({first_slack + k, config.lambda});

  // Seed rows: c_j - c_i (+ xi_k) >= 1.
  for (int k = 0; k < num_components; ++k)
    for (const SeedPair& p : graph.seeds.components[k]) {
      ConstraintRow row;
      const int lo = std::min(p.occluded, p.occluder);
      const int hi = std::max(p.occluded, p.occluder);
      const double lo_coeff = (lo == p.occluded) ? -1.0 : 1.0;
      row.coeffs.push_back({lo, lo_coeff});
      row.coeffs.push_back({hi, -lo_coeff});
      if (first_slack >= 0) row.coeffs.push_back({first_slack + k, 1.0});
      row.relation = Relation::GreaterEqual;
      row.rhs = 1.0;
      lp.rows.push_back(std::move(row));
    }

  // Absolute-value rows: c_i - c_j <= u and c_j - c_i <= u.
  for (int e = 0; e < m; ++e) {
    const int i = graph.edges[e].i, j = graph.edges[e].j;
    lp.rows.push_back({{{i, 1.0}, {j, -1.0}, {n + e, -1.0}}, Relation::LessEqual, 0.0});
    lp.rows.push_back({{{i, -1.0}, {j, 1.0}, {n + e, -1.0}}, Relation::LessEqual, 0.0});
  }

  // Ceiling rows: c_i <= sigma.
  if (sigma_var >= 0)
    for (int i = 0; i < n; ++i)
      lp.rows.push_back({{{i, 1.0}, {sigma_var, -1.0}}, Relation::LessEqual, 0.0});

  return lp;
}

double objective_value(const LpProblem& problem, const Eigen::VectorXd& values) {
  double total = 0.0;
  for (const auto& [var, coeff] : problem.objective) total += coeff * values[var];
  return total;
}

double constraint_violation(const LpProblem& problem, const Eigen::VectorXd& values) {
  double worst = 0.0;
  for (const ConstraintRow& row : problem.rows) {
    double lhs = 0.0;
    for (const auto& [var, coeff] : row.coeffs) lhs += coeff * values[var];
    double v = 0.0;
    switch (row.relation) {
      case Relation::LessEqual: v = lhs - row.rhs; break;
      case Relation::GreaterEqual: v = row.rhs - lhs; break;
      case Relation::Equal: v = std::abs(lhs - row.rhs); break;
    }
    worst = std::max(worst, v);
  }
  for (int i = 0; i < problem.num_vars; ++i) {
    worst = std::max(worst, problem.lower[i] - values[i]);
    if (std::isfinite(problem.upper[i])) worst = std::max(worst, values[i] - problem.upper[i]);
  }
  return worst;
}

namespace {

std::string var_name(const VarInfo& info, int index) {
  switch (info.role) {
    case VarRole::Label: return "c" + std::to_string(info.a);
    case VarRole::AuxU: return "u" + std::to_string(info.a) + "_" + std::to_string(info.b);
    case VarRole::Sigma: return "sigma";
    case VarRole::Slack: return "xi" + std::to_string(info.a);
  }
  return "x" + std::to_string(index);
}

}  // namespace

std::string to_mps(const LpProblem& problem, const std::string& name) {
  std::ostringstream out;
  out.precision(12);
  out << "NAME " << name << "\n";
  out << "ROWS\n N COST\n";
  for (std::size_t r = 0; r < problem.rows.size(); ++r) {
    const char rel = problem.rows[r].relation == Relation::LessEqual      ? 'L'
                     : problem.rows[r].relation == Relation::GreaterEqual ? 'G'
                                                                          : 'E';
    out << " " << rel << " R" << r << "\n";
  }
  // Column-major entries: objective first, then each row coefficient.
  std::vector<std::vector<std::pair<std::string, double>>> columns(problem.num_vars);
  for (const auto& [var, coeff] : problem.objective) columns[var].push_back({"COST", coeff});
  for (std::size_t r = 0; r < problem.rows.size(); ++r)
    for (const auto& [var, coeff] : problem.rows[r].coeffs)
      columns[var].push_back({"R" + std::to_string(r), coeff});
  out << "COLUMNS\n";
  for (int v = 0; v < problem.num_vars; ++v) {
    const std::string nm = var_name(problem.var_roles[v], v);
    for (const auto& [row, coeff] : columns[v]) out << "    " << nm << " " << row << " " << coeff << "\n";
  }
  out << "RHS\n";
  for (std::size_t r = 0; r < problem.rows.size(); ++r)
    if (problem.rows[r].rhs != 0.0) out << "    RHS R" << r << " " << problem.rows[r].rhs << "\n";
  out << "BOUNDS\n";
  for (int v = 0; v < problem.num_vars; ++v) {
    const std::string nm = var_name(problem.var_roles[v], v);
    out << " LO BND " << nm << " " << problem.lower[v] << "\n";
    if (std::isfinite(problem.upper[v]))
      out << " UP BND " << nm << " " << problem.upper[v] << "\n";
    else
      out << " PL BND " << nm << "\n";
  }
  out << "ENDATA\n";
  return out.str();
}

}  // namespace layerlp
