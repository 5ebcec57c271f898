#include "layerlp/graph.hpp"

#include "layerlp/image.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace layerlp {
namespace {

using json = nlohmann::json;

std::string role_name(RegionRole role) {
  switch (role) {
    case RegionRole::Free: return "free";
    case RegionRole::Occluded: return "occluded";
    case RegionRole::Occluder: return "occluder";
  }
  return "?";
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

std::string ValidationReport::to_string() const {
  std::ostringstream out;
  for (const auto& issue : issues) out << issue.message << "\n";
  return out.str();
}

ValidationReport validate(const AffinityGraph& graph) {
  ValidationReport report;
  auto add = [&report](const std::string& msg, bool metadata_only = false) {
    report.issues.push_back({msg, metadata_only});
  };
  const int n = graph.node_count();

  for (int i = 0; i < n; ++i) {
    const Node& node = graph.nodes[i];
    if (node.id != i) add("node " + std::to_string(i) + ": id " + std::to_string(node.id) + " is not dense (expected " + std::to_string(i) + ")");
    if (node.area < 1) add("node " + std::to_string(i) + ": area " + std::to_string(node.area) + " < 1");
    if (!(node.mean_intensity >= 0.0 && node.mean_intensity <= 1.0))
      add("node " + std::to_string(i) + ": mean_intensity " + std::to_string(node.mean_intensity) + " outside [0,1]");
    if (!finite(node.centroid.x()) || !finite(node.centroid.y()) || !finite(node.mean_flow.x()) || !finite(node.mean_flow.y()))
      add("node " + std::to_string(i) + ": non-finite centroid or flow");
    const RegionClass& rc = node.region_class;
    if (rc.role == RegionRole::Free && rc.component != 0)
      add("node " + std::to_string(i) + ": free node carries component " + std::to_string(rc.component), true);
    if (rc.role != RegionRole::Free && (rc.component < 1 || rc.component > graph.seeds.component_count()))
      add("node " + std::to_string(i) + ": " + role_name(rc.role) + " component " + std::to_string(rc.component) + " out of range", true);
  }

  std::set<std::pair<int, int>> seen;
  for (int e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edges[e];
    if (edge.i == edge.j) add("edge " + std::to_string(e) + ": self loop at node " + std::to_string(edge.i));
    if (!(edge.i < edge.j)) add("edge " + std::to_string(e) + ": endpoints (" + std::to_string(edge.i) + "," + std::to_string(edge.j) + ") not ordered i < j");
    if (edge.i < 0 || edge.i >= n || edge.j < 0 || edge.j >= n)
      add("edge " + std::to_string(e) + ": endpoint out of range");
    else if (!seen.insert({std::min(edge.i, edge.j), std::max(edge.i, edge.j)}).second)
      add("edge " + std::to_string(e) + ": duplicate undirected pair (" + std::to_string(edge.i) + "," + std::to_string(edge.j) + ")");
    if (edge.boundary_length < 0) add("edge " + std::to_string(e) + ": boundary_length < 0");
    if (!(edge.pb_mean >= 0.0 && edge.pb_mean <= 1.0)) add("edge " + std::to_string(e) + ": pb_mean outside [0,1]");
    if (edge.weight < 0 || !finite(edge.weight)) add("edge " + std::to_string(e) + ": weight negative or non-finite");
  }

  for (int k = 0; k < graph.seeds.component_count(); ++k) {
    for (std::size_t p = 0; p < graph.seeds.components[k].size(); ++p) {
      const SeedPair& pair = graph.seeds.components[k][p];
      const std::string where = "seed component " + std::to_string(k + 1) + " pair " + std::to_string(p);
      if (pair.occluded < 0 || pair.occluded >= n || pair.occluder < 0 || pair.occluder >= n) {
        add(where + ": node index out of range (" + std::to_string(pair.occluded) + "," + std::to_string(pair.occluder) + ")");
        continue;
      }
      const auto key = std::minmax(pair.occluded, pair.occluder);
      if (!seen.count({key.first, key.second}))
        add(where + ": (" + std::to_string(pair.occluded) + "," + std::to_string(pair.occluder) + ") is not a graph edge");
      const RegionClass& ci = graph.nodes[pair.occluded].region_class;
      const RegionClass& cj = graph.nodes[pair.occluder].region_class;
      if (ci.role != RegionRole::Occluded || ci.component != k + 1)
        add(where + ": node " + std::to_string(pair.occluded) + " is " + role_name(ci.role) + "(" + std::to_string(ci.component) + "), expected occluded(" + std::to_string(k + 1) + ")", true);
      if (cj.role != RegionRole::Occluder || cj.component != k + 1)
        add(where + ": node " + std::to_string(pair.occluder) + " is " + role_name(cj.role) + "(" + std::to_string(cj.component) + "), expected occluder(" + std::to_string(k + 1) + ")", true);
    }
  }
  return report;
}

std::string graph_to_json(const AffinityGraph& graph) {
  json doc;
  json nodes = json::array();
  for (const Node& node : graph.nodes) {
    nodes.push_back({{"id", node.id},
                     {"centroid", {node.centroid.x(), node.centroid.y()}},
                     {"area", node.area},
                     {"intensity", node.mean_intensity},
                     {"flow", {node.mean_flow.x(), node.mean_flow.y()}}});
  }
  doc["nodes"] = std::move(nodes);
  json edges = json::array();
  for (const Edge& edge : graph.edges) {
    json e = {{"i", edge.i}, {"j", edge.j}, {"boundary_length", edge.boundary_length}, {"pb", edge.pb_mean}};
    if (graph.has_weights) e["weight"] = edge.weight;
    edges.push_back(std::move(e));
  }
  doc["edges"] = std::move(edges);
  json seeds = json::array();
  for (int k = 0; k < graph.seeds.component_count(); ++k) {
    json pairs = json::array();
    for (const SeedPair& pair : graph.seeds.components[k]) pairs.push_back({pair.occluded, pair.occluder});
    seeds.push_back({{"component", k + 1}, {"pairs", std::move(pairs)}});
  }
  doc["seeds"] = std::move(seeds);
  if (graph.has_weights) doc["weights_precomputed"] = true;
  return doc.dump(2);
}

AffinityGraph graph_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("graph document: invalid JSON: ") + e.what());
  }
  for (const char* key : {"nodes", "edges", "seeds"})
    if (!doc.contains(key)) throw std::runtime_error(std::string("graph document: missing \"") + key + "\"");

  AffinityGraph graph;
  graph.has_weights = doc.value("weights_precomputed", false);
  for (const auto& jn : doc["nodes"]) {
    Node node;
    node.id = jn.at("id").get<int>();
    node.centroid = Vec2(jn.at("centroid").at(0).get<double>(), jn.at("centroid").at(1).get<double>());
    node.area = jn.at("area").get<std::int64_t>();
    node.mean_intensity = jn.at("intensity").get<double>();
    node.mean_flow = Vec2(jn.at("flow").at(0).get<double>(), jn.at("flow").at(1).get<double>());
    graph.nodes.push_back(node);
  }
  for (const auto& je : doc["edges"]) {
    Edge edge;
    edge.i = je.at("i").get<int>();
    edge.j = je.at("j").get<int>();
    edge.boundary_length = je.at("boundary_length").get<double>();
    edge.pb_mean = je.at("pb").get<double>();
    if (graph.has_weights) edge.weight = je.at("weight").get<double>();
    graph.edges.push_back(edge);
  }
  int max_component = 0;
  for (const auto& js : doc["seeds"]) max_component = std::max(max_component, js.at("component").get<int>());
  graph.seeds.components.resize(max_component);
  for (const auto& js : doc["seeds"]) {
    const int k = js.at("component").get<int>();
    if (k < 1) throw std::runtime_error("graph document: seed component index " + std::to_string(k) + " < 1");
    for (const auto& jp : js.at("pairs"))
      graph.seeds.components[k - 1].push_back({jp.at(0).get<int>(), jp.at(1).get<int>()});
  }
  // Region classes are implied by seed membership.
  const int n = graph.node_count();
  for (int k = 0; k < graph.seeds.component_count(); ++k)
    for (const SeedPair& pair : graph.seeds.components[k]) {
      if (pair.occluded >= 0 && pair.occluded < n)
        graph.nodes[pair.occluded].region_class = {RegionRole::Occluded, k + 1};
      if (pair.occluder >= 0 && pair.occluder < n)
        graph.nodes[pair.occluder].region_class = {RegionRole::Occluder, k + 1};
    }
  return graph;
}

void save_graph(const std::string& path, const AffinityGraph& graph) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << graph_to_json(graph) << "\n";
}

AffinityGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return graph_from_json(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

std::string labeling_to_json(const DepthLabeling& labeling) {
  json doc;
  doc["labels"] = std::vector<int>(labeling.rounded_labels.begin(), labeling.rounded_labels.end());
  doc["sigma"] = labeling.sigma_hat;
  doc["objective"] = labeling.objective;
  doc["slacks"] = std::vector<double>(labeling.component_slacks.begin(), labeling.component_slacks.end());
  doc["objects"] = std::vector<int>(labeling.object_map.begin(), labeling.object_map.end());
  return doc.dump(2);
}

DepthLabeling labeling_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("labeling document: invalid JSON: ") + e.what());
  }
  for (const char* key : {"labels", "sigma", "objective"})
    if (!doc.contains(key)) throw std::runtime_error(std::string("labeling document: missing \"") + key + "\"");
  DepthLabeling labeling;
  const auto labels = doc["labels"].get<std::vector<int>>();
  labeling.rounded_labels = Eigen::Map<const Eigen::VectorXi>(labels.data(), static_cast<Eigen::Index>(labels.size()));
  labeling.real_labels = labeling.rounded_labels.cast<double>();
  labeling.sigma_hat = doc["sigma"].get<int>();
  labeling.objective = doc["objective"].get<double>();
  if (doc.contains("slacks")) {
    const auto slacks = doc["slacks"].get<std::vector<double>>();
    labeling.component_slacks = Eigen::Map<const Eigen::VectorXd>(slacks.data(), static_cast<Eigen::Index>(slacks.size()));
  }
  if (doc.contains("objects")) {
    const auto objects = doc["objects"].get<std::vector<int>>();
    labeling.object_map = Eigen::Map<const Eigen::VectorXi>(objects.data(), static_cast<Eigen::Index>(objects.size()));
  }
  return labeling;
}

void save_labeling(const std::string& path, const DepthLabeling& labeling) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << labeling_to_json(labeling) << "\n";
}

DepthLabeling load_labeling(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return labeling_from_json(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void save_region_map(const std::string& path, const RegionMap& regions) {
  const int max_id = regions.ids.size() > 0 ? regions.ids.maxCoeff() : 0;
  write_pgm(path, regions.ids, std::max(255, max_id));
}

RegionMap load_region_map(const std::string& path) {
  int maxval = 0;
  RegionMap regions;
  regions.ids = read_pgm(path, maxval);
  return regions;
}

}  // namespace layerlp
