// Command-line frontend: synthetic scenes, graph construction, depth-layer
// solves, temporal propagation, gamma sweeps, evaluation, and the
// enumeration oracle, wired through the JSON/PGM formats.

#include "layerlp/affinity.hpp"
#include "layerlp/evaluation.hpp"
#include "layerlp/labeling.hpp"
#include "layerlp/oracle.hpp"
#include "layerlp/pipeline.hpp"
#include "layerlp/synth.hpp"
#include "layerlp/temporal.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using json = nlohmann::json;
using namespace layerlp;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitSolverFailure = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string frame_name(const std::string& stem, int t, const std::string& ext) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_%03d.", t);
  return stem + buf + ext;
}

// --- solve plumbing shared by `solve` and `temporal` -------------------------

struct SolveFlags {
  std::string variant_name = "mdl-soft";
  int levels = 0;  // 0 = not given
  double gamma = 0.1;
  double lambda = 50.0;
  double alpha = 0.25, beta = 0.5, kappa = 0.25;
  std::string rounding = "nearest";
  double feas_tol = 1e-7, opt_tol = 1e-7;
  std::int64_t max_iters = 0;
  std::string out;
  std::string render_path;
  std::string regions_path;
  std::string mps_path;
};

void add_solve_flags(CLI::App* cmd, SolveFlags& flags, bool with_out = true, bool with_regions = true) {
  cmd->add_option("--variant", flags.variant_name,
                  "Model variant: hard|mdl|soft|mdl-soft (mdl-soft combines the mdl and soft "
                  "models; an extension beyond the published pair)")
      ->default_val("mdl-soft");
  cmd->add_option("--levels", flags.levels, "Label upper bound L (required for hard and soft; suggested 4)");
  cmd->add_option("--gamma", flags.gamma, "Layer cost for the mdl variants")->default_val(0.1);
  cmd->add_option("--lambda", flags.lambda, "Seed violation penalty for the soft variants")->default_val(50.0);
  cmd->add_option("--alpha", flags.alpha, "Intensity affinity coefficient")->default_val(0.25);
  cmd->add_option("--beta", flags.beta, "Motion affinity coefficient")->default_val(0.5);
  cmd->add_option("--kappa", flags.kappa, "Boundary-probability affinity coefficient")->default_val(0.25);
  cmd->add_option("--rounding", flags.rounding, "Rounding: nearest|threshold (threshold needs hard, L=2)")
      ->default_val("nearest");
  cmd->add_option("--feas-tol", flags.feas_tol, "Solver feasibility tolerance")->default_val(1e-7);
  cmd->add_option("--opt-tol", flags.opt_tol, "Solver optimality tolerance")->default_val(1e-7);
  cmd->add_option("--max-iters", flags.max_iters, "Solver iteration limit (0 = automatic)")->default_val(0);
  if (with_out) {
    cmd->add_option("--out", flags.out, "Output labeling JSON")->required();
    cmd->add_option("--render", flags.render_path, "Write a gray-coded PGM layer map (needs --regions)");
    if (with_regions) cmd->add_option("--regions", flags.regions_path, "Region map PGM matching the graph");
    cmd->add_option("--mps", flags.mps_path, "Dump the LP in free MPS form");
  }
}

ModelConfig config_from_flags(const SolveFlags& flags) {
  ModelConfig config;
  config.variant = variant_from_name(flags.variant_name);
  const bool needs_levels = config.variant == Variant::Hard || config.variant == Variant::Soft;
  if (needs_levels && flags.levels == 0)
    throw UsageError("--levels is required for --variant " + flags.variant_name);
  if (flags.levels != 0 && flags.levels < 2) throw UsageError("--levels must be at least 2");
  if (flags.levels != 0) config.levels = flags.levels;
  config.gamma = flags.gamma;
  config.lambda = flags.lambda;
  return config;
}

int run_and_emit(const AffinityGraph& graph, const SolveFlags& flags) {
  const ModelConfig config = config_from_flags(flags);
  PipelineOptions options;
  options.affinity = {flags.alpha, flags.beta, flags.kappa, 1.5};
  options.solver = {flags.feas_tol, flags.opt_tol, flags.max_iters};
  if (flags.rounding == "threshold") {
    if (config.variant != Variant::Hard || config.levels != 2)
      throw UsageError("--rounding threshold requires --variant hard --levels 2");
    options.threshold_rounding = true;
  } else if (flags.rounding != "nearest") {
    throw UsageError("--rounding must be nearest or threshold");
  }

  PipelineResult result;
  try {
    result = solve_depth(graph, config, options);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }

  if (!flags.mps_path.empty()) {
    std::ofstream mps(flags.mps_path);
    if (!mps) throw InputError(flags.mps_path + ": cannot open for writing");
    mps << to_mps(result.problem);
  }

  if (result.solution.status == SolveStatus::Infeasible) {
    std::cerr << "infeasible: the seed ordering constraints contradict each other (hard/mdl variants)\n";
    return kExitInfeasible;
  }
  if (result.solution.status != SolveStatus::Optimal) {
    std::cerr << "solver failed: status " << status_name(result.solution.status) << "\n";
    return kExitSolverFailure;
  }

  save_labeling(flags.out, result.labeling);
  std::cout << "status optimal: objective " << result.labeling.objective << ", layers "
            << result.labeling.sigma_hat << ", objects "
            << (result.labeling.object_map.size() > 0 ? result.labeling.object_map.maxCoeff() : 0) << "\n";
  if (result.rounding_fell_back) std::cerr << "warning: no feasible threshold, fell back to nearest rounding\n";
  const SlackReport slacks = slack_report(result.labeling);
  if (!slacks.entries.empty()) std::cout << slacks.to_string();

  if (!flags.render_path.empty()) {
    if (flags.regions_path.empty()) throw UsageError("--render needs --regions to map labels onto pixels");
    const RegionMap regions = load_region_map(flags.regions_path);
    LabelImage gray(regions.ids.rows(), regions.ids.cols());
    const int sigma = std::max(1, result.labeling.sigma_hat);
    for (Eigen::Index y = 0; y < gray.rows(); ++y)
      for (Eigen::Index x = 0; x < gray.cols(); ++x) {
        const int node = regions.ids(y, x);
        if (node < 0 || node >= result.labeling.rounded_labels.size())
          throw InputError(flags.regions_path + ": region id out of range of the labeling");
        gray(y, x) = result.labeling.rounded_labels[node] * 255 / sigma;
      }
    write_pgm(flags.render_path, gray, 255);
  }
  return kExitOk;
}

// --- subcommands -------------------------------------------------------------

int cmd_synth(const std::string& spec_path, int frames, const std::string& out_dir,
              std::optional<std::uint64_t> seed_override) {
  SceneSpec spec = load_scene(spec_path);
  if (seed_override) spec.rng_seed = *seed_override;
  std::filesystem::create_directories(out_dir);
  const auto path = [&out_dir](const std::string& name) { return out_dir + "/" + name; };
  for (int t = 0; t < frames; ++t) {
    const RenderedFrame frame = render(spec, t);
    write_intensity_pgm(path(frame_name("image", t, "pgm")), frame.image);
    write_flow_json(path(frame_name("flow_fwd", t, "json")), frame.flow_forward);
    write_flow_json(path(frame_name("flow_bwd", t, "json")), frame.flow_backward);
    write_mask_pgm(path(frame_name("omega_fwd", t, "pgm")), frame.omega_plus);
    write_mask_pgm(path(frame_name("omega_bwd", t, "pgm")), frame.omega_minus);
    write_mask_pgm(path(frame_name("occluder_fwd", t, "pgm")), frame.occluder_plus);
    write_mask_pgm(path(frame_name("occluder_bwd", t, "pgm")), frame.occluder_minus);
    write_pgm(path(frame_name("truth", t, "pgm")), frame.truth, 255);
    write_intensity_pgm(path(frame_name("pb", t, "pgm")), frame.pb);
    const SeedMasks seeds =
        corrupt_seeds(exact_seed_masks(frame), spec.noise, spec.rng_seed + static_cast<std::uint64_t>(t));
    write_mask_pgm(path(frame_name("seeds_occluded", t, "pgm")), seeds.occluded);
    write_mask_pgm(path(frame_name("seeds_occluder", t, "pgm")), seeds.occluder);
  }
  std::cout << "wrote " << frames << " frame(s) to " << out_dir << "\n";
  return kExitOk;
}

int cmd_graph(const std::string& image_path, const std::string& flow_path, const std::string& occluded_path,
              const std::string& occluder_path, const std::string& pb_path, int superpixels,
              const std::string& out_path, const std::string& regions_out, const std::string& truth_path,
              const std::string& truth_out, double alpha, double beta, double kappa, int band_width,
              bool store_weights) {
  const Image image = read_intensity_pgm(image_path);
  const FlowField flow = read_flow_json(flow_path);
  const Mask occluded = read_mask_pgm(occluded_path);
  Mask occluder;
  if (!occluder_path.empty()) {
    occluder = read_mask_pgm(occluder_path);
  } else if (occluded.any()) {
    const int width = band_width > 0 ? band_width : default_band_width(occluded);
    const OccluderBand band = build_occluder_band(occluded, width);
    if (band.clipped_at_border)
      std::cerr << "warning: occluder band clipped at the image border\n";
    occluder = band.band;
  } else {
    occluder = Mask::Constant(occluded.rows(), occluded.cols(), false);
  }
  std::optional<Image> pb;
  if (!pb_path.empty()) pb = read_intensity_pgm(pb_path);

  SuperpixelResult result;
  try {
    result = superpixelize(image, flow, occluded, occluder, pb ? &*pb : nullptr, superpixels,
                           {alpha, beta, kappa, 1.5});
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  result.graph.has_weights = store_weights;
  save_graph(out_path, result.graph);
  if (!regions_out.empty()) save_region_map(regions_out, result.regions);

  if (!truth_path.empty()) {
    if (truth_out.empty()) throw UsageError("--truth needs --truth-out for the node-level document");
    int maxval = 0;
    const LabelImage truth = read_pgm(truth_path, maxval);
    if (truth.rows() != image.rows() || truth.cols() != image.cols())
      throw InputError(truth_path + ": truth dimensions do not match the image");
    const int n = result.graph.node_count();
    std::vector<std::map<int, int>> votes(n);
    for (Eigen::Index y = 0; y < truth.rows(); ++y)
      for (Eigen::Index x = 0; x < truth.cols(); ++x) ++votes[result.regions.ids(y, x)][truth(y, x)];
    std::vector<int> node_label(n, 1);
    int max_label = 0;
    for (int i = 0; i < n; ++i) {
      int best = 1, count = 0;
      for (const auto& [label, c] : votes[i])
        if (c > count) {
          count = c;
          best = label;
        }
      node_label[i] = best;
      max_label = std::max(max_label, best);
    }
    json doc;
    json areas = json::array();
    for (int i = 0; i < n; ++i) areas.push_back(result.graph.nodes[i].area);
    doc["areas"] = std::move(areas);
    doc["labels"] = node_label;
    json segments = json::array();
    for (int label = 1; label <= max_label; ++label) {
      json segment = json::array();
      for (int i = 0; i < n; ++i)
        if (node_label[i] == label) segment.push_back(i);
      if (!segment.empty()) segments.push_back(std::move(segment));
    }
    doc["segments"] = std::move(segments);
    std::ofstream out(truth_out);
    if (!out) throw InputError(truth_out + ": cannot open for writing");
    out << doc.dump(2) << "\n";
  }

  std::cout << "graph: " << result.graph.node_count() << " nodes, " << result.graph.edge_count()
            << " edges, " << result.graph.seeds.pair_count() << " seed pairs in "
            << result.graph.seeds.component_count() << " component(s)\n";
  return kExitOk;
}

AffinityGraph load_graph_checked(const std::string& path) {
  AffinityGraph graph = load_graph(path);
  const ValidationReport report = validate(graph);
  if (!report.structurally_ok()) throw InputError(path + ": invalid graph:\n" + report.to_string());
  return graph;
}

int cmd_temporal(const std::string& graph_path, const std::string& regions_path,
                 const std::string& prev_path, const std::string& prev_graph_path,
                 const std::string& prev_regions_path, const std::string& backward_flow_path, double tau,
                 const SolveFlags& flags) {
  AffinityGraph graph = load_graph_checked(graph_path);
  if (!graph.has_weights) compute_weights(graph, {flags.alpha, flags.beta, flags.kappa, 1.5});
  const RegionMap regions = load_region_map(regions_path);
  const DepthLabeling prev = load_labeling(prev_path);
  const AffinityGraph prev_graph = load_graph_checked(prev_graph_path);
  if (prev.rounded_labels.size() != prev_graph.node_count())
    throw InputError(prev_path + ": labeling does not match " + prev_graph_path);
  const RegionMap prev_regions = load_region_map(prev_regions_path);
  const FlowField backward = read_flow_json(backward_flow_path);

  Eigen::VectorXi warped;
  AffinityGraph augmented;
  try {
    warped = warp_labels(prev, prev_regions, backward, regions, graph.node_count());
    augmented = augment_weights(graph, warped, {tau});
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  return run_and_emit(augmented, flags);
}

std::vector<double> parse_grid(const std::string& grid) {
  double from = 0, to = 0, step = 0;
  if (std::sscanf(grid.c_str(), "%lf:%lf:%lf", &from, &to, &step) != 3 || step <= 0 || from <= 0 || to < from)
    throw UsageError("--gamma-grid must be start:stop:step with positive ascending values");
  std::vector<double> gammas;
  for (double g = from; g <= to + 1e-12; g += step) gammas.push_back(g);
  return gammas;
}

int cmd_sweep(const std::string& graph_path, const std::string& grid, double lambda,
              const std::string& out_path, const std::string& format, const SolveFlags& flags) {
  AffinityGraph graph = load_graph_checked(graph_path);
  if (!graph.has_weights) compute_weights(graph, {flags.alpha, flags.beta, flags.kappa, 1.5});
  PipelineOptions options;
  options.solver = {flags.feas_tol, flags.opt_tol, flags.max_iters};
  const std::vector<SweepRow> rows = gamma_sweep(graph, parse_grid(grid), lambda, options);

  std::ostringstream text;
  text << "gamma      status       sigma   objective\n";
  for (const SweepRow& row : rows) {
    char line[96];
    std::snprintf(line, sizeof(line), "%-10.4g %-12s %-7d %.6f\n", row.gamma,
                  status_name(row.status).c_str(), row.sigma_hat, row.objective);
    text << line;
  }
  json doc = json::array();
  for (const SweepRow& row : rows)
    doc.push_back({{"gamma", row.gamma},
                   {"status", status_name(row.status)},
                   {"sigma", row.sigma_hat},
                   {"objective", row.objective}});

  std::ofstream out(out_path);
  if (!out) throw InputError(out_path + ": cannot open for writing");
  if (format == "text")
    out << text.str();
  else
    out << doc.dump(2) << "\n";
  std::cout << text.str();
  return kExitOk;
}

int cmd_eval(const std::string& pred_path, const std::string& truth_path, const std::string& variant_name) {
  const DepthLabeling pred = load_labeling(pred_path);
  if (pred.object_map.size() == 0) throw InputError(pred_path + ": labeling carries no \"objects\" field");
  std::ifstream in(truth_path);
  if (!in) throw InputError(truth_path + ": cannot open");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError(truth_path + ": invalid JSON: " + std::string(e.what()));
  }
  for (const char* key : {"areas", "segments"})
    if (!doc.contains(key)) throw InputError(truth_path + ": missing \"" + std::string(key) + "\"");
  const auto areas_vec = doc["areas"].get<std::vector<double>>();
  if (static_cast<Eigen::Index>(areas_vec.size()) != pred.object_map.size())
    throw InputError(truth_path + ": \"areas\" length does not match the labeling");
  const Eigen::VectorXd areas =
      Eigen::Map<const Eigen::VectorXd>(areas_vec.data(), static_cast<Eigen::Index>(areas_vec.size()));
  std::vector<std::vector<int>> truth_segments;
  for (const auto& segment : doc["segments"]) truth_segments.push_back(segment.get<std::vector<int>>());

  double score = 0.0;
  try {
    score = covering_score(truth_segments, segments_from_objects(pred.object_map), areas,
                           overlap_from_name(variant_name));
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  std::printf("%.6f\n", score);
  return kExitOk;
}

int cmd_eval_cases(const std::string& cases_path, const std::string& format, const std::string& out_path,
                   const SolveFlags& flags) {
  std::ifstream in(cases_path);
  if (!in) throw InputError(cases_path + ": cannot open");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InputError(cases_path + ": invalid JSON: " + std::string(e.what()));
  }
  std::vector<BenchmarkCase> cases;
  for (const auto& jc : doc) {
    BenchmarkCase bench;
    bench.name = jc.value("name", "case" + std::to_string(cases.size()));
    bench.graph = load_graph_checked(jc.at("graph").get<std::string>());
    if (!bench.graph.has_weights) compute_weights(bench.graph, {flags.alpha, flags.beta, flags.kappa, 1.5});
    const std::string truth_file = jc.at("truth").get<std::string>();
    std::ifstream tin(truth_file);
    if (!tin) throw InputError(truth_file + ": cannot open");
    json tdoc;
    try {
      tin >> tdoc;
    } catch (const json::exception& e) {
      throw InputError(truth_file + ": invalid JSON: " + std::string(e.what()));
    }
    for (const auto& segment : tdoc.at("segments")) bench.truth_segments.push_back(segment.get<std::vector<int>>());
    bench.true_levels = jc.value("true_levels", 2);
    bench.gamma = jc.value("gamma", flags.gamma);
    bench.lambda = jc.value("lambda", flags.lambda);
    bench.variant = overlap_from_name(jc.value("variant", "jaccard"));
    cases.push_back(std::move(bench));
  }
  PipelineOptions options;
  options.solver = {flags.feas_tol, flags.opt_tol, flags.max_iters};
  const std::vector<BenchmarkRow> rows = benchmark_report(cases, options);
  const std::string body = format == "json" ? benchmark_json(rows) : benchmark_text(rows);
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw InputError(out_path + ": cannot open for writing");
    out << body << "\n";
  }
  std::cout << (format == "json" ? benchmark_text(rows) : body);
  return kExitOk;
}

int cmd_oracle(const std::string& graph_path, int max_label, const SolveFlags& flags,
               const std::string& out_path) {
  AffinityGraph graph = load_graph_checked(graph_path);
  if (!graph.has_weights) compute_weights(graph, {flags.alpha, flags.beta, flags.kappa, 1.5});
  const ModelConfig config = config_from_flags(flags);
  OracleResult result;
  try {
    result = enumerate_optimum(graph, config, max_label);
  } catch (const std::invalid_argument& e) {
    throw InputError(e.what());
  }
  if (!result.feasible) {
    std::cout << "infeasible: no labeling satisfies the model\n";
    return kExitInfeasible;
  }
  std::printf("optimum %.9f over %lld labeling(s)\n", result.best_objective,
              static_cast<long long>(result.tie_count));
  const int show = std::min<int>(5, static_cast<int>(result.best_labelings.size()));
  for (int s = 0; s < show; ++s) {
    std::cout << "  labels:";
    for (Eigen::Index i = 0; i < result.best_labelings[s].size(); ++i)
      std::cout << " " << result.best_labelings[s][i];
    std::cout << "\n";
  }
  if (!out_path.empty()) {
    json doc;
    doc["objective"] = result.best_objective;
    doc["tie_count"] = result.tie_count;
    json labelings = json::array();
    for (const auto& labels : result.best_labelings)
      labelings.push_back(std::vector<int>(labels.begin(), labels.end()));
    doc["labelings"] = std::move(labelings);
    std::ofstream out(out_path);
    if (!out) throw InputError(out_path + ": cannot open for writing");
    out << doc.dump(2) << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-layer labeling from occlusion evidence on region graphs"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Render a synthetic layered scene with exact ground truth");
  std::string synth_spec, synth_out;
  int synth_frames = 1;
  std::uint64_t synth_seed_value = 0;
  synth->add_option("--spec", synth_spec, "Scene description JSON")->required();
  synth->add_option("--frames", synth_frames, "Number of frames to render")->default_val(1);
  synth->add_option("--out", synth_out, "Output directory")->required();
  auto* seed_opt = synth->add_option("--rng-seed", synth_seed_value, "Override the scene rng seed");

  // graph
  auto* graph_cmd = app.add_subcommand("graph", "Build an affinity graph from images, flow, and masks");
  std::string g_image, g_flow, g_occluded, g_occluder, g_pb, g_out, g_regions_out, g_truth, g_truth_out;
  int g_superpixels = 0, g_band_width = 0;
  bool g_store_weights = false;
  double g_alpha = 0.25, g_beta = 0.5, g_kappa = 0.25;
  graph_cmd->add_option("--image", g_image, "Grayscale PGM frame")->required();
  graph_cmd->add_option("--flow", g_flow, "Forward flow JSON")->required();
  graph_cmd->add_option("--occluded", g_occluded, "Occluded-region mask PGM")->required();
  graph_cmd->add_option("--occluder", g_occluder, "Occluder mask PGM (derived from --occluded when absent)");
  graph_cmd->add_option("--pb", g_pb, "Boundary-probability map PGM");
  graph_cmd->add_option("--superpixels", g_superpixels, "Target superpixel count")->required();
  graph_cmd->add_option("--out", g_out, "Output graph JSON")->required();
  graph_cmd->add_option("--regions-out", g_regions_out, "Write the region map PGM");
  graph_cmd->add_option("--truth", g_truth, "Pixel truth PGM to project onto nodes");
  graph_cmd->add_option("--truth-out", g_truth_out, "Node-level truth JSON (areas, labels, segments)");
  graph_cmd->add_option("--alpha", g_alpha)->default_val(0.25);
  graph_cmd->add_option("--beta", g_beta)->default_val(0.5);
  graph_cmd->add_option("--kappa", g_kappa)->default_val(0.25);
  graph_cmd->add_option("--band-width", g_band_width, "Occluder band width (0 = median strip width)");
  graph_cmd->add_flag("--store-weights", g_store_weights, "Embed computed weights in the graph document");

  // solve
  auto* solve_cmd = app.add_subcommand("solve", "Solve the depth-ordering model on a graph");
  std::string s_graph;
  SolveFlags s_flags;
  solve_cmd->add_option("--graph", s_graph, "Graph JSON")->required();
  add_solve_flags(solve_cmd, s_flags);

  // temporal
  auto* temporal_cmd = app.add_subcommand("temporal", "Solve with the previous frame's labeling folded in");
  std::string t_graph, t_regions, t_prev, t_prev_graph, t_prev_regions, t_backward;
  double t_tau = 2.0;
  SolveFlags t_flags;
  temporal_cmd->add_option("--graph", t_graph, "Current graph JSON")->required();
  temporal_cmd->add_option("--regions", t_regions, "Current region map PGM")->required();
  temporal_cmd->add_option("--prev", t_prev, "Previous labeling JSON")->required();
  temporal_cmd->add_option("--prev-graph", t_prev_graph, "Previous graph JSON")->required();
  temporal_cmd->add_option("--prev-regions", t_prev_regions, "Previous region map PGM")->required();
  temporal_cmd->add_option("--backward-flow", t_backward, "Backward flow JSON")->required();
  temporal_cmd->add_option("--tau", t_tau, "Forgetting factor")->default_val(2.0);
  add_solve_flags(temporal_cmd, t_flags, true, false);  // --regions doubles as the render map

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "Model-selection sweep over gamma");
  std::string w_graph, w_grid, w_out, w_format = "json";
  double w_lambda = 50.0;
  SolveFlags w_flags;
  sweep_cmd->add_option("--graph", w_graph, "Graph JSON")->required();
  sweep_cmd->add_option("--gamma-grid", w_grid, "Grid start:stop:step")->required();
  sweep_cmd->add_option("--lambda", w_lambda, "Slack penalty (<= 0 keeps seed rows hard)")->default_val(50.0);
  sweep_cmd->add_option("--out", w_out, "Report output path")->required();
  sweep_cmd->add_option("--format", w_format, "Report format: json|text")->default_val("json");

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Covering score of a labeling against node-level truth");
  std::string e_pred, e_truth, e_variant = "jaccard", e_cases, e_format = "text", e_out;
  SolveFlags e_flags;
  eval_cmd->add_option("--pred", e_pred, "Predicted labeling JSON");
  eval_cmd->add_option("--truth", e_truth, "Node-level truth JSON");
  eval_cmd->add_option("--variant", e_variant, "Overlap variant: jaccard|literal")->default_val("jaccard");
  eval_cmd->add_option("--cases", e_cases, "Batch case list JSON (graph/truth/config per case)");
  eval_cmd->add_option("--format", e_format, "Batch report format: text|json")->default_val("text");
  eval_cmd->add_option("--out", e_out, "Batch report output path");

  // oracle
  auto* oracle_cmd = app.add_subcommand("oracle", "Exhaustive integer optimum on a small graph");
  std::string o_graph, o_out;
  int o_max_label = 2;
  SolveFlags o_flags;
  oracle_cmd->add_option("--graph", o_graph, "Graph JSON")->required();
  oracle_cmd->add_option("--max-label", o_max_label, "Enumerate labels 1..max-label")->required();
  oracle_cmd->add_option("--out", o_out, "Write the result JSON");
  add_solve_flags(oracle_cmd, o_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*synth) {
      std::optional<std::uint64_t> seed;
      if (*seed_opt) seed = synth_seed_value;
      return cmd_synth(synth_spec, synth_frames, synth_out, seed);
    }
    if (*graph_cmd)
      return cmd_graph(g_image, g_flow, g_occluded, g_occluder, g_pb, g_superpixels, g_out, g_regions_out,
                       g_truth, g_truth_out, g_alpha, g_beta, g_kappa, g_band_width, g_store_weights);
    if (*solve_cmd) {
      const AffinityGraph graph = load_graph_checked(s_graph);
      return run_and_emit(graph, s_flags);
    }
    if (*temporal_cmd) {
      t_flags.regions_path = t_regions;
      return cmd_temporal(t_graph, t_regions, t_prev, t_prev_graph, t_prev_regions, t_backward, t_tau,
                          t_flags);
    }
    if (*sweep_cmd) {
      w_flags.lambda = w_lambda;
      return cmd_sweep(w_graph, w_grid, w_lambda, w_out, w_format, w_flags);
    }
    if (*eval_cmd) {
      if (!e_cases.empty()) return cmd_eval_cases(e_cases, e_format, e_out, e_flags);
      if (e_pred.empty() || e_truth.empty()) throw UsageError("eval needs --pred and --truth (or --cases)");
      return cmd_eval(e_pred, e_truth, e_variant);
    }
    if (*oracle_cmd) return cmd_oracle(o_graph, o_max_label, o_flags, o_out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  return kExitUsage;
}
