#include "layerlp/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <vector>

namespace layerlp {

double superpixel_weight(const EdgeFeatures& features, const AffinityParams& params) {
  if (features.boundary_length < 0) throw std::invalid_argument("superpixel_weight: boundary_length < 0");
  if (!(features.pb_mean >= 0.0 && features.pb_mean <= 1.0))
    throw std::invalid_argument("superpixel_weight: pb_mean outside [0,1]");
  const double di = features.mean_intensity_i - features.mean_intensity_j;
  const double dv2 = (features.mean_flow_i - features.mean_flow_j).squaredNorm();
  return features.boundary_length *
         (params.alpha * std::exp(-di * di) + params.beta * std::exp(-dv2) + params.kappa * (1.0 - features.pb_mean));
}

void compute_weights(AffinityGraph& graph, const AffinityParams& params) {
  for (Edge& edge : graph.edges) {
    const Node& a = graph.nodes[edge.i];
    const Node& b = graph.nodes[edge.j];
    edge.weight = superpixel_weight(
        {edge.boundary_length, a.mean_intensity, b.mean_intensity, a.mean_flow, b.mean_flow, edge.pb_mean}, params);
  }
  graph.has_weights = true;
}

namespace {

// Pixel class with its occlusion component baked in; free pixels share one key.
struct CellKey {
  std::int8_t cls = 0;  // 0 free, 1 occluded, 2 occluder
  int component = 0;
  int qvx = 0, qvy = 0;  // flow quantized to 0.5 px bins

  bool operator==(const CellKey&) const = default;
};

int quantize_flow(double v) { return static_cast<int>(std::llround(v * 2.0)); }

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(b)] = find(a); }
};

}  // namespace

SuperpixelResult superpixelize(const Image& intensity, const FlowField& flow, const Mask& occluded,
                               const Mask& occluder, const Image* pb, int target_count,
                               const AffinityParams& params) {
  const int height = static_cast<int>(intensity.rows());
  const int width = static_cast<int>(intensity.cols());
  auto dims_match = [&](auto& a) { return a.rows() == height && a.cols() == width; };
  if (!dims_match(flow.vx) || !dims_match(flow.vy) || !dims_match(occluded) || !dims_match(occluder) ||
      (pb && !dims_match(*pb)))
    throw std::invalid_argument("superpixelize: input arrays have mismatched dimensions");
  if ((occluded && occluder).any()) throw std::invalid_argument("superpixelize: occluded and occluder masks overlap");
  if (pb && ((*pb < 0.0).any() || (*pb > 1.0).any()))
    throw std::invalid_argument("superpixelize: pb values outside [0,1]");
  if (target_count < 1) throw std::invalid_argument("superpixelize: target_count < 1");

  // Occlusion components and the association of occluder pixels with them.
  int component_count = 0;
  const LabelImage occ_comp = connected_components(occluded, component_count);
  LabelImage occluder_comp = LabelImage::Zero(height, width);
  {
    // Multi-source BFS through occluder pixels, seeded from pixels 8-adjacent
    // to an occluded component; nearest component wins, ties to the smaller k.
    std::queue<std::pair<int, int>> frontier;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        if (!occluder(y, x)) continue;
        int best = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = y + dy, nx = x + dx;
            if (ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
            if (occ_comp(ny, nx) > 0 && (best == 0 || occ_comp(ny, nx) < best)) best = occ_comp(ny, nx);
          }
        if (best > 0) {
          occluder_comp(y, x) = best;
          frontier.push({y, x});
        }
      }
    while (!frontier.empty()) {
      const auto [y, x] = frontier.front();
      frontier.pop();
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int ny = y + dy, nx = x + dx;
          if (ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
          if (!occluder(ny, nx) || occluder_comp(ny, nx) != 0) continue;
          occluder_comp(ny, nx) = occluder_comp(y, x);
          frontier.push({ny, nx});
        }
    }
  }

  // Per-pixel cell keys. Occluder pixels not reachable from any occluded
  // component carry no usable evidence and are treated as free.
  std::vector<CellKey> key(static_cast<std::size_t>(width) * height);
  auto at = [&](int y, int x) -> CellKey& { return key[static_cast<std::size_t>(y) * width + x]; };
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      CellKey k;
      if (occluded(y, x)) {
        k.cls = 1;
        k.component = occ_comp(y, x);
      } else if (occluder(y, x) && occluder_comp(y, x) > 0) {
        k.cls = 2;
        k.component = occluder_comp(y, x);
      }
      k.qvx = quantize_flow(flow.vx(y, x));
      k.qvy = quantize_flow(flow.vy(y, x));
      at(y, x) = k;
    }

  // Lower bound on achievable regions: connected components of the key map.
  // The block grid only subdivides further.
  const auto flood_regions = [&](bool use_blocks, int block) {
    LabelImage region = LabelImage::Constant(height, width, -1);
    int count = 0;
    std::vector<std::pair<int, int>> stack;
    const int blocks_x = use_blocks ? (width + block - 1) / block : 1;
    auto block_id = [&](int y, int x) { return use_blocks ? (y / block) * blocks_x + (x / block) : 0; };
    for (int y0 = 0; y0 < height; ++y0)
      for (int x0 = 0; x0 < width; ++x0) {
        if (region(y0, x0) != -1) continue;
        const int id = count++;
        region(y0, x0) = id;
        stack.assign(1, {y0, x0});
        while (!stack.empty()) {
          const auto [y, x] = stack.back();
          stack.pop_back();
          constexpr int dy[4] = {0, 0, 1, -1};
          constexpr int dx[4] = {1, -1, 0, 0};
          for (int d = 0; d < 4; ++d) {
            const int ny = y + dy[d], nx = x + dx[d];
            if (ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
            if (region(ny, nx) != -1) continue;
            if (!(at(ny, nx) == at(y0, x0))) continue;
            if (block_id(ny, nx) != block_id(y0, x0)) continue;
            region(ny, nx) = id;
            stack.push_back({ny, nx});
          }
        }
      }
    return std::pair<LabelImage, int>(std::move(region), count);
  };

  const auto [coarse, min_regions] = flood_regions(false, 0);
  if (target_count < min_regions)
    throw std::invalid_argument("superpixelize: target_count " + std::to_string(target_count) +
                                " is below the " + std::to_string(min_regions) +
                                " indivisible pure regions (mask and flow components)");

  const int block = std::max(1, static_cast<int>(std::lround(std::sqrt(double(width) * height / target_count))));
  auto [region, region_count] = flood_regions(true, block);

  // Greedy merge of same-key fragments, smallest area first, until the
  // target is met or nothing mergeable remains.
  std::vector<std::int64_t> area(region_count, 0);
  std::vector<CellKey> region_key(region_count);
  std::vector<std::set<int>> neighbors(region_count);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int r = region(y, x);
      ++area[r];
      region_key[r] = at(y, x);
      if (x + 1 < width && region(y, x + 1) != r) {
        neighbors[r].insert(region(y, x + 1));
        neighbors[region(y, x + 1)].insert(r);
      }
      if (y + 1 < height && region(y + 1, x) != r) {
        neighbors[r].insert(region(y + 1, x));
        neighbors[region(y + 1, x)].insert(r);
      }
    }

  UnionFind uf(region_count);
  std::vector<bool> alive(region_count, true);
  using QE = std::pair<std::int64_t, int>;  // (area, region)
  std::priority_queue<QE, std::vector<QE>, std::greater<QE>> queue;
  for (int r = 0; r < region_count; ++r) queue.push({area[r], r});
  int alive_count = region_count;
  while (alive_count > target_count && !queue.empty()) {
    const auto [a, r] = queue.top();
    queue.pop();
    if (!alive[r] || uf.find(r) != r || area[r] != a) continue;
    int best = -1;
    for (int nb : neighbors[r]) {
      if (!(region_key[nb] == region_key[r])) continue;
      if (best == -1 || area[nb] < area[best] || (area[nb] == area[best] && nb < best)) best = nb;
    }
    if (best == -1) continue;  // nothing compatible; key stays in the queue history
    // Merge best into r.
    uf.unite(r, best);
    alive[best] = false;
    --alive_count;
    area[r] += area[best];
    neighbors[r].erase(best);
    for (int nb : neighbors[best]) {
      if (nb == r) continue;
      neighbors[nb].erase(best);
      neighbors[nb].insert(r);
      neighbors[r].insert(nb);
    }
    neighbors[best].clear();
    queue.push({area[r], r});
  }

  // Dense node ids in row-major first-pixel order.
  std::vector<int> dense(region_count, -1);
  int node_count = 0;
  RegionMap regions;
  regions.ids = LabelImage::Zero(height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int root = uf.find(region(y, x));
      if (dense[root] == -1) dense[root] = node_count++;
      regions.ids(y, x) = dense[root];
    }

  AffinityGraph graph;
  graph.nodes.resize(node_count);
  for (int id = 0; id < node_count; ++id) graph.nodes[id].id = id;
  std::vector<Vec2> centroid_sum(node_count, Vec2::Zero());
  std::vector<Vec2> flow_sum(node_count, Vec2::Zero());
  std::vector<double> intensity_sum(node_count, 0.0);
  std::vector<std::int64_t> pixel_count(node_count, 0);
  std::map<std::pair<int, int>, std::pair<double, double>> boundary;  // (len, pb integral)

  auto add_boundary = [&](int ya, int xa, int yb, int xb) {
    const int a = regions.ids(ya, xa), b = regions.ids(yb, xb);
    if (a == b) return;
    const auto k = std::minmax(a, b);
    auto& entry = boundary[{k.first, k.second}];
    entry.first += 1.0;
    if (pb) entry.second += 0.5 * ((*pb)(ya, xa) + (*pb)(yb, xb));
  };
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int id = regions.ids(y, x);
      centroid_sum[id] += Vec2(x + 0.5, y + 0.5);
      flow_sum[id] += Vec2(flow.vx(y, x), flow.vy(y, x));
      intensity_sum[id] += intensity(y, x);
      ++pixel_count[id];
      if (x + 1 < width) add_boundary(y, x, y, x + 1);
      if (y + 1 < height) add_boundary(y, x, y + 1, x);
    }

  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      Node& node = graph.nodes[regions.ids(y, x)];
      const CellKey& k = at(y, x);
      if (k.cls == 1)
        node.region_class = {RegionRole::Occluded, k.component};
      else if (k.cls == 2)
        node.region_class = {RegionRole::Occluder, k.component};
    }
  for (int id = 0; id < node_count; ++id) {
    Node& node = graph.nodes[id];
    node.area = pixel_count[id];
    node.centroid = centroid_sum[id] / double(pixel_count[id]);
    node.mean_flow = flow_sum[id] / double(pixel_count[id]);
    node.mean_intensity = intensity_sum[id] / double(pixel_count[id]);
  }

  for (const auto& [pair, entry] : boundary) {
    Edge edge;
    edge.i = pair.first;
    edge.j = pair.second;
    edge.boundary_length = entry.first;
    edge.pb_mean = pb ? entry.second / entry.first : 0.0;
    graph.edges.push_back(edge);
  }

  graph.seeds.components.resize(component_count);
  for (const Edge& edge : graph.edges) {
    const RegionClass& ci = graph.nodes[edge.i].region_class;
    const RegionClass& cj = graph.nodes[edge.j].region_class;
    if (ci.component == 0 || ci.component != cj.component) continue;
    if (ci.role == RegionRole::Occluded && cj.role == RegionRole::Occluder)
      graph.seeds.components[ci.component - 1].push_back({edge.i, edge.j});
    else if (ci.role == RegionRole::Occluder && cj.role == RegionRole::Occluded)
      graph.seeds.components[ci.component - 1].push_back({edge.j, edge.i});
  }

  compute_weights(graph, params);
  return {std::move(graph), std::move(regions)};
}

OccluderBand build_occluder_band(const Mask& occluded, int band_width) {
  if (!occluded.any()) throw std::invalid_argument("build_occluder_band: empty occluded mask");
  if (band_width < 1) throw std::invalid_argument("build_occluder_band: band_width < 1");
  const int height = static_cast<int>(occluded.rows());
  const int width = static_cast<int>(occluded.cols());
  OccluderBand result;
  result.band = dilate(occluded, band_width) && !occluded;
  for (int y = 0; y < height && !result.clipped_at_border; ++y)
    for (int x = 0; x < width; ++x)
      if (occluded(y, x) &&
          (y < band_width || y >= height - band_width || x < band_width || x >= width - band_width)) {
        result.clipped_at_border = true;
        break;
      }
  return result;
}

int default_band_width(const Mask& occluded) {
  int count = 0;
  const LabelImage comp = connected_components(occluded, count);
  if (count == 0) return 1;
  const int height = static_cast<int>(occluded.rows());
  const int width = static_cast<int>(occluded.cols());
  std::vector<std::int64_t> area(count + 1, 0), border(count + 1, 0);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int k = comp(y, x);
      if (k == 0) continue;
      ++area[k];
      const bool edge = (y == 0 || comp(y - 1, x) != k) || (y + 1 == height || comp(y + 1, x) != k) ||
                        (x == 0 || comp(y, x - 1) != k) || (x + 1 == width || comp(y, x + 1) != k);
      if (edge) ++border[k];
    }
  std::vector<int> widths;
  for (int k = 1; k <= count; ++k) {
    const double w = 2.0 * double(area[k]) / double(std::max<std::int64_t>(1, border[k]));
    widths.push_back(std::clamp(static_cast<int>(std::lround(w)), 1, 5));
  }
  std::sort(widths.begin(), widths.end());
  return widths[widths.size() / 2];
}

}  // namespace layerlp
