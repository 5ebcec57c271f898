#include "layerlp/synth.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <queue>
#include <random>
#include <sstream>
#include <stdexcept>

namespace layerlp {
namespace {

using json = nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic procedural value in [0,1) attached to a layer's own frame.
double hash01(std::uint64_t seed, int layer, std::int64_t ix, std::int64_t iy) {
  std::uint64_t h = splitmix64(seed ^ 0x517cc1b727220a95ULL);
  h = splitmix64(h ^ static_cast<std::uint64_t>(layer + 1));
  h = splitmix64(h ^ static_cast<std::uint64_t>(ix + (1LL << 31)));
  h = splitmix64(h ^ static_cast<std::uint64_t>(iy + (1LL << 31)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

bool shape_contains(const ShapeSpec& shape, const Vec2& offset, double px, double py) {
  const double lx = px - offset.x();
  const double ly = py - offset.y();
  if (shape.kind == ShapeSpec::Kind::Rectangle)
    return lx >= shape.x && lx < shape.x + shape.w && ly >= shape.y && ly < shape.y + shape.h;
  const double dx = (lx - shape.x) / shape.w;
  const double dy = (ly - shape.y) / shape.h;
  return dx * dx + dy * dy <= 1.0;
}

// Index of the nearest layer containing the point (0 = background).
int visible_layer(const SceneSpec& spec, double t, double px, double py) {
  for (int k = static_cast<int>(spec.layers.size()); k >= 1; --k) {
    const LayerSpec& layer = spec.layers[k - 1];
    if (shape_contains(layer.shape, t * layer.velocity, px, py)) return k;
  }
  return 0;
}

Vec2 layer_velocity(const SceneSpec& spec, int layer) {
  return layer == 0 ? spec.background_velocity : spec.layers[layer - 1].velocity;
}

double sample_texture(const SceneSpec& spec, int layer, double t, double px, double py) {
  const TextureSpec& tex = layer == 0 ? spec.background_texture : spec.layers[layer - 1].texture;
  if (tex.kind == TextureSpec::Kind::Flat) return clamp01(tex.base);
  const Vec2 local = Vec2(px, py) - t * layer_velocity(spec, layer);
  const double u = hash01(spec.rng_seed, layer, static_cast<std::int64_t>(std::floor(local.x())),
                          static_cast<std::int64_t>(std::floor(local.y())));
  return clamp01(tex.base + tex.amplitude * (2.0 * u - 1.0));
}

void check_fits(const SceneSpec& spec, double t) {
  for (std::size_t k = 0; k < spec.layers.size(); ++k) {
    const ShapeSpec& s = spec.layers[k].shape;
    const Vec2 off = t * spec.layers[k].velocity;
    double x0, y0, x1, y1;
    if (s.kind == ShapeSpec::Kind::Rectangle) {
      x0 = s.x + off.x();
      y0 = s.y + off.y();
      x1 = x0 + s.w;
      y1 = y0 + s.h;
    } else {
      x0 = s.x - s.w + off.x();
      y0 = s.y - s.h + off.y();
      x1 = s.x + s.w + off.x();
      y1 = s.y + s.h + off.y();
    }
    if (x0 < 0 || y0 < 0 || x1 > spec.width || y1 > spec.height)
      throw std::invalid_argument("render: layer " + std::to_string(k + 1) + " leaves the frame at t = " +
                                  std::to_string(t));
  }
}

// Occluder band: covering-layer pixels within Chebyshev distance band_w of
// an omega component, computed per component so the band belongs to the
// layer that actually covers it.
Mask occluder_band_for(const SceneSpec& spec, const Mask& omega, const LabelImage& truth,
                       const Eigen::ArrayXXi& cover_layer, int band_w) {
  const int height = spec.height, width = spec.width;
  Mask band = Mask::Constant(height, width, false);
  int count = 0;
  const LabelImage comp = connected_components(omega, count);
  if (count == 0) return band;
  // Covering layers per component.
  std::vector<std::vector<char>> covers(count + 1, std::vector<char>(spec.layers.size() + 1, 0));
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (comp(y, x) > 0 && cover_layer(y, x) >= 0) covers[comp(y, x)][cover_layer(y, x)] = 1;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int k = comp(y, x);
      if (k == 0) continue;
      for (int ny = std::max(0, y - band_w); ny <= std::min(height - 1, y + band_w); ++ny)
        for (int nx = std::max(0, x - band_w); nx <= std::min(width - 1, x + band_w); ++nx) {
          if (omega(ny, nx)) continue;
          const int layer = truth(ny, nx) - 1;
          if (layer >= 1 && covers[k][layer]) band(ny, nx) = true;
        }
    }
  return band;
}

}  // namespace

RenderedFrame render(const SceneSpec& spec, int t) {
  if (spec.width <= 0 || spec.height <= 0) throw std::invalid_argument("render: non-positive frame size");
  check_fits(spec, t);
  check_fits(spec, t + 1.0);

  const int height = spec.height, width = spec.width;
  RenderedFrame frame;
  frame.image.resize(height, width);
  frame.flow_forward = FlowField::zero(height, width);
  frame.flow_backward = FlowField::zero(height, width);
  frame.omega_plus = Mask::Constant(height, width, false);
  frame.omega_minus = Mask::Constant(height, width, false);
  frame.truth.resize(height, width);
  frame.pb = Image::Zero(height, width);

  Eigen::ArrayXXi cover_fwd = Eigen::ArrayXXi::Constant(height, width, -1);
  Eigen::ArrayXXi cover_bwd = Eigen::ArrayXXi::Constant(height, width, -1);

  std::mt19937_64 rng(splitmix64(spec.rng_seed) ^ static_cast<std::uint64_t>(t + 1000));
  std::normal_distribution<double> noise(0.0, 1.0);

  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      const int layer = visible_layer(spec, t, px, py);
      frame.truth(y, x) = layer + 1;
      const Vec2 v = layer_velocity(spec, layer);
      frame.flow_forward.vx(y, x) = v.x();
      frame.flow_forward.vy(y, x) = v.y();
      frame.flow_backward.vx(y, x) = -v.x();
      frame.flow_backward.vy(y, x) = -v.y();

      double value = sample_texture(spec, layer, t, px, py);
      if (spec.noise.intensity_sigma > 0) value += spec.noise.intensity_sigma * noise(rng);
      frame.image(y, x) = clamp01(value);

      // The scene point rides its layer; occlusion happens when a nearer
      // layer covers the moved point in the adjacent frame.
      const int fwd = visible_layer(spec, t + 1.0, px + v.x(), py + v.y());
      if (fwd > layer) {
        frame.omega_plus(y, x) = true;
        cover_fwd(y, x) = fwd;
      }
      const int bwd = visible_layer(spec, t - 1.0, px - v.x(), py - v.y());
      if (bwd > layer) {
        frame.omega_minus(y, x) = true;
        cover_bwd(y, x) = bwd;
      }
    }

  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const bool boundary = (x + 1 < width && frame.truth(y, x) != frame.truth(y, x + 1)) ||
                            (x > 0 && frame.truth(y, x) != frame.truth(y, x - 1)) ||
                            (y + 1 < height && frame.truth(y, x) != frame.truth(y + 1, x)) ||
                            (y > 0 && frame.truth(y, x) != frame.truth(y - 1, x));
      frame.pb(y, x) = boundary ? 1.0 : 0.0;
    }

  constexpr int kBandWidth = 2;
  frame.occluder_plus = occluder_band_for(spec, frame.omega_plus, frame.truth, cover_fwd, kBandWidth);
  frame.occluder_minus = occluder_band_for(spec, frame.omega_minus, frame.truth, cover_bwd, kBandWidth);
  return frame;
}

SeedMasks exact_seed_masks(const RenderedFrame& frame) {
  SeedMasks masks;
  masks.occluded = frame.omega_plus || frame.omega_minus;
  masks.occluder = (frame.occluder_plus || frame.occluder_minus) && !masks.occluded;
  return masks;
}

SeedMasks corrupt_seeds(const SeedMasks& masks, const NoiseSpec& noise, std::uint64_t rng_seed) {
  const int height = static_cast<int>(masks.occluded.rows());
  const int width = static_cast<int>(masks.occluded.cols());
  SeedMasks out = masks;
  std::mt19937_64 rng(splitmix64(rng_seed ^ 0xdecafbadULL));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  // Associate occluder pixels with their occlusion component so a dropped
  // component takes its partner band along.
  int count = 0;
  const LabelImage comp = connected_components(out.occluded, count);
  LabelImage occluder_comp = LabelImage::Zero(height, width);
  {
    std::queue<std::pair<int, int>> frontier;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        if (!out.occluder(y, x)) continue;
        int best = 0;
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = y + dy, nx = x + dx;
            if (ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
            if (comp(ny, nx) > 0 && (best == 0 || comp(ny, nx) < best)) best = comp(ny, nx);
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
          if (!out.occluder(ny, nx) || occluder_comp(ny, nx) != 0) continue;
          occluder_comp(ny, nx) = occluder_comp(y, x);
          frontier.push({ny, nx});
        }
    }
  }

  for (int k = 1; k <= count; ++k) {
    const bool drop = uniform(rng) < noise.seed_dropout;
    if (!drop) continue;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        if (comp(y, x) == k) out.occluded(y, x) = false;
        if (occluder_comp(y, x) == k) out.occluder(y, x) = false;
      }
  }

  // Spurious evidence: small occluded/occluder strip pairs dropped into
  // clear areas, kept 2 px away from everything else so components stay
  // separate.
  for (int s = 0; s < noise.spurious_seed_rate; ++s) {
    const Mask occupied = dilate(out.occluded || out.occluder, 2);
    bool placed = false;
    for (int attempt = 0; attempt < 100 && !placed; ++attempt) {
      const bool horizontal = uniform(rng) < 0.5;
      const int len = 6 + static_cast<int>(uniform(rng) * 9);  // 6..14
      const int thick = 2;
      const int bw = horizontal ? len : 2 * thick;
      const int bh = horizontal ? 2 * thick : len;
      if (width <= bw || height <= bh) break;
      const int x0 = static_cast<int>(uniform(rng) * (width - bw));
      const int y0 = static_cast<int>(uniform(rng) * (height - bh));
      const bool occluded_first = uniform(rng) < 0.5;
      bool clear = true;
      for (int y = y0; y < y0 + bh && clear; ++y)
        for (int x = x0; x < x0 + bw; ++x)
          if (occupied(y, x)) {
            clear = false;
            break;
          }
      if (!clear) continue;
      for (int y = y0; y < y0 + bh; ++y)
        for (int x = x0; x < x0 + bw; ++x) {
          const bool first_half = horizontal ? (y < y0 + thick) : (x < x0 + thick);
          const bool is_occluded = first_half == occluded_first;
          (is_occluded ? out.occluded : out.occluder)(y, x) = true;
        }
      placed = true;
    }
  }
  return out;
}

std::string scene_to_json(const SceneSpec& spec) {
  auto texture_json = [](const TextureSpec& tex) {
    return json{{"kind", tex.kind == TextureSpec::Kind::Flat ? "flat" : "noise"},
                {"base", tex.base},
                {"amplitude", tex.amplitude}};
  };
  json doc;
  doc["width"] = spec.width;
  doc["height"] = spec.height;
  doc["rng_seed"] = spec.rng_seed;
  doc["background"] = {{"texture", texture_json(spec.background_texture)},
                       {"velocity", {spec.background_velocity.x(), spec.background_velocity.y()}}};
  json layers = json::array();
  for (const LayerSpec& layer : spec.layers) {
    json shape = {{"kind", layer.shape.kind == ShapeSpec::Kind::Rectangle ? "rectangle" : "ellipse"},
                  {"x", layer.shape.x},
                  {"y", layer.shape.y},
                  {"w", layer.shape.w},
                  {"h", layer.shape.h}};
    layers.push_back({{"shape", std::move(shape)},
                      {"texture", texture_json(layer.texture)},
                      {"velocity", {layer.velocity.x(), layer.velocity.y()}}});
  }
  doc["layers"] = std::move(layers);
  doc["noise"] = {{"intensity_sigma", spec.noise.intensity_sigma},
                  {"seed_dropout", spec.noise.seed_dropout},
                  {"spurious_seed_rate", spec.noise.spurious_seed_rate}};
  return doc.dump(2);
}

SceneSpec scene_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scene document: invalid JSON: ") + e.what());
  }
  auto texture_from = [](const json& j) {
    TextureSpec tex;
    const std::string kind = j.value("kind", "noise");
    if (kind == "flat")
      tex.kind = TextureSpec::Kind::Flat;
    else if (kind == "noise")
      tex.kind = TextureSpec::Kind::Noise;
    else
      throw std::runtime_error("scene document: unknown texture kind '" + kind + "'");
    tex.base = j.value("base", 0.5);
    tex.amplitude = j.value("amplitude", 0.5);
    return tex;
  };
  SceneSpec spec;
  try {
    spec.width = doc.at("width").get<int>();
    spec.height = doc.at("height").get<int>();
    spec.rng_seed = doc.value("rng_seed", 0ULL);
    if (doc.contains("background")) {
      const auto& bg = doc["background"];
      if (bg.contains("texture")) spec.background_texture = texture_from(bg["texture"]);
      if (bg.contains("velocity"))
        spec.background_velocity = Vec2(bg["velocity"].at(0).get<double>(), bg["velocity"].at(1).get<double>());
    }
    for (const auto& jl : doc.value("layers", json::array())) {
      LayerSpec layer;
      const auto& js = jl.at("shape");
      const std::string kind = js.at("kind").get<std::string>();
      if (kind == "rectangle")
        layer.shape.kind = ShapeSpec::Kind::Rectangle;
      else if (kind == "ellipse")
        layer.shape.kind = ShapeSpec::Kind::Ellipse;
      else
        throw std::runtime_error("scene document: unknown shape kind '" + kind + "'");
      layer.shape.x = js.at("x").get<double>();
      layer.shape.y = js.at("y").get<double>();
      layer.shape.w = js.at("w").get<double>();
      layer.shape.h = js.at("h").get<double>();
      if (jl.contains("texture")) layer.texture = texture_from(jl["texture"]);
      layer.velocity = Vec2(jl.at("velocity").at(0).get<double>(), jl.at("velocity").at(1).get<double>());
      spec.layers.push_back(layer);
    }
    if (doc.contains("noise")) {
      const auto& jn = doc["noise"];
      spec.noise.intensity_sigma = jn.value("intensity_sigma", 0.0);
      spec.noise.seed_dropout = jn.value("seed_dropout", 0.0);
      spec.noise.spurious_seed_rate = jn.value("spurious_seed_rate", 0);
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("scene document: ") + e.what());
  }
  return spec;
}

void save_scene(const std::string& path, const SceneSpec& spec) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << scene_to_json(spec) << "\n";
}

SceneSpec load_scene(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return scene_from_json(buf.str());
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace layerlp
