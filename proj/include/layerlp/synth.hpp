#pragma once

#include "layerlp/graph.hpp"
#include "layerlp/image.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace layerlp {

struct TextureSpec {
  enum class Kind { Flat, Noise };
  Kind kind = Kind::Noise;
  double base = 0.5;       // flat value / noise center
  double amplitude = 0.5;  // noise half-range around base
};

struct ShapeSpec {
  enum class Kind { Rectangle, Ellipse };
  Kind kind = Kind::Rectangle;
  // Rectangle: (x, y) top-left corner, (w, h) size.
  // Ellipse: (x, y) center, (w, h) radii.
  double x = 0, y = 0, w = 0, h = 0;
};

struct LayerSpec {
  ShapeSpec shape;
  TextureSpec texture;
  Vec2 velocity = Vec2::Zero();  // pixels/frame, translation only
};

struct NoiseSpec {
  double intensity_sigma = 0.0;
  double seed_dropout = 0.0;    // per-component drop probability
  int spurious_seed_rate = 0;   // injected false band pairs per frame
};

// A parametric layered scene: static-velocity background plus shape layers
// ordered far to near. Everything downstream of rng_seed is deterministic.
struct SceneSpec {
  int width = 96;
  int height = 96;
  TextureSpec background_texture;
  Vec2 background_velocity = Vec2::Zero();
  std::vector<LayerSpec> layers;
  NoiseSpec noise;
  std::uint64_t rng_seed = 0;
};

struct RenderedFrame {
  Image image;
  FlowField flow_forward;
  FlowField flow_backward;
  Mask omega_plus;       // occluded: visible at t, covered by a nearer layer at t+1
  Mask omega_minus;      // un-occluded: visible at t, covered at t-1
  Mask occluder_plus;    // band of covering-layer pixels adjacent to each omega_plus component
  Mask occluder_minus;
  LabelImage truth;      // 1 = background, k+1 = layer k
  Image pb;              // 1 at visible inter-layer boundaries, 0 elsewhere
};

// Renders frame t with exact geometric ground truth. Occlusion masks come
// from the layer geometry, not from image differencing. Shapes must fit the
// frame at t and t+1.
RenderedFrame render(const SceneSpec& spec, int t);

struct SeedMasks {
  Mask occluded;
  Mask occluder;
};

// Forward/backward evidence combined into one detector-style mask pair.
SeedMasks exact_seed_masks(const RenderedFrame& frame);

// Detector-error model: drops whole occlusion components (with their
// occluder partners) with probability seed_dropout and injects
// spurious_seed_rate false band pairs. Deterministic under rng_seed.
SeedMasks corrupt_seeds(const SeedMasks& masks, const NoiseSpec& noise, std::uint64_t rng_seed);

std::string scene_to_json(const SceneSpec& spec);
SceneSpec scene_from_json(const std::string& text);
void save_scene(const std::string& path, const SceneSpec& spec);
SceneSpec load_scene(const std::string& path);

}  // namespace layerlp
