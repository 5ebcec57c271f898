#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "layerlp/affinity.hpp"
#include "layerlp/graph.hpp"

#include <cmath>
#include <random>

using namespace layerlp;

namespace {

// Independent evaluation of the pixel measure for the cross-check cases.
double pixel_weight_by_hand(double ia, double ib, Vec2 va, Vec2 vb, double dist, const AffinityParams& p) {
  if (dist >= p.epsilon) return 0.0;
  return p.alpha * std::exp(-(ia - ib) * (ia - ib)) + p.beta * std::exp(-(va - vb).squaredNorm());
}

}  // namespace

TEST_CASE("pixel weight with identical features hits alpha plus beta") {
  const AffinityParams params;
  CHECK(pixel_weight<double>(0.5, 0.5, Vec2(1, 0), Vec2(1, 0), 1.0, params) == doctest::Approx(0.75));
}

TEST_CASE("pixel weight vanishes outside the neighborhood") {
  const AffinityParams params;
  CHECK(pixel_weight<double>(0.1, 0.9, Vec2(1, 0), Vec2(0, 1), 1.5, params) == 0.0);
  CHECK(pixel_weight<double>(0.5, 0.5, Vec2::Zero(), Vec2::Zero(), 2.0, params) == 0.0);
}

TEST_CASE("pixel weight with unit intensity difference") {
  const AffinityParams params;
  const double w = pixel_weight<double>(1.0, 0.0, Vec2(0.5, 0.5), Vec2(0.5, 0.5), 1.0, params);
  CHECK(w == doctest::Approx(0.25 * std::exp(-1.0) + 0.5).epsilon(1e-12));
  CHECK(w == doctest::Approx(0.5919698602928606).epsilon(1e-10));
}

TEST_CASE("pixel weight rejects non-finite input") {
  const AffinityParams params;
  CHECK_THROWS_AS(pixel_weight<double>(std::nan(""), 0.5, Vec2::Zero(), Vec2::Zero(), 1.0, params),
                  std::invalid_argument);
}

TEST_CASE("pixel weight stays within [0, alpha + beta] and is symmetric") {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_real_distribution<double> uv(-3.0, 3.0);
  const AffinityParams params;
  for (int i = 0; i < 200; ++i) {
    const double ia = u01(rng), ib = u01(rng), d = 2.0 * u01(rng);
    const Vec2 va(uv(rng), uv(rng)), vb(uv(rng), uv(rng));
    const double ab = pixel_weight<double>(ia, ib, va, vb, d, params);
    const double ba = pixel_weight<double>(ib, ia, vb, va, d, params);
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= params.alpha + params.beta + 1e-12);
    CHECK(ab == doctest::Approx(pixel_weight_by_hand(ia, ib, va, vb, d, params)).epsilon(1e-12));
    // Shifting intensities and flows together preserves the weight.
    const double shifted =
        pixel_weight<double>(ia + 0.25, ib + 0.25, va + Vec2(1, -2), vb + Vec2(1, -2), d, params);
    CHECK(shifted == doctest::Approx(ab).epsilon(1e-12));
  }
}

TEST_CASE("superpixel weight fixtures") {
  const AffinityParams params;
  EdgeFeatures same;
  same.boundary_length = 1.0;
  same.mean_intensity_i = same.mean_intensity_j = 0.5;
  same.pb_mean = 0.0;
  CHECK(superpixel_weight(same, params) == doctest::Approx(1.0));

  EdgeFeatures certain;
  certain = same;
  certain.boundary_length = 2.0;
  certain.pb_mean = 1.0;
  CHECK(superpixel_weight(certain, params) == doctest::Approx(1.5));

  EdgeFeatures mixed;
  mixed.boundary_length = 1.0;
  mixed.mean_intensity_i = 1.0;
  mixed.mean_intensity_j = 0.0;
  mixed.pb_mean = 0.5;
  CHECK(superpixel_weight(mixed, params) == doctest::Approx(0.25 * std::exp(-1.0) + 0.5 + 0.125).epsilon(1e-12));
  CHECK(superpixel_weight(mixed, params) == doctest::Approx(0.7169698602928606).epsilon(1e-10));
}

TEST_CASE("superpixel weight rejects a pb outside [0,1]") {
  EdgeFeatures f;
  f.boundary_length = 1.0;
  f.pb_mean = 1.5;
  CHECK_THROWS_AS(superpixel_weight(f, {}), std::invalid_argument);
}

TEST_CASE("uniform image with no masks splits into the requested blocks") {
  const Image img = Image::Constant(4, 4, 0.5);
  const FlowField flow = FlowField::zero(4, 4);
  const Mask empty = Mask::Constant(4, 4, false);
  const SuperpixelResult result = superpixelize(img, flow, empty, empty, nullptr, 4);
  CHECK(result.graph.node_count() == 4);
  CHECK(result.graph.seeds.pair_count() == 0);
  CHECK(validate(result.graph).ok());
}

TEST_CASE("occluded strip next to an occluder strip yields pure seed regions") {
  const int height = 8, width = 8;
  const Image img = Image::Constant(height, width, 0.5);
  const FlowField flow = FlowField::zero(height, width);
  Mask occluded = Mask::Constant(height, width, false);
  Mask occluder = Mask::Constant(height, width, false);
  for (int y = 2; y < 4; ++y) {
    occluded(y, 3) = true;
    occluder(y, 4) = true;
  }
  const SuperpixelResult result = superpixelize(img, flow, occluded, occluder, nullptr, 8);
  CHECK(validate(result.graph).ok());
  CHECK(result.graph.seeds.pair_count() >= 1);
  // Purity: every pixel's mask class matches its region's class.
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const RegionClass& rc = result.graph.nodes[result.regions.ids(y, x)].region_class;
      if (occluded(y, x))
        CHECK(rc.role == RegionRole::Occluded);
      else if (occluder(y, x))
        CHECK(rc.role == RegionRole::Occluder);
      else
        CHECK(rc.role == RegionRole::Free);
    }
}

TEST_CASE("superpixelize rejects overlapping masks and starved target counts") {
  const Image img = Image::Constant(4, 4, 0.5);
  const FlowField flow = FlowField::zero(4, 4);
  Mask a = Mask::Constant(4, 4, false);
  Mask b = Mask::Constant(4, 4, false);
  a(1, 1) = true;
  b(1, 1) = true;
  CHECK_THROWS_AS(superpixelize(img, flow, a, b, nullptr, 4), std::invalid_argument);

  Mask occluded = Mask::Constant(4, 4, false);
  Mask occluder = Mask::Constant(4, 4, false);
  occluded(1, 1) = true;
  occluder(1, 2) = true;
  CHECK_THROWS_AS(superpixelize(img, flow, occluded, occluder, nullptr, 2), std::invalid_argument);
}

TEST_CASE("flow discontinuities split superpixels") {
  const int n = 8;
  const Image img = Image::Constant(n, n, 0.5);
  FlowField flow = FlowField::zero(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 4; x < n; ++x) flow.vx(y, x) = 2.0;
  const Mask empty = Mask::Constant(n, n, false);
  const SuperpixelResult result = superpixelize(img, flow, empty, empty, nullptr, 2);
  // No region can straddle the moving half.
  for (int y = 0; y < n; ++y)
    CHECK(result.regions.ids(y, 3) != result.regions.ids(y, 4));
}

TEST_CASE("edge weights come from the stored features") {
  const Image img = Image::Constant(4, 4, 0.5);
  const FlowField flow = FlowField::zero(4, 4);
  const Mask empty = Mask::Constant(4, 4, false);
  SuperpixelResult result = superpixelize(img, flow, empty, empty, nullptr, 4);
  REQUIRE(result.graph.has_weights);
  for (const Edge& edge : result.graph.edges) {
    // Identical features, no pb: weight = boundary * (alpha + beta + kappa).
    CHECK(edge.weight == doctest::Approx(edge.boundary_length * 1.0));
  }
}

TEST_CASE("occluder band dilates on both sides and stays disjoint") {
  Mask occluded = Mask::Constant(16, 16, false);
  for (int y = 0; y < 16; ++y)
    for (int x = 10; x <= 11; ++x) occluded(y, x) = true;
  const OccluderBand band = build_occluder_band(occluded, 2);
  for (int y = 0; y < 16; ++y) {
    for (int x = 8; x <= 9; ++x) CHECK(band.band(y, x));
    for (int x = 12; x <= 13; ++x) CHECK(band.band(y, x));
    CHECK_FALSE(band.band(y, 7));
    CHECK_FALSE(band.band(y, 14));
  }
  CHECK_FALSE((band.band && occluded).any());
  CHECK(band.clipped_at_border);  // strip touches the top and bottom borders

  Mask interior = Mask::Constant(16, 16, false);
  interior(8, 8) = true;
  CHECK_FALSE(build_occluder_band(interior, 2).clipped_at_border);
}

TEST_CASE("empty occluded mask is rejected") {
  const Mask empty = Mask::Constant(4, 4, false);
  CHECK_THROWS_AS(build_occluder_band(empty, 2), std::invalid_argument);
}

TEST_CASE("band width defaults to the median strip width, clamped") {
  Mask strip = Mask::Constant(16, 16, false);
  for (int y = 2; y < 14; ++y)
    for (int x = 5; x <= 6; ++x) strip(y, x) = true;
  CHECK(default_band_width(strip) == 2);

  Mask blob = Mask::Constant(32, 32, false);
  for (int y = 4; y < 24; ++y)
    for (int x = 4; x < 24; ++x) blob(y, x) = true;
  CHECK(default_band_width(blob) == 5);  // clamped

  const Mask empty = Mask::Constant(4, 4, false);
  CHECK(default_band_width(empty) == 1);
}
