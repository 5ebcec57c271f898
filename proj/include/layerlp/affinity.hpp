#pragma once

#include "layerlp/graph.hpp"
#include "layerlp/image.hpp"

#include <Eigen/Core>

#include <cmath>
#include <optional>

namespace layerlp {

struct AffinityParams {
  double alpha = 0.25;
  double beta = 0.5;
  double kappa = 0.25;
  double epsilon = 1.5;  // pixel-level neighborhood radius
};

// Intensity/motion affinity between two pixels closer than epsilon:
//   alpha * exp(-(Ia - Ib)^2) + beta * exp(-|va - vb|^2), 0 otherwise.
template <typename Scalar>
Scalar pixel_weight(Scalar intensity_a, Scalar intensity_b,
                    const Eigen::Matrix<Scalar, 2, 1>& flow_a,
                    const Eigen::Matrix<Scalar, 2, 1>& flow_b, Scalar distance,
                    const AffinityParams& params) {
  if (!(std::isfinite(static_cast<double>(intensity_a)) && std::isfinite(static_cast<double>(intensity_b)) &&
        flow_a.allFinite() && flow_b.allFinite() && std::isfinite(static_cast<double>(distance))))
    throw std::invalid_argument("pixel_weight: non-finite input");
  if (distance >= static_cast<Scalar>(params.epsilon)) return Scalar(0);
  const Scalar di = intensity_a - intensity_b;
  const Scalar dv2 = (flow_a - flow_b).squaredNorm();
  using std::exp;
  return static_cast<Scalar>(params.alpha) * exp(-di * di) + static_cast<Scalar>(params.beta) * exp(-dv2);
}

struct EdgeFeatures {
  double boundary_length = 0.0;
  double mean_intensity_i = 0.0;
  double mean_intensity_j = 0.0;
  Vec2 mean_flow_i = Vec2::Zero();
  Vec2 mean_flow_j = Vec2::Zero();
  double pb_mean = 0.0;
};

// Boundary-length weighted affinity between two superpixels:
//   |boundary| * [alpha e^{-dI^2} + beta e^{-|dv|^2} + kappa (1 - pb)].
double superpixel_weight(const EdgeFeatures& features, const AffinityParams& params);

// Fills every edge weight from the stored node/edge features and marks the
// graph weights_precomputed.
void compute_weights(AffinityGraph& graph, const AffinityParams& params);

struct SuperpixelResult {
  AffinityGraph graph;
  RegionMap regions;
};

// Partitions the frame into superpixels that are each pure with respect to
// {occluded, occluder, free} (and, within a class, to the quantized flow),
// then builds the region graph with seed pairs across occluded/occluder
// boundaries of the same occlusion component.
//
// Regular blocks sized for target_count are split along class/flow
// discontinuities and same-class fragments are greedily merged back toward
// target_count. pb = nullptr means Pb == 0 everywhere.
SuperpixelResult superpixelize(const Image& intensity, const FlowField& flow, const Mask& occluded,
                               const Mask& occluder, const Image* pb, int target_count,
                               const AffinityParams& params = {});

struct OccluderBand {
  Mask band;
  bool clipped_at_border = false;
};

// Occluder band: Chebyshev dilation of the occluded mask minus the mask
// itself. Bands touching the image border are clipped and flagged.
OccluderBand build_occluder_band(const Mask& occluded, int band_width);

// Median strip width over occlusion components, clamped to [1, 5] px; the
// default band width when no occluder mask is supplied.
int default_band_width(const Mask& occluded);

}  // namespace layerlp
