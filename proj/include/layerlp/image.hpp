#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>

namespace layerlp {

// Raster layout convention throughout: row index = y, column index = x.
using Image = Eigen::ArrayXXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;
using LabelImage = Eigen::ArrayXXi;

struct FlowField {
  Eigen::ArrayXXd vx;
  Eigen::ArrayXXd vy;

  int height() const { return static_cast<int>(vx.rows()); }
  int width() const { return static_cast<int>(vx.cols()); }

  static FlowField zero(int height, int width) {
    return {Eigen::ArrayXXd::Zero(height, width), Eigen::ArrayXXd::Zero(height, width)};
  }
};

// Portable graymap I/O. Readers accept P2 and P5 with maxval up to 65535
// (16-bit P5 is big-endian per Netpbm). Values are returned raw; use
// to_intensity for [0,1] images.
LabelImage read_pgm(const std::string& path, int& maxval);
void write_pgm(const std::string& path, const LabelImage& values, int maxval, bool binary = true);

Image to_intensity(const LabelImage& raw, int maxval);

Image read_intensity_pgm(const std::string& path);
void write_intensity_pgm(const std::string& path, const Image& img);

// Masks are stored as 0/255 graymaps; any nonzero value reads back as true.
Mask read_mask_pgm(const std::string& path);
void write_mask_pgm(const std::string& path, const Mask& mask);

// Flow JSON document: {"width": W, "height": H, "vx": [...], "vy": [...]},
// both channels row-major.
FlowField read_flow_json(const std::string& path);
void write_flow_json(const std::string& path, const FlowField& flow);

// 8-connected labeling of true pixels; labels are 1..count in row-major
// discovery order, 0 elsewhere.
LabelImage connected_components(const Mask& mask, int& count);

// Chebyshev dilation by `radius` pixels.
Mask dilate(const Mask& mask, int radius);

}  // namespace layerlp
