#include "layerlp/image.hpp"

#include <nlohmann/json.hpp>

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace layerlp {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

// Skips whitespace and '#' comment lines between header tokens.
int next_header_int(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF) fail(path, "truncated PGM header");
  std::string tok;
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  try {
    return std::stoi(tok);
  } catch (const std::exception&) {
    fail(path, "bad PGM header token '" + tok + "'");
  }
}

}  // namespace

LabelImage read_pgm(const std::string& path, int& maxval) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || (magic[1] != '2' && magic[1] != '5')) fail(path, "not a PGM (P2/P5) file");
  const bool binary = magic[1] == '5';
  const int width = next_header_int(in, path);
  const int height = next_header_int(in, path);
  maxval = next_header_int(in, path);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) fail(path, "bad PGM dimensions");

  LabelImage img(height, width);
  if (binary) {
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf(static_cast<size_t>(width) * height * bytes);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) fail(path, "truncated PGM data");
    size_t p = 0;
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        int v = buf[p++];
        if (bytes == 2) v = (v << 8) | buf[p++];
        img(y, x) = v;
      }
  } else {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        int v;
        if (!(in >> v)) fail(path, "truncated PGM data");
        img(y, x) = v;
      }
  }
  return img;
}

void write_pgm(const std::string& path, const LabelImage& values, int maxval, bool binary) {
  if (maxval <= 0 || maxval > 65535) throw std::invalid_argument(path + ": PGM maxval out of range");
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  const int height = static_cast<int>(values.rows());
  const int width = static_cast<int>(values.cols());
  out << (binary ? "P5" : "P2") << "\n" << width << " " << height << "\n" << maxval << "\n";
  if (binary) {
    const int bytes = maxval > 255 ? 2 : 1;
    std::vector<unsigned char> buf;
    buf.reserve(static_cast<size_t>(width) * height * bytes);
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) {
        int v = values(y, x);
        if (v < 0 || v > maxval) fail(path, "pixel value outside [0, maxval]");
        if (bytes == 2) buf.push_back(static_cast<unsigned char>(v >> 8));
        buf.push_back(static_cast<unsigned char>(v & 0xff));
      }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  } else {
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        int v = values(y, x);
        if (v < 0 || v > maxval) fail(path, "pixel value outside [0, maxval]");
        out << v << (x + 1 == width ? '\n' : ' ');
      }
    }
  }
}

Image to_intensity(const LabelImage& raw, int maxval) {
  return raw.cast<double>() / static_cast<double>(maxval);
}

Image read_intensity_pgm(const std::string& path) {
  int maxval = 0;
  const LabelImage raw = read_pgm(path, maxval);
  return to_intensity(raw, maxval);
}

void write_intensity_pgm(const std::string& path, const Image& img) {
  LabelImage raw(img.rows(), img.cols());
  for (Eigen::Index y = 0; y < img.rows(); ++y)
    for (Eigen::Index x = 0; x < img.cols(); ++x) {
      const double v = std::min(1.0, std::max(0.0, img(y, x)));
      raw(y, x) = static_cast<int>(v * 255.0 + 0.5);
    }
  write_pgm(path, raw, 255);
}

Mask read_mask_pgm(const std::string& path) {
  int maxval = 0;
  const LabelImage raw = read_pgm(path, maxval);
  return raw != 0;
}

void write_mask_pgm(const std::string& path, const Mask& mask) {
  LabelImage raw = mask.cast<int>() * 255;
  write_pgm(path, raw, 255);
}

FlowField read_flow_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(path, std::string("invalid JSON: ") + e.what());
  }
  for (const char* key : {"width", "height", "vx", "vy"})
    if (!doc.contains(key)) fail(path, std::string("flow document missing \"") + key + "\"");
  const int width = doc["width"].get<int>();
  const int height = doc["height"].get<int>();
  if (width <= 0 || height <= 0) fail(path, "bad flow dimensions");
  const auto& vx = doc["vx"];
  const auto& vy = doc["vy"];
  const size_t n = static_cast<size_t>(width) * height;
  if (vx.size() != n || vy.size() != n) fail(path, "vx/vy length does not match width*height");
  FlowField flow = FlowField::zero(height, width);
  size_t p = 0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x, ++p) {
      flow.vx(y, x) = vx[p].get<double>();
      flow.vy(y, x) = vy[p].get<double>();
    }
  return flow;
}

void write_flow_json(const std::string& path, const FlowField& flow) {
  json doc;
  doc["width"] = flow.width();
  doc["height"] = flow.height();
  json vx = json::array();
  json vy = json::array();
  for (int y = 0; y < flow.height(); ++y)
    for (int x = 0; x < flow.width(); ++x) {
      vx.push_back(flow.vx(y, x));
      vy.push_back(flow.vy(y, x));
    }
  doc["vx"] = std::move(vx);
  doc["vy"] = std::move(vy);
  std::ofstream out(path);
  if (!out) fail(path, "cannot open for writing");
  out << doc.dump() << "\n";
}

LabelImage connected_components(const Mask& mask, int& count) {
  const int height = static_cast<int>(mask.rows());
  const int width = static_cast<int>(mask.cols());
  LabelImage labels = LabelImage::Zero(height, width);
  count = 0;
  std::vector<std::pair<int, int>> stack;
  for (int y0 = 0; y0 < height; ++y0)
    for (int x0 = 0; x0 < width; ++x0) {
      if (!mask(y0, x0) || labels(y0, x0) != 0) continue;
      ++count;
      labels(y0, x0) = count;
      stack.assign(1, {y0, x0});
      while (!stack.empty()) {
        const auto [y, x] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = y + dy, nx = x + dx;
            if (ny < 0 || ny >= height || nx < 0 || nx >= width) continue;
            if (!mask(ny, nx) || labels(ny, nx) != 0) continue;
            labels(ny, nx) = count;
            stack.push_back({ny, nx});
          }
      }
    }
  return labels;
}

Mask dilate(const Mask& mask, int radius) {
  const int height = static_cast<int>(mask.rows());
  const int width = static_cast<int>(mask.cols());
  Mask out = Mask::Constant(height, width, false);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      if (!mask(y, x)) continue;
      const int y0 = std::max(0, y - radius), y1 = std::min(height - 1, y + radius);
      const int x0 = std::max(0, x - radius), x1 = std::min(width - 1, x + radius);
      for (int ny = y0; ny <= y1; ++ny)
        for (int nx = x0; nx <= x1; ++nx) out(ny, nx) = true;
    }
  return out;
}

}  // namespace layerlp
