#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "synthlearn/common.hpp"

namespace synthlearn {

enum class ValueRange { Unit, Signed };  // [0,1] or [-1,1]

// Single-channel raster with an explicit value range; the unit of every
// image pipeline in this project.
struct GrayImage {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<float> values;  // row-major, height*width
  ValueRange range = ValueRange::Unit;

  GrayImage() = default;
  GrayImage(std::size_t h, std::size_t w, ValueRange r = ValueRange::Unit)
      : height(h), width(w), values(h * w, 0.0f), range(r) {}

  float& at(std::size_t y, std::size_t x) { return values[y * width + x]; }
  float at(std::size_t y, std::size_t x) const { return values[y * width + x]; }

  float lo() const { return range == ValueRange::Unit ? 0.0f : -1.0f; }
  float hi() const { return 1.0f; }

  void clamp_to_range() {
    const float l = lo();
    for (auto& v : values) v = v < l ? l : (v > 1.0f ? 1.0f : v);
  }
};

// [0,1] <-> [-1,1]
GrayImage to_signed(const GrayImage& img);
GrayImage to_unit(const GrayImage& img);

// Binary PGM (P5), 8-bit or 16-bit big-endian samples, mapped linearly to [0,1].
void write_pgm(const GrayImage& img, const std::string& path, int bit_depth = 8);
GrayImage read_pgm(const std::string& path);

}  // namespace synthlearn
