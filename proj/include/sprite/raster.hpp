#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "sprite/geometry.hpp"

namespace sprite {

struct RGBA {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  std::uint8_t a = 255;

  bool operator==(const RGBA&) const = default;
};

/// 8-bit RGBA raster, row-major, immutable by convention once produced.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  bool operator==(const Image&) const = default;

  static Image filled(int w, int h, RGBA color) {
    Image img;
    img.width = w;
    img.height = h;
    img.rgba.resize(static_cast<std::size_t>(w) * h * 4);
    for (std::size_t i = 0; i < img.rgba.size(); i += 4) {
      img.rgba[i] = color.r;
      img.rgba[i + 1] = color.g;
      img.rgba[i + 2] = color.b;
      img.rgba[i + 3] = color.a;
    }
    return img;
  }

  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }

  std::size_t offset(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * 4;
  }

  RGBA at(int x, int y) const {
    const std::size_t o = offset(x, y);
    return RGBA{rgba[o], rgba[o + 1], rgba[o + 2], rgba[o + 3]};
  }

  void put(int x, int y, RGBA color) {
    const std::size_t o = offset(x, y);
    rgba[o] = color.r;
    rgba[o + 1] = color.g;
    rgba[o + 2] = color.b;
    rgba[o + 3] = color.a;
  }

  void fill_rect(const BBox& box, RGBA color) {
    for (int y = std::max(0, box.y_min); y < std::min(height, box.y_max); ++y) {
      for (int x = std::max(0, box.x_min); x < std::min(width, box.x_max); ++x) {
        put(x, y, color);
      }
    }
  }

  bool has_transparency() const {
    for (std::size_t i = 3; i < rgba.size(); i += 4) {
      if (rgba[i] != 255) return true;
    }
    return false;
  }
};

/// Bit-per-pixel mask, row-major, LSB-first within each byte. The popcount
/// is kept in step with the buffer by the mutators.
struct Mask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;
  std::int64_t popcount = 0;

  bool operator==(const Mask&) const = default;

  static Mask empty(int w, int h) {
    Mask m;
    m.width = w;
    m.height = h;
    m.bits.assign((static_cast<std::size_t>(w) * h + 7) / 8, 0);
    return m;
  }

  static Mask from_box(int w, int h, const BBox& box) {
    Mask m = empty(w, h);
    for (int y = std::max(0, box.y_min); y < std::min(h, box.y_max); ++y) {
      for (int x = std::max(0, box.x_min); x < std::min(w, box.x_max); ++x) {
        m.set(x, y, true);
      }
    }
    return m;
  }

  bool get(int x, int y) const {
    const std::size_t bit = static_cast<std::size_t>(y) * width + x;
    return (bits[bit >> 3] >> (bit & 7)) & 1;
  }

  void set(int x, int y, bool value) {
    const std::size_t bit = static_cast<std::size_t>(y) * width + x;
    const std::uint8_t mask = static_cast<std::uint8_t>(1u << (bit & 7));
    const bool current = bits[bit >> 3] & mask;
    if (current == value) return;
    if (value) {
      bits[bit >> 3] |= mask;
      ++popcount;
    } else {
      bits[bit >> 3] &= static_cast<std::uint8_t>(~mask);
      --popcount;
    }
  }

  bool any() const { return popcount > 0; }

  /// Tight bounding box of the set pixels; callers must check any() first.
  BBox tight_bbox() const {
    BBox box{width, height, 0, 0};
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        if (!get(x, y)) continue;
        box.x_min = std::min(box.x_min, x);
        box.y_min = std::min(box.y_min, y);
        box.x_max = std::max(box.x_max, x + 1);
        box.y_max = std::max(box.y_max, y + 1);
      }
    }
    return box;
  }
};

inline Mask mask_union(const Mask& a, const Mask& b) {
  Mask out = Mask::empty(a.width, a.height);
  for (std::size_t i = 0; i < out.bits.size(); ++i) {
    out.bits[i] = static_cast<std::uint8_t>(a.bits[i] | b.bits[i]);
  }
  out.popcount = 0;
  for (std::uint8_t byte : out.bits) out.popcount += __builtin_popcount(byte);
  return out;
}

/// Standard source-over blend in integer arithmetic; fully opaque source
/// pixels replace the destination byte-exactly.
inline RGBA blend_over(RGBA src, RGBA dst) {
  if (src.a == 255) return src;
  if (src.a == 0) return dst;
  const int sa = src.a;
  const int da = dst.a;
  const int out_a = sa + da * (255 - sa) / 255;
  if (out_a == 0) return RGBA{0, 0, 0, 0};
  auto channel = [&](int s, int d) {
    return static_cast<std::uint8_t>((s * sa * 255 + d * da * (255 - sa) + out_a * 255 / 2) /
                                     (out_a * 255));
  };
  return RGBA{channel(src.r, dst.r), channel(src.g, dst.g), channel(src.b, dst.b),
              static_cast<std::uint8_t>(out_a)};
}

}  // namespace sprite
