#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "sprite/diagnostics.hpp"

namespace sprite {

/// Axis-aligned box in integer pixels, origin at the canvas top-left,
/// max edges exclusive. area() therefore equals the raster pixel count.
struct BBox {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  bool operator==(const BBox&) const = default;

  int width() const { return x_max - x_min; }
  int height() const { return y_max - y_min; }
  std::int64_t area() const {
    return static_cast<std::int64_t>(width()) * static_cast<std::int64_t>(height());
  }
  bool valid() const { return x_min >= 0 && y_min >= 0 && x_min < x_max && y_min < y_max; }
  bool positive() const { return x_min < x_max && y_min < y_max; }

  bool contains(const BBox& other) const {
    return other.x_min >= x_min && other.y_min >= y_min && other.x_max <= x_max &&
           other.y_max <= y_max;
  }
  bool contains_point(int x, int y) const {
    return x >= x_min && x < x_max && y >= y_min && y < y_max;
  }
};

inline std::string to_string(const BBox& b) {
  return "[" + std::to_string(b.x_min) + ", " + std::to_string(b.y_min) + ", " +
         std::to_string(b.x_max) + ", " + std::to_string(b.y_max) + "]";
}

/// Intersection box; may be empty (non-positive extent) when boxes are disjoint.
inline BBox intersect(const BBox& a, const BBox& b) {
  return BBox{std::max(a.x_min, b.x_min), std::max(a.y_min, b.y_min), std::min(a.x_max, b.x_max),
              std::min(a.y_max, b.y_max)};
}

inline std::int64_t intersection_area(const BBox& a, const BBox& b) {
  const BBox i = intersect(a, b);
  if (!i.positive()) return 0;
  return i.area();
}

struct IouCounts {
  std::int64_t intersection = 0;
  std::int64_t union_ = 0;
};

/// Exact intersection/union pixel counts by inclusion-exclusion over integer
/// coordinates. Exact for every integer box, no rasterization required.
inline IouCounts iou_counts(const BBox& a, const BBox& b) {
  const std::int64_t inter = intersection_area(a, b);
  return IouCounts{inter, a.area() + b.area() - inter};
}

/// Intersection-over-union in [0, 1]. Both boxes must be valid.
inline double iou(const BBox& a, const BBox& b) {
  const IouCounts c = iou_counts(a, b);
  if (c.union_ == 0) return 0.0;
  return static_cast<double>(c.intersection) / static_cast<double>(c.union_);
}

struct Clamped {
  BBox box;
  bool collapsed = false;  // clipping removed a whole dimension and it was re-expanded
};

/// Clips a box into [0, canvas_w] x [0, canvas_h]. A box lying entirely
/// outside the canvas is an error; a box whose clipped extent collapses is
/// expanded back inward to min_box_px. Idempotent.
inline Clamped clamp_box(const BBox& b, int canvas_w, int canvas_h, int min_box_px = 1) {
  if (canvas_w <= 0 || canvas_h <= 0) {
    throw ContractError("clamp_box: canvas dimensions must be positive");
  }
  if (min_box_px < 1) min_box_px = 1;
  if (b.x_max <= 0 || b.y_max <= 0 || b.x_min >= canvas_w || b.y_min >= canvas_h) {
    throw CalibrationError("box " + to_string(b) + " lies entirely outside the " +
                           std::to_string(canvas_w) + "x" + std::to_string(canvas_h) + " canvas");
  }
  Clamped result;
  result.box = BBox{std::clamp(b.x_min, 0, canvas_w), std::clamp(b.y_min, 0, canvas_h),
                    std::clamp(b.x_max, 0, canvas_w), std::clamp(b.y_max, 0, canvas_h)};
  auto widen = [&](int& lo, int& hi, int limit) {
    const int want = std::min(min_box_px, limit);
    if (hi - lo >= want) return;
    hi = std::min(limit, lo + want);
    lo = hi - want;
    result.collapsed = true;
  };
  widen(result.box.x_min, result.box.x_max, canvas_w);
  widen(result.box.y_min, result.box.y_max, canvas_h);
  return result;
}

}  // namespace sprite
