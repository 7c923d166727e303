#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "sprite/backend.hpp"
#include "sprite/naming.hpp"
#include "sprite/png_io.hpp"
#include "sprite/raster.hpp"
#include "sprite/util.hpp"

namespace sprite {

/// A standalone RGBA sprite cropped to its mask's tight bounding box,
/// plus the canvas position it was lifted from.
struct SpriteAsset {
  std::string element_id;
  int origin_x = 0;
  int origin_y = 0;
  Image pixels;

  bool operator==(const SpriteAsset&) const = default;

  std::int64_t alpha_popcount() const {
    std::int64_t count = 0;
    for (std::size_t i = 3; i < pixels.rgba.size(); i += 4) {
      if (pixels.rgba[i] > 0) ++count;
    }
    return count;
  }
};

/// Lifts the masked pixels out of the screenshot. Pixels inside the mask keep
/// their RGB (alpha 255, or the source alpha verbatim when the source itself
/// carries transparency); everything else in the crop is fully transparent.
inline SpriteAsset extract_sprite(const Image& image, const Mask& mask,
                                  const std::string& element_id) {
  if (mask.width != image.width || mask.height != image.height) {
    throw ContractError("extract_sprite: mask dimensions must match the image");
  }
  if (!mask.any()) throw AssetError("extract_sprite: mask for '" + element_id + "' is empty");

  const BBox crop = mask.tight_bbox();
  const bool keep_source_alpha = image.has_transparency();

  SpriteAsset sprite;
  sprite.element_id = element_id;
  sprite.origin_x = crop.x_min;
  sprite.origin_y = crop.y_min;
  sprite.pixels = Image::filled(crop.width(), crop.height(), RGBA{0, 0, 0, 0});
  for (int y = crop.y_min; y < crop.y_max; ++y) {
    for (int x = crop.x_min; x < crop.x_max; ++x) {
      if (!mask.get(x, y)) continue;
      RGBA pixel = image.at(x, y);
      if (!keep_source_alpha) pixel.a = 255;
      sprite.pixels.put(x - crop.x_min, y - crop.y_min, pixel);
    }
  }
  return sprite;
}

/// Occlusion recovery behind an extracted layer. Delegates to the inpainting
/// backend and then checks the contract: dimensions unchanged and every
/// pixel outside the mask byte-identical to the input.
inline Image recover_background(const Image& image, const Mask& mask, Inpainter& inpainter) {
  if (mask.width != image.width || mask.height != image.height) {
    throw ContractError("recover_background: mask dimensions must match the image");
  }
  if (!mask.any()) return image;
  Image recovered = inpainter.inpaint(image, mask);
  if (recovered.width != image.width || recovered.height != image.height) {
    throw ContractError("inpainting backend changed the image dimensions");
  }
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      if (mask.get(x, y)) continue;
      if (!(recovered.at(x, y) == image.at(x, y))) {
        throw ContractError("inpainting backend mutated unmasked pixel (" + std::to_string(x) +
                            ", " + std::to_string(y) + ")");
      }
    }
  }
  return recovered;
}

/// Test oracle: rasterizes both boxes and literally counts pixels. Slow and
/// simple on purpose; the analytic iou() must agree with it exactly.
inline IouCounts raster_iou_counts(const BBox& a, const BBox& b, int canvas_w, int canvas_h) {
  IouCounts counts;
  const int y0 = std::max(0, std::min(a.y_min, b.y_min));
  const int y1 = std::min(canvas_h, std::max(a.y_max, b.y_max));
  const int x0 = std::max(0, std::min(a.x_min, b.x_min));
  const int x1 = std::min(canvas_w, std::max(a.x_max, b.x_max));
  for (int y = y0; y < y1; ++y) {
    for (int x = x0; x < x1; ++x) {
      const bool in_a = a.contains_point(x, y);
      const bool in_b = b.contains_point(x, y);
      if (in_a && in_b) ++counts.intersection;
      if (in_a || in_b) ++counts.union_;
    }
  }
  return counts;
}

inline double raster_iou_oracle(const BBox& a, const BBox& b, int canvas_w, int canvas_h) {
  const IouCounts counts = raster_iou_counts(a, b, canvas_w, canvas_h);
  if (counts.union_ == 0) return 0.0;
  return static_cast<double>(counts.intersection) / static_cast<double>(counts.union_);
}

/// Paints the sprite over the base image at its recorded origin.
inline Image composite_over(const Image& base, const SpriteAsset& sprite) {
  Image out = base;
  for (int y = 0; y < sprite.pixels.height; ++y) {
    for (int x = 0; x < sprite.pixels.width; ++x) {
      const int cx = sprite.origin_x + x;
      const int cy = sprite.origin_y + y;
      if (!out.in_bounds(cx, cy)) continue;
      out.put(cx, cy, blend_over(sprite.pixels.at(x, y), out.at(cx, cy)));
    }
  }
  return out;
}

namespace detail {
inline constexpr const char* kSpriteManifestName = "sprites.json";
}

/// Writes `<dir>/<sanitized id>.png` plus a manifest entry carrying the
/// origin. Returns the path relative to dir. The per-directory manifest
/// (sprites.json) is what read_sprite uses to invert the write.
inline std::string write_sprite(const SpriteAsset& sprite, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IOError("cannot create sprite directory " + dir + ": " + ec.message());

  const std::string file_name = sanitize_name(sprite.element_id) + ".png";
  write_file_atomic(fs::path(dir) / file_name, encode_png(sprite.pixels));

  const fs::path manifest_path = fs::path(dir) / detail::kSpriteManifestName;
  nlohmann::ordered_json manifest = nlohmann::ordered_json::object();
  if (fs::exists(manifest_path)) {
    try {
      manifest = nlohmann::ordered_json::parse(read_file(manifest_path.string()));
    } catch (const nlohmann::json::exception&) {
      throw IOError("corrupt sprite manifest: " + manifest_path.string());
    }
  }
  nlohmann::ordered_json entry;
  entry["element_id"] = sprite.element_id;
  entry["origin"] = {sprite.origin_x, sprite.origin_y};
  manifest[file_name] = std::move(entry);

  // Keyed by file name and re-emitted sorted so rewrites are deterministic.
  nlohmann::ordered_json sorted = nlohmann::ordered_json::object();
  std::vector<std::string> keys;
  for (const auto& item : manifest.items()) keys.push_back(item.key());
  std::sort(keys.begin(), keys.end());
  for (const std::string& key : keys) sorted[key] = manifest[key];
  write_file_atomic(manifest_path, sorted.dump(-1, ' ', true) + "\n");
  return file_name;
}

inline SpriteAsset read_sprite(const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path file(path);
  const fs::path manifest_path = file.parent_path() / detail::kSpriteManifestName;
  if (!fs::exists(file)) throw IOError("sprite file does not exist: " + path);
  if (!fs::exists(manifest_path)) {
    throw IOError("sprite manifest does not exist: " + manifest_path.string());
  }
  nlohmann::ordered_json manifest;
  try {
    manifest = nlohmann::ordered_json::parse(read_file(manifest_path.string()));
  } catch (const nlohmann::json::exception& e) {
    throw IOError("corrupt sprite manifest: " + std::string(e.what()));
  }
  const std::string file_name = file.filename().string();
  if (!manifest.contains(file_name)) {
    throw IOError("sprite manifest has no entry for " + file_name);
  }
  SpriteAsset sprite;
  try {
    sprite.element_id = manifest[file_name].at("element_id").get<std::string>();
    sprite.origin_x = manifest[file_name].at("origin").at(0).get<int>();
    sprite.origin_y = manifest[file_name].at("origin").at(1).get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw IOError("malformed sprite manifest entry for " + file_name + ": " + e.what());
  }
  sprite.pixels = read_png(path);
  return sprite;
}

}  // namespace sprite
