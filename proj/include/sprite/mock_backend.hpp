#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sprite/backend.hpp"
#include "sprite/png_io.hpp"
#include "sprite/scaffold_io.hpp"
#include "sprite/util.hpp"

namespace sprite {

/// Fixture table backing the mock backends: named screenshots with their
/// canned scaffolds, plus the color palette that stands in for open-vocabulary
/// grounding. Loaded once; immutable afterwards, so calls are pure.
struct FixtureManifest {
  struct Entry {
    std::string id;
    Image image;
    std::string scaffold_text;
  };

  std::vector<Entry> entries;
  std::vector<std::pair<std::string, RGBA>> palette;  // sorted by name

  static FixtureManifest load(const std::string& manifest_path) {
    namespace fs = std::filesystem;
    FixtureManifest manifest;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(manifest_path));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("mock manifest " + manifest_path + ": " + e.what());
    }
    const fs::path base = fs::path(manifest_path).parent_path();
    if (doc.contains("images")) {
      for (const auto& item : doc.at("images").items()) {
        Entry entry;
        entry.id = item.key();
        entry.image = read_png((base / item.value().at("image").get<std::string>()).string());
        entry.scaffold_text =
            read_file((base / item.value().at("scaffold").get<std::string>()).string());
        manifest.entries.push_back(std::move(entry));
      }
    }
    std::sort(manifest.entries.begin(), manifest.entries.end(),
              [](const Entry& a, const Entry& b) { return a.id < b.id; });
    if (doc.contains("palette")) {
      for (const auto& item : doc.at("palette").items()) {
        const auto& rgba = item.value();
        if (!rgba.is_array() || rgba.size() != 4) {
          throw ParseError("mock manifest palette entry '" + item.key() +
                           "' must be [r, g, b, a]");
        }
        manifest.palette.emplace_back(
            item.key(), RGBA{rgba.at(0).get<std::uint8_t>(), rgba.at(1).get<std::uint8_t>(),
                             rgba.at(2).get<std::uint8_t>(), rgba.at(3).get<std::uint8_t>()});
      }
    }
    std::sort(manifest.palette.begin(), manifest.palette.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return manifest;
  }

  /// Longest palette name mentioned in the phrase wins; ties break
  /// lexicographically. Returns nullptr when the phrase names no color.
  const RGBA* color_for_phrase(const std::string& phrase) const {
    const RGBA* best = nullptr;
    std::size_t best_len = 0;
    for (const auto& [name, color] : palette) {
      if (phrase.find(name) == std::string::npos) continue;
      if (name.size() > best_len) {
        best = &color;
        best_len = name.size();
      }
    }
    return best;
  }
};

/// Deterministic stand-ins for the four model roles, operating on synthetic
/// exact-color screenshots: scaffold inference is a fixture lookup, detection
/// is connected-component analysis of palette colors, segmentation is an
/// exact color (or rectangle) fill, and inpainting fills with the mean of the
/// mask's one-pixel outer boundary ring.
class MockBackend : public ScaffoldProvider, public Detector, public Segmenter, public Inpainter {
 public:
  explicit MockBackend(FixtureManifest manifest,
                       MockSegmenterMode segmenter_mode = MockSegmenterMode::Color)
      : manifest_(std::move(manifest)), segmenter_mode_(segmenter_mode) {}

  ScaffoldInference infer(const Image& image, const std::string& prompt) override {
    if (prompt.empty()) throw ContractError("infer requires a nonempty prompt");
    for (const FixtureManifest::Entry& entry : manifest_.entries) {
      if (entry.image == image) {
        ScaffoldInference result;
        result.scaffold = parse_scaffold(entry.scaffold_text);
        result.diagnostics = validate(result.scaffold, ValidationMode::Lenient);
        return result;
      }
    }
    throw BackendError(BackendError::Kind::Protocol,
                       "mock scaffold provider: no fixture matches the supplied image");
  }

  DetectionResult detect(const Image& image, const std::string& phrase) override {
    if (phrase.empty()) throw ContractError("detect requires a nonempty phrase");
    DetectionResult result;
    const RGBA* color = manifest_.color_for_phrase(phrase);
    if (!color) return result;

    // 4-connected components of exactly-matching pixels.
    std::vector<int> component(static_cast<std::size_t>(image.width) * image.height, -1);
    int component_count = 0;
    std::vector<BBox> boxes;
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        const std::size_t index = static_cast<std::size_t>(y) * image.width + x;
        if (component[index] != -1 || !(image.at(x, y) == *color)) continue;
        const int id = component_count++;
        BBox box{x, y, x + 1, y + 1};
        std::vector<std::pair<int, int>> stack{{x, y}};
        component[index] = id;
        while (!stack.empty()) {
          const auto [cx, cy] = stack.back();
          stack.pop_back();
          box.x_min = std::min(box.x_min, cx);
          box.y_min = std::min(box.y_min, cy);
          box.x_max = std::max(box.x_max, cx + 1);
          box.y_max = std::max(box.y_max, cy + 1);
          const int nx[4] = {cx - 1, cx + 1, cx, cx};
          const int ny[4] = {cy, cy, cy - 1, cy + 1};
          for (int k = 0; k < 4; ++k) {
            if (!image.in_bounds(nx[k], ny[k])) continue;
            const std::size_t nindex = static_cast<std::size_t>(ny[k]) * image.width + nx[k];
            if (component[nindex] != -1 || !(image.at(nx[k], ny[k]) == *color)) continue;
            component[nindex] = id;
            stack.emplace_back(nx[k], ny[k]);
          }
        }
        boxes.push_back(box);
      }
    }
    std::sort(boxes.begin(), boxes.end(), [](const BBox& a, const BBox& b) {
      return std::make_tuple(-a.area(), a.y_min, a.x_min) <
             std::make_tuple(-b.area(), b.y_min, b.x_min);
    });
    for (const BBox& box : boxes) result.detections.push_back(Detection{box, 1.0, phrase});
    return result;
  }

  Mask segment(const Image& image, const BBox& box, const std::string& phrase) override {
    if (!box.positive() || box.x_min < 0 || box.y_min < 0 || box.x_max > image.width ||
        box.y_max > image.height) {
      throw ContractError("segment requires a box inside the image bounds");
    }
    if (segmenter_mode_ == MockSegmenterMode::Rect) {
      return Mask::from_box(image.width, image.height, box);
    }
    const RGBA* color = manifest_.color_for_phrase(phrase);
    RGBA target;
    if (color) {
      target = *color;
    } else {
      // Dominant exact color inside the box; ties break on the smallest
      // (r, g, b, a) tuple.
      std::map<std::tuple<int, int, int, int>, std::int64_t> histogram;
      for (int y = box.y_min; y < box.y_max; ++y) {
        for (int x = box.x_min; x < box.x_max; ++x) {
          const RGBA p = image.at(x, y);
          ++histogram[{p.r, p.g, p.b, p.a}];
        }
      }
      std::int64_t best = 0;
      std::tuple<int, int, int, int> best_key{};
      for (const auto& [key, count] : histogram) {
        if (count > best) {
          best = count;
          best_key = key;
        }
      }
      target = RGBA{static_cast<std::uint8_t>(std::get<0>(best_key)),
                    static_cast<std::uint8_t>(std::get<1>(best_key)),
                    static_cast<std::uint8_t>(std::get<2>(best_key)),
                    static_cast<std::uint8_t>(std::get<3>(best_key))};
    }
    Mask mask = Mask::empty(image.width, image.height);
    for (int y = box.y_min; y < box.y_max; ++y) {
      for (int x = box.x_min; x < box.x_max; ++x) {
        if (image.at(x, y) == target) mask.set(x, y, true);
      }
    }
    return mask;
  }

  Image inpaint(const Image& image, const Mask& mask) override {
    if (mask.width != image.width || mask.height != image.height) {
      throw ContractError("inpaint requires mask dimensions equal to the image");
    }
    if (!mask.any()) return image;

    // Mean color of the unmasked pixels 8-adjacent to the mask.
    std::int64_t sums[4] = {0, 0, 0, 0};
    std::int64_t ring = 0;
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        if (mask.get(x, y)) continue;
        bool adjacent = false;
        for (int dy = -1; dy <= 1 && !adjacent; ++dy) {
          for (int dx = -1; dx <= 1 && !adjacent; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const int nx = x + dx;
            const int ny = y + dy;
            if (image.in_bounds(nx, ny) && mask.get(nx, ny)) adjacent = true;
          }
        }
        if (!adjacent) continue;
        const RGBA p = image.at(x, y);
        sums[0] += p.r;
        sums[1] += p.g;
        sums[2] += p.b;
        sums[3] += p.a;
        ++ring;
      }
    }
    RGBA fill{128, 128, 128, 255};  // documented fallback for ringless masks
    if (ring > 0) {
      auto mean = [&](int channel) {
        return static_cast<std::uint8_t>((sums[channel] + ring / 2) / ring);
      };
      fill = RGBA{mean(0), mean(1), mean(2), mean(3)};
    }
    Image out = image;
    for (int y = 0; y < image.height; ++y) {
      for (int x = 0; x < image.width; ++x) {
        if (mask.get(x, y)) out.put(x, y, fill);
      }
    }
    return out;
  }

  const FixtureManifest& manifest() const { return manifest_; }

 private:
  FixtureManifest manifest_;
  MockSegmenterMode segmenter_mode_;
};

inline BackendSet make_mock_backend(const std::string& manifest_path,
                                    MockSegmenterMode segmenter_mode = MockSegmenterMode::Color) {
  auto backend = std::make_shared<MockBackend>(FixtureManifest::load(manifest_path), segmenter_mode);
  BackendSet set;
  set.scaffold_provider = backend;
  set.detector = backend;
  set.segmenter = backend;
  set.inpainter = backend;
  return set;
}

}  // namespace sprite
