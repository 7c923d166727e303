#pragma once

#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sprite/raster.hpp"
#include "sprite/scaffold.hpp"
#include "sprite/validate.hpp"

namespace sprite {

struct Detection {
  BBox bbox;
  double score = 0.0;
  std::string phrase;

  bool operator==(const Detection&) const = default;
};

struct DetectionResult {
  std::vector<Detection> detections;  // scores descending
};

struct ScaffoldInference {
  Scaffold scaffold;
  std::vector<Diagnostic> diagnostics;  // lenient validation of the returned document
};

// Four narrow role contracts mirroring the pipeline stages. Implementations
// must be safe for concurrent calls.
class ScaffoldProvider {
 public:
  virtual ~ScaffoldProvider() = default;
  virtual ScaffoldInference infer(const Image& image, const std::string& prompt) = 0;
};

class Detector {
 public:
  virtual ~Detector() = default;
  virtual DetectionResult detect(const Image& image, const std::string& phrase) = 0;
};

class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual Mask segment(const Image& image, const BBox& box, const std::string& phrase) = 0;
};

class Inpainter {
 public:
  virtual ~Inpainter() = default;
  virtual Image inpaint(const Image& image, const Mask& mask) = 0;
};

struct BackendSet {
  std::shared_ptr<ScaffoldProvider> scaffold_provider;
  std::shared_ptr<Detector> detector;
  std::shared_ptr<Segmenter> segmenter;
  std::shared_ptr<Inpainter> inpainter;
};

enum class BackendKind { Mock, Http };

enum class MockSegmenterMode { Color, Rect };

struct BackendConfig {
  BackendKind kind = BackendKind::Mock;
  // http backends; all four endpoints are required for kind = http.
  std::string scaffold_url;
  std::string detect_url;
  std::string segment_url;
  std::string inpaint_url;
  int timeout_ms = 30000;
  int max_retries = 2;
  int retry_base_ms = 500;  // exponential backoff base
  std::string credential_env;  // env var NAME; resolved at call time, never stored
  // mock backends
  std::string mock_manifest;  // fixture manifest path
  MockSegmenterMode segmenter_mode = MockSegmenterMode::Color;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

/// `key = value` lines, '#' comments; returns pairs in file order.
inline std::vector<std::pair<std::string, std::string>> parse_kv_config(const std::string& text,
                                                                        const std::string& what) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const std::size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ParseError(what + ": line " + std::to_string(line_no) + " is not 'key = value'");
    }
    entries.emplace_back(trim(trimmed.substr(0, eq)), trim(trimmed.substr(eq + 1)));
  }
  return entries;
}

inline int parse_config_int(const std::string& value, const std::string& key,
                            const std::string& what) {
  try {
    std::size_t used = 0;
    const int parsed = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ParseError(what + ": key '" + key + "' needs an integer, got '" + value + "'");
  }
}

inline double parse_config_double(const std::string& value, const std::string& key,
                                  const std::string& what) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw ParseError(what + ": key '" + key + "' needs a number, got '" + value + "'");
  }
}

}  // namespace detail

/// Parses a backend config (documented key = value format). Unknown keys are
/// rejected so typos cannot silently change behavior.
inline BackendConfig parse_backend_config(const std::string& text,
                                          const std::string& what = "backend config") {
  BackendConfig config;
  for (const auto& [key, value] : detail::parse_kv_config(text, what)) {
    if (key == "kind") {
      if (value == "mock") {
        config.kind = BackendKind::Mock;
      } else if (value == "http") {
        config.kind = BackendKind::Http;
      } else {
        throw ParseError(what + ": kind must be 'mock' or 'http', got '" + value + "'");
      }
    } else if (key == "scaffold_url") {
      config.scaffold_url = value;
    } else if (key == "detect_url") {
      config.detect_url = value;
    } else if (key == "segment_url") {
      config.segment_url = value;
    } else if (key == "inpaint_url") {
      config.inpaint_url = value;
    } else if (key == "timeout_ms") {
      config.timeout_ms = detail::parse_config_int(value, key, what);
    } else if (key == "max_retries") {
      config.max_retries = detail::parse_config_int(value, key, what);
    } else if (key == "retry_base_ms") {
      config.retry_base_ms = detail::parse_config_int(value, key, what);
    } else if (key == "credential_env") {
      config.credential_env = value;
    } else if (key == "manifest") {
      config.mock_manifest = value;
    } else if (key == "segmenter_mode") {
      if (value == "color") {
        config.segmenter_mode = MockSegmenterMode::Color;
      } else if (value == "rect") {
        config.segmenter_mode = MockSegmenterMode::Rect;
      } else {
        throw ParseError(what + ": segmenter_mode must be 'color' or 'rect'");
      }
    } else {
      throw ParseError(what + ": unknown key '" + key + "'");
    }
  }
  if (config.kind == BackendKind::Http) {
    if (config.scaffold_url.empty() || config.detect_url.empty() || config.segment_url.empty() ||
        config.inpaint_url.empty()) {
      throw ParseError(what +
                       ": http backends require scaffold_url, detect_url, segment_url and "
                       "inpaint_url");
    }
  } else if (config.mock_manifest.empty()) {
    throw ParseError(what + ": mock backends require a manifest path");
  }
  return config;
}

/// The shipped system prompt for the scaffold-inference role. The versioned
/// copy lives in prompts/ui_master.txt; this constant is the built-in
/// fallback and the two are kept in step by a test.
inline const std::string& default_ui_master_prompt() {
  static const std::string kPrompt =
      "You are UI Master, a veteran game interface engineer. Study the attached\n"
      "screenshot and reconstruct its interface as a hierarchical UI scaffold.\n"
      "\n"
      "Model exactly two kinds of elements:\n"
      "- container panels, which group other elements and may nest;\n"
      "- interactive or content elements (button, toggle, progress_bar, slider,\n"
      "  text, icon, image, grid), which never contain children.\n"
      "\n"
      "Ignore purely decorative flourishes. Focus on the functional widgets a\n"
      "player would interact with or read, and group them under the panel that\n"
      "visually owns them so the nesting matches the on-screen hierarchy.\n"
      "\n"
      "Answer with one YAML document and nothing else, in this shape:\n"
      "\n"
      "canvas_width: <image width in px>\n"
      "canvas_height: <image height in px>\n"
      "phase: scaffolded\n"
      "elements:\n"
      "- id: <snake_case identifier, unique>\n"
      "  label: <panel|button|toggle|progress_bar|slider|text|icon|image|grid>\n"
      "  parent: <id of the owning panel, or null for a top-level panel>\n"
      "  bbox_2d: [x_min, y_min, x_max, y_max]\n"
      "  seg_prompt: <one line describing the element's look: dominant color,\n"
      "    shape and role, written so a detector or segmenter can find it>\n"
      "\n"
      "Rules:\n"
      "- every element carries a parent field; only panels may be parents;\n"
      "- bbox_2d is in absolute pixels with the origin at the top-left and\n"
      "  exclusive max edges;\n"
      "- child boxes stay inside their parent's box;\n"
      "- seg_prompt mentions color and shape words visible in the screenshot.\n";
  return kPrompt;
}

}  // namespace sprite
