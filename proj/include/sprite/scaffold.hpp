#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sprite/geometry.hpp"

namespace sprite {

// Closed widget tag set. Anything else is carried verbatim as a fallback tag.
enum class ElementKind {
  Panel,
  Button,
  Toggle,
  ProgressBar,
  Slider,
  Text,
  Icon,
  Image,
  Grid,
  Custom,
};

struct ElementLabel {
  ElementKind kind = ElementKind::Panel;
  std::string raw;  // verbatim tag for Custom; empty otherwise

  bool operator==(const ElementLabel&) const = default;

  bool is_panel() const { return kind == ElementKind::Panel; }
};

inline ElementLabel make_label(ElementKind kind) { return ElementLabel{kind, {}}; }

inline ElementLabel parse_label(const std::string& tag) {
  if (tag == "panel") return make_label(ElementKind::Panel);
  if (tag == "button") return make_label(ElementKind::Button);
  if (tag == "toggle") return make_label(ElementKind::Toggle);
  if (tag == "progress_bar") return make_label(ElementKind::ProgressBar);
  if (tag == "slider") return make_label(ElementKind::Slider);
  if (tag == "text") return make_label(ElementKind::Text);
  if (tag == "icon") return make_label(ElementKind::Icon);
  if (tag == "image") return make_label(ElementKind::Image);
  if (tag == "grid") return make_label(ElementKind::Grid);
  return ElementLabel{ElementKind::Custom, tag};
}

inline std::string to_string(const ElementLabel& label) {
  switch (label.kind) {
    case ElementKind::Panel: return "panel";
    case ElementKind::Button: return "button";
    case ElementKind::Toggle: return "toggle";
    case ElementKind::ProgressBar: return "progress_bar";
    case ElementKind::Slider: return "slider";
    case ElementKind::Text: return "text";
    case ElementKind::Icon: return "icon";
    case ElementKind::Image: return "image";
    case ElementKind::Grid: return "grid";
    case ElementKind::Custom: return label.raw;
  }
  return label.raw;
}

enum class Phase { Scaffolded, Grounded, Calibrated };

inline std::string to_string(Phase phase) {
  switch (phase) {
    case Phase::Scaffolded: return "scaffolded";
    case Phase::Grounded: return "grounded";
    case Phase::Calibrated: return "calibrated";
  }
  return "scaffolded";
}

inline std::optional<Phase> parse_phase(const std::string& text) {
  if (text == "scaffolded") return Phase::Scaffolded;
  if (text == "grounded") return Phase::Grounded;
  if (text == "calibrated") return Phase::Calibrated;
  return std::nullopt;
}

// Unknown document keys are preserved as an opaque tree so that one
// parse -> serialize cycle keeps their values byte-for-byte.
struct ExtraValue {
  enum class Kind { Null, Scalar, Sequence, Mapping };

  Kind kind = Kind::Null;
  std::string scalar;
  std::vector<ExtraValue> items;
  std::vector<std::pair<std::string, ExtraValue>> entries;

  bool operator==(const ExtraValue&) const = default;

  static ExtraValue null() { return ExtraValue{}; }
  static ExtraValue of(std::string text) {
    ExtraValue v;
    v.kind = Kind::Scalar;
    v.scalar = std::move(text);
    return v;
  }
};

using ExtraMap = std::vector<std::pair<std::string, ExtraValue>>;

struct UIElement {
  std::string id;
  ElementLabel label;
  std::optional<std::string> parent;  // absent/null for root panels
  BBox bbox;
  std::string seg_prompt;
  std::optional<std::string> asset_path;
  ExtraMap extras;

  bool operator==(const UIElement&) const = default;
};

/// The YAML intermediate representation: a flat, ordered element list with
/// parent references plus canvas metadata and the pipeline phase.
struct Scaffold {
  int canvas_width = 0;
  int canvas_height = 0;
  std::string source_image;
  Phase phase = Phase::Scaffolded;
  std::vector<UIElement> elements;
  ExtraMap extras;

  bool operator==(const Scaffold&) const = default;

  BBox canvas_box() const { return BBox{0, 0, canvas_width, canvas_height}; }

  const UIElement* find(const std::string& id) const {
    for (const UIElement& e : elements) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }
};

}  // namespace sprite
