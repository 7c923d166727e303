#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sprite/raster.hpp"
#include "sprite/scaffold.hpp"

namespace sprite {

/// A programmatically rendered HUD screenshot with exact, unique colors per
/// element: one root panel carrying a progress bar and a nested sub-panel
/// with two buttons. The exact-color discipline is what makes the mock
/// detector and segmenter pixel-perfect oracles.
struct SyntheticHud {
  Image image;
  Scaffold ground_truth;  // exact geometry, as rendered
  Scaffold scaffolded;    // deterministically jittered stage-1 style output
  std::vector<std::pair<std::string, RGBA>> palette;
};

inline SyntheticHud render_synthetic_hud() {
  SyntheticHud hud;
  const int width = 320;
  const int height = 180;

  const RGBA slate{90, 94, 102, 255};  // scene background, not in the palette
  const RGBA navy{22, 33, 62, 255};
  const RGBA gold{241, 196, 15, 255};
  const RGBA steel{52, 73, 94, 255};
  const RGBA crimson{176, 58, 46, 255};
  const RGBA emerald{39, 174, 96, 255};

  struct Piece {
    const char* id;
    const char* label;
    const char* parent;  // nullptr for roots
    BBox box;
    BBox jittered;
    const char* prompt;
    RGBA color;
  };
  const Piece pieces[] = {
      {"root_panel", "panel", nullptr, {20, 12, 300, 168}, {23, 10, 297, 170},
       "navy hud background panel", navy},
      {"status_bar", "progress_bar", "root_panel", {40, 28, 280, 52}, {38, 30, 284, 50},
       "gold health progress bar", gold},
      {"settings_panel", "panel", "root_panel", {40, 96, 220, 156}, {44, 94, 224, 158},
       "steel settings sub panel", steel},
      {"attack_button", "button", "settings_panel", {56, 108, 128, 144}, {60, 111, 132, 147},
       "crimson attack button", crimson},
      {"confirm_button", "button", "settings_panel", {148, 108, 204, 144}, {144, 105, 200, 141},
       "emerald confirm button", emerald},
  };

  hud.image = Image::filled(width, height, slate);
  for (const Piece& piece : pieces) hud.image.fill_rect(piece.box, piece.color);

  auto build = [&](bool jittered) {
    Scaffold scaffold;
    scaffold.canvas_width = width;
    scaffold.canvas_height = height;
    scaffold.source_image = "synthetic_hud.png";
    scaffold.phase = Phase::Scaffolded;
    for (const Piece& piece : pieces) {
      UIElement element;
      element.id = piece.id;
      element.label = parse_label(piece.label);
      if (piece.parent) element.parent = piece.parent;
      element.bbox = jittered ? piece.jittered : piece.box;
      element.seg_prompt = piece.prompt;
      scaffold.elements.push_back(std::move(element));
    }
    return scaffold;
  };
  hud.ground_truth = build(false);
  hud.scaffolded = build(true);

  hud.palette = {{"crimson", crimson},
                 {"emerald", emerald},
                 {"gold", gold},
                 {"navy", navy},
                 {"steel", steel}};
  return hud;
}

/// The ground truth expressed in the design-export JSON subset, so the demo
/// can exercise `eval --kind design_json` end to end.
inline std::string synthetic_hud_design_json() {
  const SyntheticHud hud = render_synthetic_hud();
  nlohmann::ordered_json doc;
  doc["canvas_width"] = hud.ground_truth.canvas_width;
  doc["canvas_height"] = hud.ground_truth.canvas_height;
  doc["source_image"] = hud.ground_truth.source_image;

  // Rebuild the flat list as a nested node tree.
  auto node_for = [&](auto&& self, const UIElement& e) -> nlohmann::ordered_json {
    nlohmann::ordered_json node;
    node["id"] = e.id;
    node["name"] = e.seg_prompt;
    node["type"] = e.label.is_panel() ? "FRAME" : to_string(e.label);
    node["absoluteBoundingBox"] = {{"x", e.bbox.x_min},
                                   {"y", e.bbox.y_min},
                                   {"width", e.bbox.width()},
                                   {"height", e.bbox.height()}};
    node["children"] = nlohmann::ordered_json::array();
    for (const UIElement& child : hud.ground_truth.elements) {
      if (child.parent && *child.parent == e.id) {
        node["children"].push_back(self(self, child));
      }
    }
    return node;
  };
  nlohmann::ordered_json document;
  document["name"] = "synthetic_hud";
  document["type"] = "CANVAS";
  document["children"] = nlohmann::ordered_json::array();
  for (const UIElement& e : hud.ground_truth.elements) {
    if (!e.parent) document["children"].push_back(node_for(node_for, e));
  }
  doc["document"] = std::move(document);
  return doc.dump(2) + "\n";
}

}  // namespace sprite
