#pragma once

#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sprite/naming.hpp"
#include "sprite/scene_graph.hpp"
#include "sprite/uss.hpp"
#include "sprite/xml.hpp"

namespace sprite {

/// Label -> UXML widget tag. Total: icons, images, grids and unknown tags
/// all become plain containers (their pixels arrive via background-image),
/// which is the lossy direction of the documented inverse table.
inline std::string element_tag(const ElementLabel& label) {
  switch (label.kind) {
    case ElementKind::Button: return "Button";
    case ElementKind::Toggle: return "Toggle";
    case ElementKind::ProgressBar: return "ProgressBar";
    case ElementKind::Slider: return "Slider";
    case ElementKind::Text: return "Label";
    case ElementKind::Panel:
    case ElementKind::Icon:
    case ElementKind::Image:
    case ElementKind::Grid:
    case ElementKind::Custom:
      return "VisualElement";
  }
  return "VisualElement";
}

struct RelativeRect {
  int left = 0;
  int top = 0;
  int width = 0;
  int height = 0;

  bool operator==(const RelativeRect&) const = default;
};

/// Child geometry in the parent's coordinate system. The calibrated phase
/// guarantees containment, so every field is non-negative.
inline RelativeRect to_parent_relative(const BBox& child, const BBox& parent) {
  if (!parent.contains(child)) {
    throw ContractError("child box " + to_string(child) + " escapes parent box " +
                        to_string(parent));
  }
  return RelativeRect{child.x_min - parent.x_min, child.y_min - parent.y_min, child.width(),
                      child.height()};
}

struct AffordanceRule {
  std::string pseudo_state;  // "hover" or "active"
  std::vector<std::pair<std::string, std::string>> style;

  bool operator==(const AffordanceRule&) const = default;
};

/// Interactive labels get fixed hover/active styling; everything else none.
inline std::vector<AffordanceRule> infer_affordances(const ElementLabel& label) {
  switch (label.kind) {
    case ElementKind::Button:
    case ElementKind::Toggle:
    case ElementKind::Slider:
      return {AffordanceRule{"hover", {{"opacity", "0.85"}}},
              AffordanceRule{"active", {{"opacity", "0.7"}}}};
    default:
      return {};
  }
}

struct AssetManifestEntry {
  std::string element_id;
  std::string asset_path;
  std::string class_name;

  bool operator==(const AssetManifestEntry&) const = default;
};

struct CompiledUI {
  std::string uxml_text;
  std::string uss_text;
  std::vector<AssetManifestEntry> asset_manifest;
};

inline std::string asset_manifest_json(const std::vector<AssetManifestEntry>& entries) {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const AssetManifestEntry& entry : entries) {
    nlohmann::ordered_json item;
    item["element_id"] = entry.element_id;
    item["asset_path"] = entry.asset_path;
    item["class_name"] = entry.class_name;
    out.push_back(std::move(item));
  }
  return out.dump(-1, ' ', true);
}

namespace detail {

inline std::string css_url(const std::string& path) {
  std::string out;
  for (char c : path) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace detail

/// Compiles a calibrated scaffold into a UXML document, a USS stylesheet and
/// an asset manifest. Nesting mirrors the scene graph; sibling order in the
/// document is paint order; geometry is absolute-positioned parent-relative
/// pixels. Output bytes are deterministic and locked by golden files.
inline CompiledUI compile(const Scaffold& scaffold, const std::string& document_name = "ui") {
  if (scaffold.phase != Phase::Calibrated) {
    throw ContractError("compile requires a calibrated scaffold; this one is in phase '" +
                        to_string(scaffold.phase) + "' - run calibrate first");
  }
  SceneGraph graph = assign_z_order(build_graph(scaffold, ValidationMode::Strict));

  // Document-unique names in depth-first paint order.
  NameAllocator names;
  std::map<int, std::string> name_of;
  {
    std::vector<int> stack{SceneGraph::kRoot};
    while (!stack.empty()) {
      const int node = stack.back();
      stack.pop_back();
      if (node != SceneGraph::kRoot) {
        name_of[node] = names.allocate(graph.nodes[node].element->id);
      }
      const auto& children = graph.nodes[node].children;
      for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
    }
  }

  CompiledUI out;

  std::ostringstream uxml;
  uxml << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  uxml << "<ui:UXML xmlns:ui=\"UnityEngine.UIElements\">\n";
  uxml << "  <ui:Style src=\"" << xml::escape_attribute(document_name) << ".uss\" />\n";

  std::ostringstream uss;
  uss << ":root {\n";
  uss << "  --canvas-width: " << scaffold.canvas_width << "px;\n";
  uss << "  --canvas-height: " << scaffold.canvas_height << "px;\n";
  uss << "}\n";

  auto emit = [&](auto&& self, int node, int depth) -> void {
    const UIElement& element = *graph.nodes[node].element;
    const std::string& name = name_of[node];
    const std::string class_name = "el-" + name;
    std::string class_attr = class_name;
    if (element.label.kind == ElementKind::Custom) {
      class_attr += " " + sanitize_name(element.label.raw);
    }

    const RelativeRect rect =
        to_parent_relative(element.bbox, graph.node_box(graph.nodes[node].parent));
    uss << "\n." << class_name << " {\n";
    uss << "  position: absolute;\n";
    uss << "  left: " << rect.left << "px;\n";
    uss << "  top: " << rect.top << "px;\n";
    uss << "  width: " << rect.width << "px;\n";
    uss << "  height: " << rect.height << "px;\n";
    if (element.asset_path) {
      uss << "  background-image: url(\"" << detail::css_url(*element.asset_path) << "\");\n";
    }
    uss << "}\n";
    for (const AffordanceRule& rule : infer_affordances(element.label)) {
      uss << "\n." << class_name << ":" << rule.pseudo_state << " {\n";
      for (const auto& [property, value] : rule.style) {
        uss << "  " << property << ": " << value << ";\n";
      }
      uss << "}\n";
    }

    if (element.asset_path) {
      out.asset_manifest.push_back(AssetManifestEntry{element.id, *element.asset_path, class_name});
    }

    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    uxml << indent << "<ui:" << element_tag(element.label) << " name=\""
         << xml::escape_attribute(name) << "\" class=\"" << xml::escape_attribute(class_attr)
         << "\"";
    if (graph.nodes[node].children.empty()) {
      uxml << " />\n";
    } else {
      uxml << ">\n";
      for (int child : graph.nodes[node].children) self(self, child, depth + 1);
      uxml << indent << "</ui:" << element_tag(element.label) << ">\n";
    }
  };
  for (int child : graph.nodes[SceneGraph::kRoot].children) emit(emit, child, 1);

  uxml << "</ui:UXML>\n";
  out.uxml_text = uxml.str();
  out.uss_text = uss.str();
  return out;
}

/// Rebuilds a scene graph from a UXML document: nesting becomes the tree,
/// document order becomes sibling order, tags map back through the inverse
/// table (containers re-enter as panels unless a fallback class marks them).
/// Unknown tags keep their node, re-entering as fallback labels with a
/// W_UNKNOWN_TAG diagnostic. Boxes are placeholders until a stylesheet is
/// resolved against the graph.
inline SceneGraph parse_uxml(const std::string& uxml_text) {
  const xml::Element root = xml::parse(uxml_text);
  if (root.local_name() != "UXML") {
    throw ParseError("root element must be UXML, got <" + root.tag + ">");
  }

  SceneGraph graph;
  graph.nodes.push_back(SceneGraph::Node{});
  int document_index = 0;

  auto convert = [&](auto&& self, const xml::Element& node, int parent_node) -> void {
    for (const xml::Element& child : node.children) {
      const std::string tag = child.local_name();
      if (tag == "Style" || tag == "Template") continue;  // resources, not scene nodes

      UIElement element;
      if (tag == "Button") {
        element.label = make_label(ElementKind::Button);
      } else if (tag == "Toggle") {
        element.label = make_label(ElementKind::Toggle);
      } else if (tag == "ProgressBar") {
        element.label = make_label(ElementKind::ProgressBar);
      } else if (tag == "Slider") {
        element.label = make_label(ElementKind::Slider);
      } else if (tag == "Label") {
        element.label = make_label(ElementKind::Text);
      } else if (tag == "VisualElement") {
        element.label = make_label(ElementKind::Panel);
        if (const std::string* classes = child.attribute("class")) {
          std::istringstream tokens(*classes);
          std::string token;
          while (tokens >> token) {
            if (token.rfind("el-", 0) != 0) {
              element.label = ElementLabel{ElementKind::Custom, token};
              break;
            }
          }
        }
      } else {
        element.label = ElementLabel{ElementKind::Custom, tag};
        graph.diagnostics.push_back(make_warning(
            codes::unknown_tag, std::nullopt,
            "tag <" + child.tag + "> is outside the widget mapping; kept as a fallback node"));
      }

      if (const std::string* name = child.attribute("name")) {
        element.id = *name;
      } else {
        std::string lowered;
        for (char c : tag) lowered.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        element.id = lowered + "_" + std::to_string(document_index);
      }
      ++document_index;
      element.bbox = BBox{0, 0, 1, 1};  // geometry lives in the stylesheet
      element.seg_prompt = element.id;
      element.parent = parent_node == SceneGraph::kRoot
                           ? std::optional<std::string>{}
                           : std::optional<std::string>{graph.node_id(parent_node)};

      SceneGraph::Node graph_node;
      graph_node.element = std::move(element);
      graph_node.parent = parent_node;
      graph.nodes.push_back(std::move(graph_node));
      const int this_node = static_cast<int>(graph.nodes.size()) - 1;
      graph.nodes[parent_node].children.push_back(this_node);
      self(self, child, this_node);
    }
  };
  convert(convert, root, SceneGraph::kRoot);
  return graph;
}

struct ResolvedGeometry {
  std::optional<int> canvas_width;
  std::optional<int> canvas_height;
  std::vector<int> resolved_nodes;   // graph node indices with absolute boxes
  std::vector<Diagnostic> diagnostics;
};

/// Resolves absolute boxes for a parsed UXML graph from its stylesheet,
/// accumulating left/top down the parent chain. Elements whose block lacks
/// absolute pixel geometry are reported with W_UNSUPPORTED_FEATURE and left
/// unresolved (as are their descendants, which have no anchor).
inline ResolvedGeometry resolve_absolute_geometry(SceneGraph& graph, const uss::Sheet& sheet) {
  ResolvedGeometry result;
  if (const uss::Block* root = sheet.block(":root")) {
    if (const std::string* w = root->property("--canvas-width")) {
      result.canvas_width = uss::pixel_value(*w);
    }
    if (const std::string* h = root->property("--canvas-height")) {
      result.canvas_height = uss::pixel_value(*h);
    }
  }
  if (result.canvas_width && result.canvas_height) {
    graph.canvas_width = *result.canvas_width;
    graph.canvas_height = *result.canvas_height;
  }

  auto walk = [&](auto&& self, int node, std::optional<std::pair<int, int>> origin) -> void {
    for (int child : graph.nodes[node].children) {
      UIElement& element = *graph.nodes[child].element;
      std::optional<std::pair<int, int>> child_origin;
      if (origin) {
        const uss::Block* block = sheet.block(".el-" + element.id);
        std::optional<int> left, top, width, height;
        if (block) {
          if (const std::string* v = block->property("left")) left = uss::pixel_value(*v);
          if (const std::string* v = block->property("top")) top = uss::pixel_value(*v);
          if (const std::string* v = block->property("width")) width = uss::pixel_value(*v);
          if (const std::string* v = block->property("height")) height = uss::pixel_value(*v);
        }
        if (left && top && width && height && *width > 0 && *height > 0) {
          const int x = origin->first + *left;
          const int y = origin->second + *top;
          element.bbox = BBox{x, y, x + *width, y + *height};
          child_origin = std::make_pair(x, y);
          result.resolved_nodes.push_back(child);
        } else {
          result.diagnostics.push_back(make_warning(
              codes::unsupported_feature, element.id,
              block ? "style block '.el-" + element.id +
                          "' lacks absolute pixel geometry; element skipped"
                    : "no style block '.el-" + element.id + "' found; element skipped"));
        }
      } else {
        result.diagnostics.push_back(make_warning(codes::unsupported_feature, element.id,
                                                  "ancestor geometry unresolved; element skipped"));
      }
      self(self, child, child_origin);
    }
  };
  walk(walk, SceneGraph::kRoot, std::make_pair(0, 0));
  return result;
}

}  // namespace sprite
