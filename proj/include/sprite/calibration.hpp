#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "sprite/geometry.hpp"
#include "sprite/scene_graph.hpp"

namespace sprite {

struct CalibrationParams {
  double containment_tolerance_frac = 0.02;  // of the parent dimension, per edge
  double fusion_iou_threshold = 0.5;
  double reassign_overlap_frac = 0.8;
  int min_box_px = 1;

  bool operator==(const CalibrationParams&) const = default;
};

struct FuseResult {
  BBox box;
  bool detection_accepted = false;
};

/// Arbitration between the scaffold's coarse box and a detector box: the
/// detector wins when both agree (IoU at or above the threshold), otherwise
/// the scaffold box stands and the caller records W_FUSION_REJECTED.
inline FuseResult fuse_boxes(const BBox& scaffold_box, const std::optional<BBox>& detected,
                             const CalibrationParams& params = {}) {
  if (!detected) return FuseResult{scaffold_box, false};
  if (iou(scaffold_box, *detected) >= params.fusion_iou_threshold) {
    return FuseResult{*detected, true};
  }
  return FuseResult{scaffold_box, false};
}

namespace detail {

// Intersection of child and parent; a collapsed dimension becomes a
// min_box_px sliver inside the parent on the side the child escaped to.
inline BBox clip_into(const BBox& child, const BBox& parent, int min_box_px) {
  BBox out = intersect(child, parent);
  const auto fix = [&](int& lo, int& hi, int plo, int phi, int clo) {
    if (lo < hi) return;
    const int extent = std::min(std::max(min_box_px, 1), phi - plo);
    if (clo < plo) {
      lo = plo;
      hi = plo + extent;
    } else {
      hi = phi;
      lo = phi - extent;
    }
  };
  fix(out.x_min, out.x_max, parent.x_min, parent.x_max, child.x_min);
  fix(out.y_min, out.y_max, parent.y_min, parent.y_max, child.y_min);
  return out;
}

inline std::vector<int> preorder(const SceneGraph& graph) {
  std::vector<int> order;
  order.reserve(graph.nodes.size());
  std::vector<int> stack{SceneGraph::kRoot};
  while (!stack.empty()) {
    const int node = stack.back();
    stack.pop_back();
    order.push_back(node);
    const auto& children = graph.nodes[node].children;
    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

inline bool inside_subtree(const SceneGraph& graph, int node, int subtree_root) {
  while (node != -1) {
    if (node == subtree_root) return true;
    node = graph.nodes[node].parent;
  }
  return false;
}

}  // namespace detail

/// Repairs every child box that escapes its parent. Escapes within the
/// per-edge tolerance are clipped into the parent; larger escapes move the
/// child under the smallest element that still covers reassign_overlap_frac
/// of its area (the synthetic root always qualifies) and record
/// W_REPARENTED. Runs to a fixpoint so cascaded clips settle; the post-state
/// always has every child box inside its parent box. Idempotent.
inline SceneGraph enforce_containment(SceneGraph graph, const CalibrationParams& params = {},
                                      std::vector<Diagnostic>* diagnostics = nullptr) {
  const auto note = [&](Diagnostic d) {
    graph.diagnostics.push_back(d);
    if (diagnostics) diagnostics->push_back(std::move(d));
  };

  const int max_passes = static_cast<int>(graph.nodes.size()) * 4 + 8;
  bool changed = true;
  for (int pass = 0; pass < max_passes && changed; ++pass) {
    changed = false;
    for (int node : detail::preorder(graph)) {
      if (node == SceneGraph::kRoot) continue;
      UIElement& element = *graph.nodes[node].element;
      const BBox parent_box = graph.node_box(graph.nodes[node].parent);
      const BBox child_box = element.bbox;
      if (parent_box.contains(child_box)) continue;

      const double escapes[4] = {
          static_cast<double>(std::max(0, parent_box.x_min - child_box.x_min)),
          static_cast<double>(std::max(0, child_box.x_max - parent_box.x_max)),
          static_cast<double>(std::max(0, parent_box.y_min - child_box.y_min)),
          static_cast<double>(std::max(0, child_box.y_max - parent_box.y_max))};
      const double tol_x = params.containment_tolerance_frac * parent_box.width() + 1e-12;
      const double tol_y = params.containment_tolerance_frac * parent_box.height() + 1e-12;
      const bool within_tolerance = escapes[0] <= tol_x && escapes[1] <= tol_x &&
                                    escapes[2] <= tol_y && escapes[3] <= tol_y;

      if (!within_tolerance) {
        // (area, root-last, id) picks the tightest deterministic container.
        const double needed =
            params.reassign_overlap_frac * static_cast<double>(child_box.area()) - 1e-9;
        int best = -1;
        std::tuple<std::int64_t, int, std::string> best_key;
        for (int candidate = 0; candidate < static_cast<int>(graph.nodes.size()); ++candidate) {
          if (candidate == node || detail::inside_subtree(graph, candidate, node)) continue;
          const BBox cbox = graph.node_box(candidate);
          if (static_cast<double>(intersection_area(child_box, cbox)) < needed) continue;
          std::tuple<std::int64_t, int, std::string> key{
              cbox.area(), candidate == SceneGraph::kRoot ? 1 : 0, graph.node_id(candidate)};
          if (best == -1 || key < best_key) {
            best = candidate;
            best_key = key;
          }
        }
        if (best != -1 && best != graph.nodes[node].parent) {
          auto& siblings = graph.nodes[graph.nodes[node].parent].children;
          siblings.erase(std::remove(siblings.begin(), siblings.end(), node), siblings.end());
          graph.nodes[best].children.push_back(node);
          graph.nodes[node].parent = best;
          element.parent = best == SceneGraph::kRoot
                               ? std::optional<std::string>{}
                               : std::optional<std::string>{graph.node_id(best)};
          note(make_warning(codes::reparented, element.id,
                            "box " + to_string(child_box) + " escapes its parent; reassigned to '" +
                                graph.node_id(best) + "'"));
          changed = true;
        }
      }

      const BBox final_parent = graph.node_box(graph.nodes[node].parent);
      if (!final_parent.contains(element.bbox)) {
        element.bbox = detail::clip_into(element.bbox, final_parent, params.min_box_px);
        changed = true;
      }
    }
  }
  return graph;
}

struct CalibrateResult {
  Scaffold scaffold;
  std::vector<Diagnostic> diagnostics;
};

/// Stage 2 geometry: clamp every box to the canvas, arbitrate against the
/// per-element detections, rebuild the graph leniently (orphans promoted),
/// enforce parent containment and assign paint order. The output scaffold is
/// in calibrated phase with elements listed in depth-first paint order.
/// Running it again with no detections reproduces the same bytes.
inline CalibrateResult calibrate(const Scaffold& input,
                                 const std::map<std::string, std::optional<BBox>>& detections,
                                 const CalibrationParams& params = {}) {
  // Cycles and duplicate ids surface as GraphError from build_graph below;
  // geometry that cannot be repaired is rejected up front.
  for (const UIElement& e : input.elements) {
    if (e.id.empty()) throw ContractError("calibrate requires nonempty element ids");
    if (!e.bbox.positive()) {
      throw ContractError("calibrate cannot repair inverted box " + to_string(e.bbox) + " on '" +
                          e.id + "'");
    }
  }

  CalibrateResult result;
  Scaffold working = input;

  for (UIElement& element : working.elements) {
    const Clamped clamped =
        clamp_box(element.bbox, working.canvas_width, working.canvas_height, params.min_box_px);
    if (clamped.collapsed) {
      result.diagnostics.push_back(make_warning(
          codes::box_collapsed, element.id,
          "box " + to_string(element.bbox) + " collapsed against the canvas and was re-expanded"));
    }
    element.bbox = clamped.box;

    auto it = detections.find(element.id);
    if (it == detections.end() || !it->second) continue;
    std::optional<BBox> detected = it->second;
    if (!detected->positive()) {
      result.diagnostics.push_back(make_warning(codes::fusion_rejected, element.id,
                                                "detection box " + to_string(*detected) +
                                                    " is degenerate; keeping the scaffold box"));
      continue;
    }
    // Detector boxes are clipped (not expanded) before arbitration.
    if (detected->x_max <= 0 || detected->y_max <= 0 || detected->x_min >= working.canvas_width ||
        detected->y_min >= working.canvas_height) {
      result.diagnostics.push_back(make_warning(codes::fusion_rejected, element.id,
                                                "detection box " + to_string(*detected) +
                                                    " lies outside the canvas; keeping the "
                                                    "scaffold box"));
      continue;
    }
    detected = BBox{std::clamp(detected->x_min, 0, working.canvas_width),
                    std::clamp(detected->y_min, 0, working.canvas_height),
                    std::clamp(detected->x_max, 0, working.canvas_width),
                    std::clamp(detected->y_max, 0, working.canvas_height)};
    const FuseResult fused = fuse_boxes(element.bbox, detected, params);
    if (fused.detection_accepted) {
      element.bbox = fused.box;
    } else {
      result.diagnostics.push_back(make_warning(
          codes::fusion_rejected, element.id,
          "detection " + to_string(*detected) + " disagrees with the scaffold box " +
              to_string(element.bbox) + "; keeping the scaffold box"));
    }
  }

  SceneGraph graph = build_graph(working, ValidationMode::Lenient);
  for (const Diagnostic& d : graph.diagnostics) result.diagnostics.push_back(d);
  // Promoted orphans keep their dangling parent id in the element record;
  // resync every element with the structure the graph actually built.
  for (std::size_t node = 1; node < graph.nodes.size(); ++node) {
    UIElement& element = *graph.nodes[node].element;
    const int parent = graph.nodes[node].parent;
    element.parent = parent == SceneGraph::kRoot ? std::optional<std::string>{}
                                                 : std::optional<std::string>{graph.node_id(parent)};
  }
  graph = enforce_containment(std::move(graph), params, &result.diagnostics);
  graph = assign_z_order(std::move(graph));

  Scaffold output;
  output.canvas_width = working.canvas_width;
  output.canvas_height = working.canvas_height;
  output.source_image = working.source_image;
  output.phase = Phase::Calibrated;
  output.extras = working.extras;
  for (int node : detail::preorder(graph)) {
    if (node == SceneGraph::kRoot) continue;
    output.elements.push_back(*graph.nodes[node].element);
  }
  result.scaffold = std::move(output);
  return result;
}

}  // namespace sprite
