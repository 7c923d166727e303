#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "sprite/scaffold.hpp"

namespace sprite {

enum class ValidationMode { Strict, Lenient };

namespace detail {

// Severity for the checks that lenient mode defers to calibration.
inline Severity repairable(ValidationMode mode) {
  return mode == ValidationMode::Strict ? Severity::Error : Severity::Warning;
}

}  // namespace detail

/// Structural and geometric consistency checks. Returns every diagnostic
/// found; an empty list means the scaffold is valid in the given mode.
/// Strict mode treats repairable geometry (out-of-canvas boxes, containment
/// escapes, dangling parents, leaf children, phase field gaps) as errors;
/// lenient mode downgrades them to warnings because calibration repairs them.
inline std::vector<Diagnostic> validate(const Scaffold& scaffold, ValidationMode mode) {
  std::vector<Diagnostic> out;
  const BBox canvas = scaffold.canvas_box();

  // Id table: first occurrence wins for parent resolution.
  std::map<std::string, int> first_with_id;
  for (int i = 0; i < static_cast<int>(scaffold.elements.size()); ++i) {
    const UIElement& e = scaffold.elements[i];
    if (e.id.empty()) {
      out.push_back(make_error(codes::missing_field, std::nullopt,
                               "element " + std::to_string(i) + " has an empty id"));
      continue;
    }
    auto [it, inserted] = first_with_id.emplace(e.id, i);
    if (!inserted) {
      out.push_back(make_error(codes::dup_id, e.id,
                               "id '" + e.id + "' already used by element " +
                                   std::to_string(it->second)));
    }
  }

  for (const UIElement& e : scaffold.elements) {
    const BBox& b = e.bbox;
    if (!b.positive()) {
      out.push_back(make_error(codes::bbox_inverted, e.id,
                               "bbox " + to_string(b) + " has non-positive extent"));
    } else if (!canvas.contains(b)) {
      out.push_back(Diagnostic{codes::bbox_oob, e.id,
                               "bbox " + to_string(b) + " escapes the " +
                                   std::to_string(scaffold.canvas_width) + "x" +
                                   std::to_string(scaffold.canvas_height) + " canvas",
                               detail::repairable(mode)});
    }
    if (e.seg_prompt.empty() && scaffold.phase == Phase::Scaffolded) {
      out.push_back(Diagnostic{codes::missing_field, e.id,
                               "seg_prompt must be nonempty in the scaffolded phase",
                               detail::repairable(mode)});
    }
    if (!e.label.is_panel() && !e.asset_path &&
        (scaffold.phase == Phase::Grounded || scaffold.phase == Phase::Calibrated)) {
      out.push_back(Diagnostic{codes::missing_field, e.id,
                               "asset_path required for non-panel elements in the " +
                                   to_string(scaffold.phase) + " phase",
                               detail::repairable(mode)});
    }
  }

  // Parent references: dangling refs, then cycles over resolvable edges.
  const int n = static_cast<int>(scaffold.elements.size());
  std::vector<int> parent_index(n, -1);
  for (int i = 0; i < n; ++i) {
    const UIElement& e = scaffold.elements[i];
    if (!e.parent) continue;
    if (*e.parent == e.id) {
      parent_index[i] = i;  // reported by the cycle pass
      continue;
    }
    auto it = first_with_id.find(*e.parent);
    if (it == first_with_id.end()) {
      out.push_back(Diagnostic{codes::dangling_parent, e.id,
                               "parent '" + *e.parent + "' does not name any element",
                               detail::repairable(mode)});
    } else {
      parent_index[i] = it->second;
    }
  }

  std::vector<bool> in_cycle(n, false);
  {
    // 0 = unvisited, 1 = on current chain, 2 = done.
    std::vector<int> state(n, 0);
    for (int start = 0; start < n; ++start) {
      if (state[start] != 0) continue;
      std::vector<int> chain;
      int node = start;
      while (node != -1 && state[node] == 0) {
        state[node] = 1;
        chain.push_back(node);
        node = parent_index[node];
      }
      if (node != -1 && state[node] == 1) {
        // Found a new cycle; report it once, anchored at its first member.
        std::string members;
        for (std::size_t k = 0; k < chain.size(); ++k) {
          if (chain[k] == node) {
            for (std::size_t m = k; m < chain.size(); ++m) {
              in_cycle[chain[m]] = true;
              if (!members.empty()) members += " -> ";
              members += scaffold.elements[chain[m]].id;
            }
            break;
          }
        }
        out.push_back(make_error(codes::cycle, scaffold.elements[node].id,
                                 "parent chain forms a cycle: " + members));
      }
      for (int visited : chain) state[visited] = 2;
    }
  }

  // Containment and leaf-children checks over resolvable, acyclic edges.
  std::vector<int> child_count(n, 0);
  for (int i = 0; i < n; ++i) {
    if (parent_index[i] < 0 || in_cycle[i]) continue;
    const UIElement& child = scaffold.elements[i];
    const UIElement& parent = scaffold.elements[parent_index[i]];
    ++child_count[parent_index[i]];
    if (child.bbox.positive() && parent.bbox.positive() && !parent.bbox.contains(child.bbox)) {
      out.push_back(Diagnostic{codes::bbox_containment, child.id,
                               "bbox " + to_string(child.bbox) + " escapes parent '" + parent.id +
                                   "' " + to_string(parent.bbox),
                               detail::repairable(mode)});
    }
  }
  for (int i = 0; i < n; ++i) {
    if (child_count[i] == 0 || in_cycle[i]) continue;
    const UIElement& e = scaffold.elements[i];
    if (!e.label.is_panel()) {
      out.push_back(Diagnostic{codes::child_of_leaf, e.id,
                               "'" + e.id + "' (" + to_string(e.label) +
                                   ") is not a panel but has " + std::to_string(child_count[i]) +
                                   " children",
                               detail::repairable(mode)});
    }
  }
  return out;
}

}  // namespace sprite
