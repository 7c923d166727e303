#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "sprite/naming.hpp"
#include "sprite/scaffold.hpp"
#include "sprite/validate.hpp"

namespace sprite {

/// Rooted forest over the scaffold elements plus a synthetic root standing
/// for the canvas. Sibling order encodes paint order: earlier nodes paint
/// first and sit behind later ones.
struct SceneGraph {
  struct Node {
    std::optional<UIElement> element;  // nullopt only for the synthetic root
    int parent = -1;
    std::vector<int> children;

    bool operator==(const Node&) const = default;
  };

  std::vector<Node> nodes;  // nodes[0] is the synthetic root
  int canvas_width = 0;
  int canvas_height = 0;
  std::vector<Diagnostic> diagnostics;

  static constexpr int kRoot = 0;

  BBox node_box(int index) const {
    const Node& node = nodes[index];
    return node.element ? node.element->bbox : BBox{0, 0, canvas_width, canvas_height};
  }

  const std::string& node_id(int index) const {
    static const std::string kRootId = "<canvas>";
    return nodes[index].element ? nodes[index].element->id : kRootId;
  }

  int depth(int index) const {
    int d = 0;
    while (nodes[index].parent != -1) {
      index = nodes[index].parent;
      ++d;
    }
    return d;
  }
};

/// Builds the scene graph from a flat scaffold. Elements with parent=null
/// attach to the synthetic root. Lenient mode promotes elements whose parent
/// id is missing to the root and records W_ORPHAN_PROMOTED on the graph;
/// strict mode rejects them. Cycles are rejected in both modes.
inline SceneGraph build_graph(const Scaffold& scaffold, ValidationMode mode) {
  SceneGraph graph;
  graph.canvas_width = scaffold.canvas_width;
  graph.canvas_height = scaffold.canvas_height;
  graph.nodes.push_back(SceneGraph::Node{});

  const int n = static_cast<int>(scaffold.elements.size());
  std::map<std::string, int> node_of_id;
  for (int i = 0; i < n; ++i) {
    const UIElement& e = scaffold.elements[i];
    SceneGraph::Node node;
    node.element = e;
    graph.nodes.push_back(std::move(node));
    auto [it, inserted] = node_of_id.emplace(e.id, i + 1);
    if (!inserted) {
      throw GraphError(codes::dup_id, "duplicate element id '" + e.id + "'");
    }
  }

  for (int i = 0; i < n; ++i) {
    const UIElement& e = scaffold.elements[i];
    int parent_node = SceneGraph::kRoot;
    if (e.parent) {
      if (*e.parent == e.id) {
        throw GraphError(codes::cycle, "element '" + e.id + "' is its own parent");
      }
      auto it = node_of_id.find(*e.parent);
      if (it == node_of_id.end()) {
        if (mode == ValidationMode::Strict) {
          throw GraphError(codes::dangling_parent,
                           "element '" + e.id + "' references missing parent '" + *e.parent + "'");
        }
        graph.diagnostics.push_back(make_warning(
            codes::orphan_promoted, e.id,
            "parent '" + *e.parent + "' does not exist; element promoted to root"));
      } else {
        parent_node = it->second;
      }
    }
    graph.nodes[i + 1].parent = parent_node;
    graph.nodes[parent_node].children.push_back(i + 1);
  }

  // Parent pointers over a finite node set can only miss the root via a cycle.
  std::vector<int> state(graph.nodes.size(), 0);
  state[SceneGraph::kRoot] = 2;
  for (std::size_t start = 1; start < graph.nodes.size(); ++start) {
    if (state[start] != 0) continue;
    std::vector<int> chain;
    int node = static_cast<int>(start);
    while (node != -1 && state[node] == 0) {
      state[node] = 1;
      chain.push_back(node);
      node = graph.nodes[node].parent;
    }
    if (node != -1 && state[node] == 1) {
      throw GraphError(codes::cycle,
                       "parent chain through '" + graph.node_id(node) + "' forms a cycle");
    }
    for (int visited : chain) state[visited] = 2;
  }
  return graph;
}

/// Deterministic paint order within every sibling list: larger boxes first
/// (backgrounds behind), then top-to-bottom, left-to-right, id as the final
/// tie break. Idempotent.
inline SceneGraph assign_z_order(SceneGraph graph) {
  for (SceneGraph::Node& node : graph.nodes) {
    std::stable_sort(node.children.begin(), node.children.end(), [&](int a, int b) {
      const BBox& ba = graph.nodes[a].element->bbox;
      const BBox& bb = graph.nodes[b].element->bbox;
      return std::make_tuple(-ba.area(), ba.y_min, ba.x_min, graph.nodes[a].element->id) <
             std::make_tuple(-bb.area(), bb.y_min, bb.x_min, graph.nodes[b].element->id);
    });
  }
  return graph;
}

inline SceneGraph z_normalized(const SceneGraph& graph) { return assign_z_order(graph); }

namespace detail {

struct IsoKey {
  std::string id;
  std::string label;

  bool operator<(const IsoKey& other) const {
    return std::tie(id, label) < std::tie(other.id, other.label);
  }
  bool operator==(const IsoKey& other) const { return id == other.id && label == other.label; }
};

inline IsoKey iso_key(const SceneGraph& graph, int index) {
  const UIElement& e = *graph.nodes[index].element;
  return IsoKey{strip_collision_suffix(sanitize_name(e.id)), projected_label_token(e.label)};
}

inline bool iso_nodes(const SceneGraph& a, int u, const SceneGraph& b, int v);

// Perfect matching between two same-key child groups (Kuhn's algorithm);
// groups are tiny so the recursive compatibility probe is fine.
inline bool iso_children(const SceneGraph& a, const std::vector<int>& ca, const SceneGraph& b,
                         const std::vector<int>& cb) {
  if (ca.size() != cb.size()) return false;
  const int n = static_cast<int>(ca.size());
  std::vector<std::vector<bool>> compatible(n, std::vector<bool>(n, false));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) compatible[i][j] = iso_nodes(a, ca[i], b, cb[j]);
  }
  std::vector<int> matched_to(n, -1);
  for (int i = 0; i < n; ++i) {
    std::vector<bool> visited(n, false);
    auto augment = [&](auto&& self, int u) -> bool {
      for (int j = 0; j < n; ++j) {
        if (!compatible[u][j] || visited[j]) continue;
        visited[j] = true;
        if (matched_to[j] == -1 || self(self, matched_to[j])) {
          matched_to[j] = u;
          return true;
        }
      }
      return false;
    };
    if (!augment(augment, i)) return false;
  }
  return true;
}

inline bool iso_nodes(const SceneGraph& a, int u, const SceneGraph& b, int v) {
  const bool root_a = !a.nodes[u].element.has_value();
  const bool root_b = !b.nodes[v].element.has_value();
  if (root_a != root_b) return false;
  if (!root_a && !(iso_key(a, u) == iso_key(b, v))) return false;

  std::map<IsoKey, std::vector<int>> groups_a, groups_b;
  for (int child : a.nodes[u].children) groups_a[iso_key(a, child)].push_back(child);
  for (int child : b.nodes[v].children) groups_b[iso_key(b, child)].push_back(child);
  if (groups_a.size() != groups_b.size()) return false;
  auto it_a = groups_a.begin();
  auto it_b = groups_b.begin();
  for (; it_a != groups_a.end(); ++it_a, ++it_b) {
    if (!(it_a->first == it_b->first)) return false;
    if (!iso_children(a, it_a->second, b, it_b->second)) return false;
  }
  return true;
}

}  // namespace detail

/// True iff a bijection of nodes preserves parent-child edges, element labels
/// (compared through the documented lossy tag projection) and ids (compared
/// after sanitization and stripping of synthesizer collision suffixes).
/// Box values and sibling order are ignored.
inline bool isomorphic(const SceneGraph& a, const SceneGraph& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  return detail::iso_nodes(a, SceneGraph::kRoot, b, SceneGraph::kRoot);
}

}  // namespace sprite
