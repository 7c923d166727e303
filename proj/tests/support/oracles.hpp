#pragma once

// Independent oracles for property and acceptance tests. Everything here is
// deliberately brute force and shares no code with the implementation paths
// it checks.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "sprite/geometry.hpp"
#include "sprite/scaffold.hpp"
#include "sprite/scene_graph.hpp"

namespace oracles {

// Pixel-by-pixel IoU counting on a full canvas sweep. Quadratic in canvas
// size; use small canvases.
struct PixelCounts {
  long long intersection = 0;
  long long union_ = 0;
};

inline PixelCounts count_pixels(const sprite::BBox& a, const sprite::BBox& b, int canvas_w,
                                int canvas_h) {
  PixelCounts counts;
  for (int y = 0; y < canvas_h; ++y) {
    for (int x = 0; x < canvas_w; ++x) {
      const bool in_a =
          x >= a.x_min && x < a.x_max && y >= a.y_min && y < a.y_max;
      const bool in_b =
          x >= b.x_min && x < b.x_max && y >= b.y_min && y < b.y_max;
      if (in_a && in_b) ++counts.intersection;
      if (in_a || in_b) ++counts.union_;
    }
  }
  return counts;
}

// Cycle detection on raw parent links by repeated pointer chasing: an
// element is on a cycle iff walking parents for n steps never reaches a
// root or a dangling reference.
inline bool has_parent_cycle(const sprite::Scaffold& scaffold) {
  std::map<std::string, const sprite::UIElement*> by_id;
  for (const sprite::UIElement& e : scaffold.elements) {
    if (by_id.find(e.id) == by_id.end()) by_id[e.id] = &e;
  }
  const int n = static_cast<int>(scaffold.elements.size());
  for (const sprite::UIElement& e : scaffold.elements) {
    const sprite::UIElement* cursor = &e;
    int steps = 0;
    while (cursor->parent && steps <= n) {
      auto it = by_id.find(*cursor->parent);
      if (it == by_id.end()) break;
      if (it->second == &e) return true;  // closed the loop
      cursor = it->second;
      ++steps;
    }
    if (steps > n) return true;
  }
  return false;
}

// Exhaustive bijection search for scene-graph isomorphism. Tries every
// permutation of non-root nodes; only usable for tiny graphs.
inline bool exhaustive_isomorphic(const sprite::SceneGraph& a, const sprite::SceneGraph& b) {
  if (a.nodes.size() != b.nodes.size()) return false;
  const int n = static_cast<int>(a.nodes.size());

  auto key = [](const sprite::SceneGraph& g, int node) {
    const sprite::UIElement& e = *g.nodes[node].element;
    return std::make_pair(sprite::strip_collision_suffix(sprite::sanitize_name(e.id)),
                          sprite::projected_label_token(e.label));
  };

  std::vector<int> mapping(n);  // a-node -> b-node; index 0 pinned root->root
  std::iota(mapping.begin(), mapping.end(), 0);
  do {
    bool ok = true;
    for (int u = 1; u < n && ok; ++u) {
      if (!(key(a, u) == key(b, mapping[u]))) ok = false;
    }
    for (int u = 1; u < n && ok; ++u) {
      const int pa = a.nodes[u].parent;
      const int pb = b.nodes[mapping[u]].parent;
      if (mapping[pa] != pb) ok = false;
    }
    if (ok) return true;
  } while (std::next_permutation(mapping.begin() + 1, mapping.end()));
  return false;
}

// Brute-force maximum-total-IoU matching over admissible pairs by trying
// every injective assignment (n <= ~7).
struct BruteForceInstance {
  // weight[i][j] < 0 means inadmissible.
  std::vector<std::vector<double>> weight;
};

inline double brute_force_best_total(const BruteForceInstance& instance) {
  const int np = static_cast<int>(instance.weight.size());
  const int nt = np == 0 ? 0 : static_cast<int>(instance.weight[0].size());
  double best = 0.0;
  std::vector<int> chosen(np, -1);
  std::vector<bool> used(nt, false);
  auto recurse = [&](auto&& self, int i, double total) -> void {
    if (i == np) {
      best = std::max(best, total);
      return;
    }
    self(self, i + 1, total);  // leave pred i unmatched
    for (int j = 0; j < nt; ++j) {
      if (used[j] || instance.weight[i][j] < 0.0) continue;
      used[j] = true;
      self(self, i + 1, total + instance.weight[i][j]);
      used[j] = false;
    }
  };
  recurse(recurse, 0, 0.0);
  return best;
}

}  // namespace oracles
