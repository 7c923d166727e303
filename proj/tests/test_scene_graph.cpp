#include "sprite/scene_graph.hpp"

#include <catch_amalgamated.hpp>

#include "support/builders.hpp"
#include "support/oracles.hpp"

using sprite::SceneGraph;
using sprite::ValidationMode;

namespace {

sprite::Scaffold panel_with_two_children() {
  sprite::Scaffold s;
  s.canvas_width = 200;
  s.canvas_height = 200;
  s.elements.push_back(builders::element("panel", "panel", std::nullopt, {10, 10, 190, 190}));
  s.elements.push_back(builders::element("a", "button", "panel", {20, 20, 60, 40}));
  s.elements.push_back(builders::element("b", "button", "panel", {20, 60, 60, 80}));
  return s;
}

}  // namespace

TEST_CASE("build_graph nests a panel with two children under the root") {
  const SceneGraph g = sprite::build_graph(panel_with_two_children(), ValidationMode::Strict);
  REQUIRE(g.nodes.size() == 4);
  REQUIRE(g.nodes[SceneGraph::kRoot].children.size() == 1);
  const int panel = g.nodes[SceneGraph::kRoot].children[0];
  CHECK(g.node_id(panel) == "panel");
  CHECK(g.nodes[panel].children.size() == 2);
}

TEST_CASE("node count is element count plus one in both modes") {
  for (int variant = 0; variant < 6; ++variant) {
    const sprite::Scaffold s = builders::clean_scaffold(variant);
    CHECK(sprite::build_graph(s, ValidationMode::Strict).nodes.size() == s.elements.size() + 1);
    CHECK(sprite::build_graph(s, ValidationMode::Lenient).nodes.size() == s.elements.size() + 1);
  }
}

TEST_CASE("depth of every node is its parent's depth plus one") {
  const SceneGraph g =
      sprite::build_graph(builders::clean_scaffold(2), ValidationMode::Strict);
  for (std::size_t i = 1; i < g.nodes.size(); ++i) {
    CHECK(g.depth(static_cast<int>(i)) == g.depth(g.nodes[i].parent) + 1);
  }
}

TEST_CASE("lenient mode promotes orphans to the root with a warning") {
  sprite::Scaffold s = panel_with_two_children();
  s.elements[2].parent = "ghost";
  const SceneGraph g = sprite::build_graph(s, ValidationMode::Lenient);
  REQUIRE(g.nodes[SceneGraph::kRoot].children.size() == 2);
  REQUIRE(g.diagnostics.size() == 1);
  CHECK(g.diagnostics[0].code == sprite::codes::orphan_promoted);
  CHECK(g.diagnostics[0].element_id == "b");

  CHECK_THROWS_AS(sprite::build_graph(s, ValidationMode::Strict), sprite::GraphError);
}

TEST_CASE("a three-element cycle raises GraphError in both modes") {
  sprite::Scaffold s;
  s.canvas_width = 100;
  s.canvas_height = 100;
  s.elements.push_back(builders::element("a", "panel", "c", {1, 1, 99, 99}));
  s.elements.push_back(builders::element("b", "panel", "a", {1, 1, 99, 99}));
  s.elements.push_back(builders::element("c", "panel", "b", {1, 1, 99, 99}));
  REQUIRE(oracles::has_parent_cycle(s));
  for (ValidationMode mode : {ValidationMode::Strict, ValidationMode::Lenient}) {
    try {
      sprite::build_graph(s, mode);
      FAIL("expected GraphError");
    } catch (const sprite::GraphError& e) {
      CHECK(e.code == sprite::codes::cycle);
    }
  }
}

TEST_CASE("z-order sorts larger siblings first, then top-left, then id") {
  sprite::Scaffold s;
  s.canvas_width = 300;
  s.canvas_height = 300;
  s.elements.push_back(builders::element("small", "button", std::nullopt, {0, 0, 10, 10}));
  s.elements.push_back(builders::element("large", "panel", std::nullopt, {50, 50, 70, 70}));
  s.elements.push_back(builders::element("low", "icon", std::nullopt, {100, 30, 110, 40}));
  s.elements.push_back(builders::element("high", "icon", std::nullopt, {100, 10, 110, 20}));

  SceneGraph g = sprite::assign_z_order(sprite::build_graph(s, ValidationMode::Strict));
  const auto& order = g.nodes[SceneGraph::kRoot].children;
  REQUIRE(order.size() == 4);
  CHECK(g.node_id(order[0]) == "large");  // area 400 paints first
  CHECK(g.node_id(order[1]) == "small");  // area 100, y 0
  CHECK(g.node_id(order[2]) == "high");   // area 100, y 10
  CHECK(g.node_id(order[3]) == "low");    // area 100, y 30
}

TEST_CASE("equal-area ties break by y then x then id") {
  sprite::Scaffold s;
  s.canvas_width = 300;
  s.canvas_height = 300;
  s.elements.push_back(builders::element("right", "icon", std::nullopt, {40, 10, 60, 30}));
  s.elements.push_back(builders::element("left", "icon", std::nullopt, {10, 10, 30, 30}));
  s.elements.push_back(builders::element("zeta", "icon", std::nullopt, {10, 40, 30, 60}));
  s.elements.push_back(builders::element("alpha", "icon", std::nullopt, {10, 40, 30, 60}));

  SceneGraph g = sprite::assign_z_order(sprite::build_graph(s, ValidationMode::Strict));
  const auto& order = g.nodes[SceneGraph::kRoot].children;
  CHECK(g.node_id(order[0]) == "left");
  CHECK(g.node_id(order[1]) == "right");
  CHECK(g.node_id(order[2]) == "alpha");
  CHECK(g.node_id(order[3]) == "zeta");
}

TEST_CASE("assign_z_order is idempotent") {
  const SceneGraph g = sprite::build_graph(builders::clean_scaffold(0), ValidationMode::Strict);
  const SceneGraph once = sprite::assign_z_order(g);
  const SceneGraph twice = sprite::assign_z_order(once);
  for (std::size_t i = 0; i < once.nodes.size(); ++i) {
    CHECK(once.nodes[i].children == twice.nodes[i].children);
  }
}

TEST_CASE("z-order imposes a strict total order on every sibling list") {
  std::mt19937 rng(5150);
  for (int trial = 0; trial < 50; ++trial) {
    const sprite::Scaffold s = builders::random_scaffold(rng, 20);
    sprite::SceneGraph g;
    try {
      g = sprite::assign_z_order(sprite::build_graph(s, ValidationMode::Lenient));
    } catch (const sprite::GraphError&) {
      continue;
    }
    for (const auto& node : g.nodes) {
      for (std::size_t k = 1; k < node.children.size(); ++k) {
        const auto& a = *g.nodes[node.children[k - 1]].element;
        const auto& b = *g.nodes[node.children[k]].element;
        const auto key_a = std::make_tuple(-a.bbox.area(), a.bbox.y_min, a.bbox.x_min, a.id);
        const auto key_b = std::make_tuple(-b.bbox.area(), b.bbox.y_min, b.bbox.x_min, b.id);
        REQUIRE(key_a < key_b);  // strict: unique ids break every tie
      }
    }
  }
}

TEST_CASE("isomorphic: identity, extra leaf, and reversed sibling order") {
  const sprite::Scaffold s = panel_with_two_children();
  const SceneGraph g = sprite::z_normalized(sprite::build_graph(s, ValidationMode::Strict));
  CHECK(sprite::isomorphic(g, g));

  sprite::Scaffold bigger = s;
  bigger.elements.push_back(builders::element("c", "icon", "panel", {20, 100, 40, 120}));
  const SceneGraph g2 = sprite::z_normalized(sprite::build_graph(bigger, ValidationMode::Strict));
  CHECK_FALSE(sprite::isomorphic(g, g2));

  sprite::Scaffold reversed = s;
  std::swap(reversed.elements[1], reversed.elements[2]);
  const SceneGraph g3 =
      sprite::z_normalized(sprite::build_graph(reversed, ValidationMode::Strict));
  CHECK(sprite::isomorphic(g, g3));
  CHECK(oracles::exhaustive_isomorphic(g, g3));
}

TEST_CASE("isomorphic ignores boxes but not labels or ids") {
  sprite::Scaffold a = panel_with_two_children();
  sprite::Scaffold b = panel_with_two_children();
  b.elements[1].bbox = {30, 30, 90, 50};
  const SceneGraph ga = sprite::build_graph(a, ValidationMode::Strict);
  const SceneGraph gb = sprite::build_graph(b, ValidationMode::Strict);
  CHECK(sprite::isomorphic(ga, gb));

  sprite::Scaffold c = panel_with_two_children();
  c.elements[1].label = sprite::parse_label("toggle");
  CHECK_FALSE(sprite::isomorphic(ga, sprite::build_graph(c, ValidationMode::Strict)));

  sprite::Scaffold d = panel_with_two_children();
  d.elements[1].id = "renamed";
  CHECK_FALSE(sprite::isomorphic(ga, sprite::build_graph(d, ValidationMode::Strict)));
}

TEST_CASE("isomorphic compares ids after stripping collision suffixes") {
  // "Main HUD" sanitizes to main-hud either way, and btn-2 (the name the
  // allocator gives a second "btn") strips back to btn.
  sprite::Scaffold a = panel_with_two_children();
  a.elements[0].id = "Main HUD";
  a.elements[1].id = "btn-2";
  a.elements[1].parent = "Main HUD";
  a.elements[2].parent = "Main HUD";
  sprite::Scaffold b = panel_with_two_children();
  b.elements[0].id = "main-hud";
  b.elements[1].id = "btn";
  b.elements[1].parent = "main-hud";
  b.elements[2].parent = "main-hud";
  const SceneGraph ga = sprite::build_graph(a, ValidationMode::Strict);
  const SceneGraph gb = sprite::build_graph(b, ValidationMode::Strict);
  CHECK(sprite::isomorphic(ga, gb));
  CHECK(oracles::exhaustive_isomorphic(ga, gb));
}

TEST_CASE("isomorphic agrees with exhaustive bijection search on small graphs") {
  std::mt19937 rng(777);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const sprite::Scaffold sa = builders::random_scaffold(rng, 5);
    const sprite::Scaffold sb = builders::random_scaffold(rng, 5);
    sprite::SceneGraph ga, gb;
    try {
      ga = sprite::build_graph(sa, ValidationMode::Lenient);
      gb = sprite::build_graph(sb, ValidationMode::Lenient);
    } catch (const sprite::GraphError&) {
      continue;
    }
    if (ga.nodes.size() > 7 || gb.nodes.size() > 7) continue;
    CHECK(sprite::isomorphic(ga, gb) == oracles::exhaustive_isomorphic(ga, gb));
    CHECK(sprite::isomorphic(ga, ga));
    ++checked;
  }
  CHECK(checked > 50);
}
