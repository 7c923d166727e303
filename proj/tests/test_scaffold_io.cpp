#include "sprite/scaffold_io.hpp"

#include <catch_amalgamated.hpp>

#include "support/builders.hpp"

using sprite::Scaffold;
using sprite::ScaffoldFormat;

namespace {

const char* kMinimalDoc = R"(canvas_width: 320
canvas_height: 200
source_image: menu.png
phase: scaffolded
elements:
- id: main_panel
  label: panel
  parent: null
  bbox_2d: [10, 10, 310, 190]
  seg_prompt: large menu panel
- id: start_button
  label: button
  parent: main_panel
  bbox_2d: [40, 40, 160, 80]
  seg_prompt: green start button
)";

}  // namespace

TEST_CASE("parse_scaffold binds a minimal two-element document") {
  const Scaffold s = sprite::parse_scaffold(kMinimalDoc);
  CHECK(s.canvas_width == 320);
  CHECK(s.canvas_height == 200);
  CHECK(s.phase == sprite::Phase::Scaffolded);
  REQUIRE(s.elements.size() == 2);
  CHECK(s.elements[0].id == "main_panel");
  CHECK_FALSE(s.elements[0].parent.has_value());
  CHECK(s.elements[1].parent == "main_panel");
  CHECK(s.elements[1].bbox == sprite::BBox{40, 40, 160, 80});
}

TEST_CASE("parse_scaffold defaults the phase to scaffolded") {
  const Scaffold s = sprite::parse_scaffold(
      "canvas_width: 100\ncanvas_height: 100\nelements: []\n");
  CHECK(s.phase == sprite::Phase::Scaffolded);
  CHECK(s.elements.empty());
}

TEST_CASE("missing bbox_2d raises SchemaError with E_MISSING_FIELD") {
  const std::string doc =
      "canvas_width: 100\ncanvas_height: 100\nelements:\n"
      "- id: a\n  label: panel\n  parent: null\n  seg_prompt: p\n";
  try {
    sprite::parse_scaffold(doc);
    FAIL("expected SchemaError");
  } catch (const sprite::SchemaError& e) {
    CHECK(e.diagnostic.code == sprite::codes::missing_field);
  }
}

TEST_CASE("malformed YAML raises ParseError") {
  CHECK_THROWS_AS(sprite::parse_scaffold("canvas_width: [unterminated"), sprite::ParseError);
}

TEST_CASE("unknown labels fall back and survive a round trip verbatim") {
  const std::string doc =
      "canvas_width: 100\ncanvas_height: 100\nelements:\n"
      "- id: orb\n  label: healthglobe\n  parent: null\n  bbox_2d: [1, 1, 20, 20]\n"
      "  seg_prompt: red orb\n";
  const Scaffold s = sprite::parse_scaffold(doc);
  REQUIRE(s.elements.size() == 1);
  CHECK(s.elements[0].label.kind == sprite::ElementKind::Custom);
  CHECK(s.elements[0].label.raw == "healthglobe");

  const Scaffold again = sprite::parse_scaffold(sprite::serialize_scaffold(s));
  CHECK(again.elements[0].label.raw == "healthglobe");
  CHECK(again == s);
}

TEST_CASE("known labels match case-sensitively; 'Button' is a fallback tag") {
  const std::string doc =
      "canvas_width: 100\ncanvas_height: 100\nelements:\n"
      "- id: b\n  label: Button\n  parent: null\n  bbox_2d: [1, 1, 20, 20]\n  seg_prompt: b\n";
  const Scaffold s = sprite::parse_scaffold(doc);
  CHECK(s.elements[0].label.kind == sprite::ElementKind::Custom);
  CHECK(s.elements[0].label.raw == "Button");
}

TEST_CASE("id-less elements get synthesized <label>_<index> ids") {
  const std::string doc =
      "canvas_width: 100\ncanvas_height: 100\nelements:\n"
      "- label: panel\n  parent: null\n  bbox_2d: [0, 0, 99, 99]\n  seg_prompt: p\n"
      "- label: button\n  parent: panel_0\n  bbox_2d: [5, 5, 20, 20]\n  seg_prompt: b\n";
  const Scaffold s = sprite::parse_scaffold(doc);
  CHECK(s.elements[0].id == "panel_0");
  CHECK(s.elements[1].id == "button_1");
}

TEST_CASE("round trip through yaml and canonical json") {
  for (int variant : {0, 1, 2, 3, 6}) {
    const Scaffold s = builders::clean_scaffold(variant);
    CHECK(sprite::parse_scaffold(sprite::serialize_scaffold(s, ScaffoldFormat::Yaml)) == s);
    CHECK(sprite::parse_scaffold(sprite::serialize_scaffold(s, ScaffoldFormat::CanonicalJson)) ==
          s);
  }
}

TEST_CASE("serialization is deterministic") {
  const Scaffold s = builders::clean_scaffold(2);
  CHECK(sprite::serialize_scaffold(s) == sprite::serialize_scaffold(s));
  CHECK(sprite::serialize_scaffold(s, ScaffoldFormat::CanonicalJson) ==
        sprite::serialize_scaffold(s, ScaffoldFormat::CanonicalJson));
}

TEST_CASE("yaml output is smaller than canonical json for a 10-element fixture") {
  Scaffold s = builders::clean_scaffold(4);  // 3 fixed + 5 buttons
  s.elements.push_back(builders::element("pet_icon", "icon", "hud_root", {330, 100, 362, 132}));
  s.elements.push_back(builders::element("coin_text", "text", "hud_root", {330, 140, 390, 160}));
  REQUIRE(s.elements.size() == 10);
  const std::string yaml = sprite::serialize_scaffold(s, ScaffoldFormat::Yaml);
  const std::string json = sprite::serialize_scaffold(s, ScaffoldFormat::CanonicalJson);
  CHECK(yaml.size() < json.size());
}

TEST_CASE("unknown keys survive one parse-serialize cycle byte-for-byte in value") {
  const std::string doc =
      "canvas_width: 100\ncanvas_height: 100\nrevision: 7c1f\nelements:\n"
      "- id: a\n  label: panel\n  parent: null\n  bbox_2d: [0, 0, 80, 80]\n"
      "  seg_prompt: p\n  opacity_hint: \"0.5000\"\n  tags:\n  - hud\n  - menu overlay\n"
      "meta:\n  author: sam\n  pass: 2\n";
  const Scaffold s = sprite::parse_scaffold(doc);
  REQUIRE(s.extras.size() == 2);
  CHECK(s.extras[0].first == "revision");
  CHECK(s.extras[0].second.scalar == "7c1f");
  REQUIRE(s.elements[0].extras.size() == 2);
  CHECK(s.elements[0].extras[0].second.scalar == "0.5000");
  CHECK(s.elements[0].extras[1].second.items[1].scalar == "menu overlay");

  const Scaffold again = sprite::parse_scaffold(sprite::serialize_scaffold(s));
  CHECK(again == s);

  const Scaffold via_json =
      sprite::parse_scaffold(sprite::serialize_scaffold(s, ScaffoldFormat::CanonicalJson));
  CHECK(via_json == s);
}

TEST_CASE("extras with nested sequences of mappings round trip") {
  const std::string doc =
      "canvas_width: 100\ncanvas_height: 100\nelements:\n"
      "- id: a\n  label: panel\n  parent: null\n  bbox_2d: [0, 0, 80, 80]\n  seg_prompt: p\n"
      "states:\n"
      "- name: hover\n  tint: warm\n"
      "- name: pressed\n  tint: cold\n"
      "matrix:\n"
      "- - 1\n  - 2\n"
      "- - 3\n  - 4\n";
  const Scaffold s = sprite::parse_scaffold(doc);
  REQUIRE(s.extras.size() == 2);
  REQUIRE(s.extras[0].second.items.size() == 2);
  CHECK(s.extras[0].second.items[1].entries[0].second.scalar == "pressed");
  CHECK(s.extras[1].second.items[1].items[0].scalar == "3");

  const Scaffold via_yaml = sprite::parse_scaffold(sprite::serialize_scaffold(s));
  CHECK(via_yaml == s);
  const Scaffold via_json =
      sprite::parse_scaffold(sprite::serialize_scaffold(s, ScaffoldFormat::CanonicalJson));
  CHECK(via_json == s);
}

TEST_CASE("scalars needing quotes are quoted and recovered exactly") {
  Scaffold s = builders::clean_scaffold(0);
  s.elements[0].seg_prompt = "panel: the \"main\" one # truly";
  s.elements[1].seg_prompt = "  leading and trailing  ";
  s.elements[2].seg_prompt = "1944";
  s.source_image = "null";
  const Scaffold again = sprite::parse_scaffold(sprite::serialize_scaffold(s));
  CHECK(again == s);
}

TEST_CASE("utf-8 prompts round trip through both formats") {
  Scaffold s = builders::clean_scaffold(1);
  s.elements[1].seg_prompt = "金色の体力ゲージ、画面上部";
  s.elements[2].seg_prompt = "红色攻击按钮，圆角矩形";
  const Scaffold via_yaml = sprite::parse_scaffold(sprite::serialize_scaffold(s));
  CHECK(via_yaml == s);
  const Scaffold via_json =
      sprite::parse_scaffold(sprite::serialize_scaffold(s, ScaffoldFormat::CanonicalJson));
  CHECK(via_json == s);
}

TEST_CASE("random scaffolds round trip through both formats") {
  std::mt19937 rng(8086);
  for (int trial = 0; trial < 60; ++trial) {
    const Scaffold s = builders::random_scaffold(rng, 16);
    const Scaffold via_yaml = sprite::parse_scaffold(sprite::serialize_scaffold(s));
    REQUIRE(via_yaml == s);
    const Scaffold via_json =
        sprite::parse_scaffold(sprite::serialize_scaffold(s, ScaffoldFormat::CanonicalJson));
    REQUIRE(via_json == s);
  }
}

TEST_CASE("serialize rejects scaffolds with validation errors") {
  Scaffold s = builders::clean_scaffold(0);
  s.elements[1].id = s.elements[0].id;
  CHECK_THROWS_AS(sprite::serialize_scaffold(s), sprite::ContractError);
}

TEST_CASE("duplicate canonical keys are schema errors") {
  CHECK_THROWS_AS(
      sprite::parse_scaffold("canvas_width: 1\ncanvas_width: 2\ncanvas_height: 3\nelements: []\n"),
      sprite::SchemaError);
}
