#include "sprite/validate.hpp"

#include <catch_amalgamated.hpp>

#include <set>

#include "sprite/scaffold_io.hpp"
#include "support/builders.hpp"
#include "support/oracles.hpp"

using sprite::Severity;
using sprite::ValidationMode;

namespace {

std::set<std::string> error_codes(const std::vector<sprite::Diagnostic>& diagnostics) {
  std::set<std::string> codes;
  for (const sprite::Diagnostic& d : diagnostics) {
    if (d.severity == Severity::Error) codes.insert(d.code);
  }
  return codes;
}

}  // namespace

TEST_CASE("clean fixtures yield no diagnostics in strict mode") {
  for (int variant = 0; variant < 8; ++variant) {
    const sprite::Scaffold s = builders::clean_scaffold(variant);
    CHECK(sprite::validate(s, ValidationMode::Strict).empty());
  }
}

TEST_CASE("a two-element parent cycle yields exactly one E_CYCLE") {
  sprite::Scaffold s;
  s.canvas_width = 100;
  s.canvas_height = 100;
  s.elements.push_back(builders::element("a", "panel", "b", {10, 10, 60, 60}));
  s.elements.push_back(builders::element("b", "panel", "a", {10, 10, 60, 60}));
  const auto diagnostics = sprite::validate(s, ValidationMode::Strict);
  REQUIRE(diagnostics.size() == 1);
  CHECK(diagnostics[0].code == sprite::codes::cycle);
  CHECK(oracles::has_parent_cycle(s));
}

TEST_CASE("containment escape is an error in strict mode, a warning in lenient") {
  sprite::Scaffold s;
  s.canvas_width = 100;
  s.canvas_height = 100;
  s.elements.push_back(builders::element("parent", "panel", std::nullopt, {10, 10, 40, 40}));
  s.elements.push_back(builders::element("child", "icon", "parent", {0, 0, 50, 50}));

  const auto strict = sprite::validate(s, ValidationMode::Strict);
  REQUIRE(strict.size() == 1);
  CHECK(strict[0].code == sprite::codes::bbox_containment);
  CHECK(strict[0].severity == Severity::Error);

  const auto lenient = sprite::validate(s, ValidationMode::Lenient);
  REQUIRE(lenient.size() == 1);
  CHECK(lenient[0].code == sprite::codes::bbox_containment);
  CHECK(lenient[0].severity == Severity::Warning);
}

TEST_CASE("self-parent counts as a cycle") {
  sprite::Scaffold s;
  s.canvas_width = 50;
  s.canvas_height = 50;
  s.elements.push_back(builders::element("solo", "panel", "solo", {1, 1, 20, 20}));
  CHECK(error_codes(sprite::validate(s, ValidationMode::Lenient)) ==
        std::set<std::string>{sprite::codes::cycle});
}

TEST_CASE("dangling parent is strict-only") {
  sprite::Scaffold s;
  s.canvas_width = 80;
  s.canvas_height = 80;
  s.elements.push_back(builders::element("w", "button", "ghost", {1, 1, 20, 20}));
  CHECK(error_codes(sprite::validate(s, ValidationMode::Strict)) ==
        std::set<std::string>{sprite::codes::dangling_parent});
  CHECK(error_codes(sprite::validate(s, ValidationMode::Lenient)).empty());
}

TEST_CASE("grounded phase demands asset paths on non-panels") {
  sprite::Scaffold s = builders::clean_scaffold(1);
  s.phase = sprite::Phase::Grounded;
  const auto strict = sprite::validate(s, ValidationMode::Strict);
  CHECK(error_codes(strict) == std::set<std::string>{sprite::codes::missing_field});
  for (sprite::UIElement& e : s.elements) {
    if (!e.label.is_panel()) e.asset_path = "sprites/" + e.id + ".png";
  }
  CHECK(sprite::validate(s, ValidationMode::Strict).empty());
}

TEST_CASE("every fault in the corpus triggers exactly its injected code") {
  const std::vector<builders::Fault> corpus = builders::fault_corpus();
  REQUIRE(corpus.size() >= 14);

  std::map<std::string, int> per_code;
  for (const builders::Fault& fault : corpus) {
    ++per_code[fault.code];
    INFO(fault.code << ": " << fault.note);

    std::set<std::string> observed;
    try {
      const sprite::Scaffold parsed = sprite::parse_scaffold(fault.faulty_yaml);
      observed = error_codes(sprite::validate(parsed, ValidationMode::Strict));
    } catch (const sprite::SchemaError& e) {
      observed = {e.diagnostic.code};
    }
    CHECK(observed == std::set<std::string>{fault.code});

    const sprite::Scaffold reverted = sprite::parse_scaffold(fault.clean_yaml);
    CHECK(error_codes(sprite::validate(reverted, ValidationMode::Strict)).empty());
  }
  REQUIRE(per_code.size() == 7);
  for (const auto& [code, count] : per_code) {
    INFO(code);
    CHECK(count >= 2);
  }
}
