// Minimal library walkthrough: build a scaffold in code, calibrate it, and
// print the compiled UXML/USS. No backends involved.

#include <iostream>

#include "sprite/calibration.hpp"
#include "sprite/scaffold_io.hpp"
#include "sprite/synthesis.hpp"

int main() {
  sprite::Scaffold scaffold;
  scaffold.canvas_width = 480;
  scaffold.canvas_height = 270;
  scaffold.source_image = "pause_menu.png";

  sprite::UIElement panel;
  panel.id = "pause_panel";
  panel.label = sprite::parse_label("panel");
  panel.bbox = {90, 40, 390, 230};
  panel.seg_prompt = "dark pause menu panel";
  scaffold.elements.push_back(panel);

  sprite::UIElement resume;
  resume.id = "resume_button";
  resume.label = sprite::parse_label("button");
  resume.parent = "pause_panel";
  // Slightly off the panel on purpose; calibration clips it back inside.
  resume.bbox = {120, 38, 360, 90};
  resume.seg_prompt = "wide resume button";
  resume.asset_path = "sprites/resume_button.png";
  scaffold.elements.push_back(resume);

  const sprite::CalibrateResult calibrated = sprite::calibrate(scaffold, {});
  for (const sprite::Diagnostic& d : calibrated.diagnostics) {
    std::cerr << sprite::format_diagnostic(d) << "\n";
  }

  const sprite::CompiledUI compiled = sprite::compile(calibrated.scaffold, "pause_menu");
  std::cout << "---- scaffold ----\n"
            << sprite::serialize_scaffold(calibrated.scaffold) << "---- pause_menu.uxml ----\n"
            << compiled.uxml_text << "---- pause_menu.uss ----\n"
            << compiled.uss_text;
  return 0;
}
