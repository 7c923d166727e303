#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "sprite/png_io.hpp"
#include "sprite/scaffold_io.hpp"
#include "sprite/synthetic.hpp"
#include "sprite/util.hpp"
#include "support/builders.hpp"

namespace fs = std::filesystem;

namespace {

struct CommandResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

CommandResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path dir = fs::temp_directory_path() / "sprite_cli_io";
  fs::create_directories(dir);
  const fs::path out_file = dir / ("out_" + std::to_string(counter) + ".txt");
  const fs::path err_file = dir / ("err_" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string command = std::string(SPRITE_CLI_BIN) + " " + args + " >" +
                              out_file.string() + " 2>" + err_file.string();
  const int status = std::system(command.c_str());
  CommandResult result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  result.out = sprite::read_file(out_file.string());
  result.err = sprite::read_file(err_file.string());
  return result;
}

fs::path temp_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("sprite_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_scaffold(const fs::path& dir, const std::string& name,
                        const std::string& text) {
  const fs::path path = dir / name;
  sprite::write_file_atomic(path, text);
  return path;
}

}  // namespace

TEST_CASE("validate: clean fixture exits 0 with empty stderr") {
  const auto dir = temp_dir("validate_clean");
  const auto path = write_scaffold(dir, "clean.yaml",
                                   sprite::serialize_scaffold(builders::clean_scaffold(1)));
  const CommandResult result = run_cli("validate " + path.string() + " --strict");
  CHECK(result.exit_code == 0);
  CHECK(result.err.empty());
}

TEST_CASE("validate: cycle fixture exits 1 and names E_CYCLE") {
  const auto dir = temp_dir("validate_cycle");
  sprite::Scaffold s;
  s.canvas_width = s.canvas_height = 100;
  s.elements.push_back(builders::element("a", "panel", "b", {1, 1, 50, 50}));
  s.elements.push_back(builders::element("b", "panel", "a", {1, 1, 50, 50}));
  const auto path =
      write_scaffold(dir, "cycle.yaml", sprite::serialize_scaffold_unchecked(s));
  const CommandResult result = run_cli("validate " + path.string());
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("E_CYCLE") != std::string::npos);
}

TEST_CASE("validate: missing file exits 2") {
  const CommandResult result = run_cli("validate /nonexistent/missing.yaml");
  CHECK(result.exit_code == 2);
}

TEST_CASE("compile: calibrated fixture writes three files; rerun is byte-identical") {
  const auto dir = temp_dir("compile");
  const std::string fixture =
      std::string(SPRITE_FIXTURES_DIR) + "/scaffolds/minimal.yaml";
  const fs::path out = dir / "out";
  const CommandResult result =
      run_cli("compile " + fixture + " -o " + out.string());
  REQUIRE(result.exit_code == 0);
  REQUIRE(fs::exists(out / "minimal.uxml"));
  REQUIRE(fs::exists(out / "minimal.uss"));
  REQUIRE(fs::exists(out / "manifest.json"));
  const std::string first = sprite::read_file((out / "minimal.uxml").string());
  const CommandResult rerun = run_cli("compile " + fixture + " -o " + out.string());
  CHECK(rerun.exit_code == 0);
  CHECK(sprite::read_file((out / "minimal.uxml").string()) == first);
}

TEST_CASE("compile: scaffolded input exits 1 and points at calibrate") {
  const auto dir = temp_dir("compile_phase");
  const auto path = write_scaffold(dir, "raw.yaml",
                                   sprite::serialize_scaffold(builders::clean_scaffold(0)));
  const CommandResult result = run_cli("compile " + path.string() + " -o " + dir.string());
  CHECK(result.exit_code == 1);
  CHECK(result.err.find("calibrate") != std::string::npos);
}

TEST_CASE("tokens: prints the byte ratio") {
  const std::string fixture =
      std::string(SPRITE_FIXTURES_DIR) + "/scaffolds/menu_zh_12.yaml";
  const CommandResult result = run_cli("tokens " + fixture + " --json");
  REQUIRE(result.exit_code == 0);
  const auto doc = nlohmann::json::parse(result.out);
  CHECK(doc.at("ratio").get<double>() < 0.85);
  CHECK(doc.at("yaml_bytes").get<long long>() > 0);
}

TEST_CASE("calibrate: writes a calibrated document") {
  const auto dir = temp_dir("calibrate");
  const auto path = write_scaffold(dir, "raw.yaml",
                                   sprite::serialize_scaffold(builders::clean_scaffold(2)));
  const fs::path out = dir / "calibrated.yaml";
  const CommandResult result =
      run_cli("calibrate " + path.string() + " -o " + out.string());
  REQUIRE(result.exit_code == 0);
  const sprite::Scaffold calibrated = sprite::load_scaffold_file(out.string());
  CHECK(calibrated.phase == sprite::Phase::Calibrated);
}

TEST_CASE("calibrate: a detections file steers fusion") {
  const auto dir = temp_dir("calibrate_detections");
  sprite::Scaffold s;
  s.canvas_width = 200;
  s.canvas_height = 100;
  s.elements.push_back(builders::element("frame", "panel", std::nullopt, {10, 10, 190, 90}));
  s.elements.push_back(builders::element("gauge", "progress_bar", "frame", {40, 20, 120, 40}));
  const auto scaffold = write_scaffold(dir, "raw.yaml", sprite::serialize_scaffold(s));
  sprite::write_file_atomic(dir / "detections.json",
                            "{\"gauge\": [42, 22, 118, 38], \"frame\": null}\n");
  const fs::path out = dir / "calibrated.yaml";
  const CommandResult result = run_cli("calibrate " + scaffold.string() + " --detections " +
                                       (dir / "detections.json").string() + " -o " + out.string());
  REQUIRE(result.exit_code == 0);
  const sprite::Scaffold calibrated = sprite::load_scaffold_file(out.string());
  const sprite::UIElement* gauge = calibrated.find("gauge");
  REQUIRE(gauge != nullptr);
  CHECK(gauge->bbox == sprite::BBox{42, 22, 118, 38});
}

TEST_CASE("eval: a scaffold against its own design-json twin scores 1.0") {
  const auto dir = temp_dir("eval");
  const sprite::SyntheticHud hud = sprite::render_synthetic_hud();
  const auto pred = write_scaffold(dir, "pred.yaml",
                                   sprite::serialize_scaffold(hud.ground_truth));
  const auto truth = write_scaffold(dir, "gt.json", sprite::synthetic_hud_design_json());
  const CommandResult result = run_cli("eval --pred " + pred.string() + " --truth " +
                                       truth.string() + " --kind design_json --json");
  REQUIRE(result.exit_code == 0);
  const auto doc = nlohmann::json::parse(result.out);
  CHECK(doc.at("detection_recall").get<double>() == 1.0);
  CHECK(doc.at("detection_precision").get<double>() == 1.0);
  CHECK(doc.at("parent_consistency").get<double>() == 1.0);
  CHECK(doc.at("mean_matched_iou").get<double>() == 1.0);
}

TEST_CASE("gen-fixture then pipeline: full mock run, deterministic artifacts") {
  const auto dir = temp_dir("pipeline");
  const CommandResult gen = run_cli("gen-fixture --out " + dir.string());
  REQUIRE(gen.exit_code == 0);

  const std::string image = (dir / "synthetic_hud.png").string();
  const std::string config = (dir / "pipeline.cfg").string();
  const fs::path out_a = dir / "out_a";
  const fs::path out_b = dir / "out_b";
  const CommandResult run_a =
      run_cli("pipeline --image " + image + " --config " + config + " -o " + out_a.string());
  REQUIRE(run_a.exit_code == 0);
  const CommandResult run_b =
      run_cli("pipeline --image " + image + " --config " + config + " -o " + out_b.string());
  REQUIRE(run_b.exit_code == 0);

  const char* artifacts[] = {"scaffold.yaml",          "scaffold.calibrated.yaml",
                             "background.png",         "ui.uxml",
                             "ui.uss",                 "manifest.json",
                             "sprites/sprites.json",   "sprites/status_bar.png",
                             "sprites/attack_button.png", "sprites/confirm_button.png"};
  for (const char* artifact : artifacts) {
    INFO(artifact);
    REQUIRE(fs::exists(out_a / artifact));
    CHECK(sprite::read_file((out_a / artifact).string()) ==
          sprite::read_file((out_b / artifact).string()));
  }
  REQUIRE(fs::exists(out_a / "run_report.json"));

  // The calibrated scaffold ends up on the rendered ground truth exactly.
  const CommandResult eval = run_cli("eval --pred " + (out_a / "scaffold.calibrated.yaml").string() +
                                     " --truth " + (dir / "synthetic_hud.gt.json").string() +
                                     " --kind design_json --json");
  REQUIRE(eval.exit_code == 0);
  const auto doc = nlohmann::json::parse(eval.out);
  CHECK(doc.at("mean_matched_iou").get<double>() == 1.0);
  CHECK(doc.at("parent_consistency").get<double>() == 1.0);
}

TEST_CASE("eval: uxml_pair ground truth from the golden outputs") {
  const std::string pred = std::string(SPRITE_FIXTURES_DIR) + "/scaffolds/minimal.yaml";
  const std::string truth =
      std::string(SPRITE_FIXTURES_DIR) + "/golden/minimal/minimal.uxml";
  const CommandResult result =
      run_cli("eval --pred " + pred + " --truth " + truth + " --kind uxml_pair --json");
  REQUIRE(result.exit_code == 0);
  const auto doc = nlohmann::json::parse(result.out);
  CHECK(doc.at("mean_matched_iou").get<double>() == 1.0);
  CHECK(doc.at("detection_recall").get<double>() == 1.0);
  CHECK(doc.at("parent_consistency").get<double>() == 1.0);
}

TEST_CASE("pipeline: http config missing an endpoint exits 2 before any work") {
  const auto dir = temp_dir("badconfig");
  sprite::write_file_atomic(dir / "backend.cfg",
                            "kind = http\nscaffold_url = http://127.0.0.1:1/s\n"
                            "detect_url = http://127.0.0.1:1/d\n"
                            "inpaint_url = http://127.0.0.1:1/i\n");
  sprite::write_file_atomic(dir / "pipeline.cfg", "backend_config = backend.cfg\n");
  const sprite::SyntheticHud hud = sprite::render_synthetic_hud();
  sprite::write_file_atomic(dir / "img.png", sprite::encode_png(hud.image));
  const CommandResult result =
      run_cli("pipeline --image " + (dir / "img.png").string() + " --config " +
              (dir / "pipeline.cfg").string() + " -o " + (dir / "out").string());
  CHECK(result.exit_code == 2);
  CHECK_FALSE(fs::exists(dir / "out" / "scaffold.yaml"));
}

TEST_CASE("pipeline: unreachable http backend exits 3 and reports the failing stage") {
  const auto dir = temp_dir("deadbackend");
  sprite::write_file_atomic(dir / "backend.cfg",
                            "kind = http\n"
                            "scaffold_url = http://127.0.0.1:9/scaffold\n"
                            "detect_url = http://127.0.0.1:9/detect\n"
                            "segment_url = http://127.0.0.1:9/segment\n"
                            "inpaint_url = http://127.0.0.1:9/inpaint\n"
                            "timeout_ms = 300\nmax_retries = 1\nretry_base_ms = 1\n");
  sprite::write_file_atomic(dir / "pipeline.cfg", "backend_config = backend.cfg\n");
  const sprite::SyntheticHud hud = sprite::render_synthetic_hud();
  sprite::write_file_atomic(dir / "img.png", sprite::encode_png(hud.image));
  const CommandResult result =
      run_cli("pipeline --image " + (dir / "img.png").string() + " --config " +
              (dir / "pipeline.cfg").string() + " -o " + (dir / "out").string());
  CHECK(result.exit_code == 3);
  const auto report = nlohmann::json::parse(
      sprite::read_file((dir / "out" / "run_report.json").string()));
  CHECK(report.at("failed_stage").get<std::string>() == "scaffold");
}

TEST_CASE("extract: one sprite per non-panel element") {
  const auto dir = temp_dir("extract");
  const CommandResult gen = run_cli("gen-fixture --out " + dir.string());
  REQUIRE(gen.exit_code == 0);
  const sprite::SyntheticHud hud = sprite::render_synthetic_hud();
  const auto scaffold = write_scaffold(dir, "gt_scaffold.yaml",
                                       sprite::serialize_scaffold(hud.ground_truth));
  const fs::path out = dir / "assets";
  const CommandResult result =
      run_cli("extract " + scaffold.string() + " --image " + (dir / "synthetic_hud.png").string() +
              " --out " + out.string() + " --backend " + (dir / "backend.cfg").string());
  REQUIRE(result.exit_code == 0);
  int pngs = 0;
  for (const auto& entry : fs::directory_iterator(out)) {
    if (entry.path().extension() == ".png") ++pngs;
  }
  CHECK(pngs == 3);  // status bar and two buttons; panels are containers
  CHECK(fs::exists(out / "scaffold.grounded.yaml"));
}
