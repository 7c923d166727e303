// Command-line front end for the scaffold pipeline: per-stage commands plus
// the full screenshot -> engine-assets run.
//
// Exit codes, stable across all subcommands:
//   0  success
//   1  domain error (validation failures, wrong phase, graph defects)
//   2  input or config error (missing files, malformed documents)
//   3  backend failure after retries

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sprite/sprite.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitInput = 2;
constexpr int kExitBackend = 3;

void print_diagnostics(const std::vector<sprite::Diagnostic>& diagnostics) {
  for (const sprite::Diagnostic& d : diagnostics) {
    std::cerr << sprite::format_diagnostic(d) << "\n";
  }
}

int run_validate(const std::string& path, bool strict) {
  const sprite::Scaffold scaffold = sprite::load_scaffold_file(path);
  const auto diagnostics = sprite::validate(
      scaffold, strict ? sprite::ValidationMode::Strict : sprite::ValidationMode::Lenient);
  print_diagnostics(diagnostics);
  return sprite::has_errors(diagnostics) ? kExitDomain : kExitOk;
}

int run_compile(const std::string& path, const std::string& out_dir) {
  const sprite::Scaffold scaffold = sprite::load_scaffold_file(path);
  if (scaffold.phase != sprite::Phase::Calibrated) {
    std::cerr << "error: scaffold is in phase '" << sprite::to_string(scaffold.phase)
              << "'; run `sprite calibrate` first\n";
    return kExitDomain;
  }
  const std::string name = fs::path(path).stem().string();
  const sprite::CompiledUI compiled = sprite::compile(scaffold, name);
  fs::create_directories(out_dir);
  sprite::write_file_atomic(fs::path(out_dir) / (name + ".uxml"), compiled.uxml_text);
  sprite::write_file_atomic(fs::path(out_dir) / (name + ".uss"), compiled.uss_text);
  sprite::write_file_atomic(fs::path(out_dir) / "manifest.json",
                            sprite::asset_manifest_json(compiled.asset_manifest) + "\n");
  return kExitOk;
}

std::map<std::string, std::optional<sprite::BBox>> load_detections(const std::string& path) {
  std::map<std::string, std::optional<sprite::BBox>> detections;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(sprite::read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw sprite::ParseError("detections file " + path + ": " + e.what());
  }
  for (const auto& item : doc.items()) {
    if (item.value().is_null()) {
      detections[item.key()] = std::nullopt;
      continue;
    }
    if (!item.value().is_array() || item.value().size() != 4) {
      throw sprite::ParseError("detections file: '" + item.key() +
                               "' must map to [x_min, y_min, x_max, y_max] or null");
    }
    detections[item.key()] =
        sprite::BBox{item.value().at(0).get<int>(), item.value().at(1).get<int>(),
                     item.value().at(2).get<int>(), item.value().at(3).get<int>()};
  }
  return detections;
}

int run_calibrate(const std::string& path, const std::string& detections_path,
                  const std::string& out_path, const sprite::CalibrationParams& params) {
  const sprite::Scaffold scaffold = sprite::load_scaffold_file(path);
  std::map<std::string, std::optional<sprite::BBox>> detections;
  if (!detections_path.empty()) detections = load_detections(detections_path);
  const sprite::CalibrateResult result = sprite::calibrate(scaffold, detections, params);
  print_diagnostics(result.diagnostics);
  const std::string text = sprite::serialize_scaffold(result.scaffold);
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
  } else {
    sprite::write_file_atomic(out_path, text);
  }
  return kExitOk;
}

int run_extract(const std::string& path, const std::string& image_path,
                const std::string& out_dir, const std::string& backend_cfg) {
  const sprite::Scaffold scaffold = sprite::load_scaffold_file(path);
  const sprite::Image screenshot = sprite::read_png(image_path);
  const sprite::BackendSet backends = sprite::make_backend(backend_cfg);

  sprite::Scaffold grounded = scaffold;
  fs::create_directories(out_dir);
  for (sprite::UIElement& element : grounded.elements) {
    if (element.label.is_panel()) continue;
    sprite::Mask mask =
        backends.segmenter->segment(screenshot, element.bbox, element.seg_prompt);
    if (!mask.any()) {
      std::cerr << sprite::format_diagnostic(sprite::make_warning(
                       sprite::codes::unsupported_feature, element.id,
                       "segmentation returned an empty mask; falling back to the box interior"))
                << "\n";
      mask = sprite::Mask::from_box(screenshot.width, screenshot.height, element.bbox);
    }
    const sprite::SpriteAsset sprite_asset = sprite::extract_sprite(screenshot, mask, element.id);
    element.asset_path = sprite::write_sprite(sprite_asset, out_dir);
  }
  grounded.phase = sprite::Phase::Grounded;
  sprite::write_file_atomic(fs::path(out_dir) / "scaffold.grounded.yaml",
                            sprite::serialize_scaffold(grounded));
  return kExitOk;
}

int run_eval(const std::string& pred_path, const std::string& truth_path, const std::string& kind,
             double min_iou, bool as_json) {
  const sprite::Scaffold pred = sprite::load_scaffold_file(pred_path);
  const sprite::GroundTruthKind gt_kind = kind == "design_json"
                                              ? sprite::GroundTruthKind::DesignJson
                                              : sprite::GroundTruthKind::UxmlPair;
  const sprite::GroundTruth truth = sprite::load_ground_truth(truth_path, gt_kind);
  print_diagnostics(truth.diagnostics);
  const sprite::EvalReport report = sprite::evaluate(pred, truth, min_iou);
  if (as_json) {
    std::cout << sprite::eval_report_json(report) << "\n";
  } else {
    std::cout << sprite::eval_report_table(report);
  }
  return kExitOk;
}

int run_tokens(const std::string& path, bool as_json) {
  const sprite::Scaffold scaffold = sprite::load_scaffold_file(path);
  const sprite::SerializationEfficiency eff = sprite::measure_serialization_efficiency(scaffold);
  if (as_json) {
    nlohmann::ordered_json out;
    out["yaml_bytes"] = eff.yaml_bytes;
    out["json_bytes"] = eff.json_bytes;
    out["ratio"] = eff.ratio;
    std::cout << out.dump(-1, ' ', true) << "\n";
  } else {
    std::printf("yaml bytes: %lld\n", static_cast<long long>(eff.yaml_bytes));
    std::printf("json bytes: %lld\n", static_cast<long long>(eff.json_bytes));
    std::printf("byte ratio (token proxy, yaml/json): %.4f\n", eff.ratio);
  }
  return kExitOk;
}

int run_pipeline_cmd(const std::string& image_path, const std::string& config_path,
                     const std::string& out_dir) {
  const sprite::PipelineConfig config = sprite::load_pipeline_config(config_path);
  const sprite::BackendSet backends = sprite::make_backend(config.backend_config_path);
  const std::string out = out_dir.empty() ? config.output_dir : out_dir;
  if (out.empty()) {
    std::cerr << "error: no output directory (pass -o or set output_dir in the config)\n";
    return kExitInput;
  }
  const sprite::PipelineResult result = sprite::run_pipeline(image_path, config, backends, out);
  print_diagnostics(result.report.diagnostics);
  if (!result.ok) {
    std::cerr << "error: stage '" << *result.report.failed_stage
              << "' failed: " << result.report.error << "\n";
    return kExitBackend;
  }
  return kExitOk;
}

int run_gen_fixture(const std::string& out_dir) {
  const sprite::SyntheticHud hud = sprite::render_synthetic_hud();
  fs::create_directories(out_dir);
  const fs::path base(out_dir);
  sprite::write_file_atomic(base / "synthetic_hud.png", sprite::encode_png(hud.image));
  sprite::write_file_atomic(base / "synthetic_hud.scaffold.yaml",
                            sprite::serialize_scaffold(hud.scaffolded));
  sprite::write_file_atomic(base / "synthetic_hud.gt.json", sprite::synthetic_hud_design_json());

  nlohmann::ordered_json manifest;
  manifest["images"]["synthetic_hud"] = {{"image", "synthetic_hud.png"},
                                         {"scaffold", "synthetic_hud.scaffold.yaml"}};
  nlohmann::ordered_json palette = nlohmann::ordered_json::object();
  for (const auto& [name, color] : hud.palette) {
    palette[name] = {color.r, color.g, color.b, color.a};
  }
  manifest["palette"] = std::move(palette);
  sprite::write_file_atomic(base / "manifest.json", manifest.dump(2) + "\n");

  sprite::write_file_atomic(base / "backend.cfg",
                            "kind = mock\n"
                            "manifest = manifest.json\n"
                            "segmenter_mode = color\n");
  sprite::write_file_atomic(base / "pipeline.cfg",
                            "backend_config = backend.cfg\n"
                            "parallelism = 4\n"
                            "strictness = lenient\n");
  std::cout << "fixture written to " << out_dir << "\n"
            << "try: sprite pipeline --image " << (base / "synthetic_hud.png").string()
            << " --config " << (base / "pipeline.cfg").string() << " -o "
            << (base / "out").string() << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"screenshot -> scaffold -> engine-native UI pipeline"};
  app.require_subcommand(1);

  std::string scaffold_path, image_path, out_dir, detections_path, backend_cfg, config_path;
  std::string truth_path, kind = "design_json", out_path;
  bool strict = false, lenient = false, as_json = false;
  double min_iou = 0.5;
  sprite::CalibrationParams params;

  CLI::App* validate = app.add_subcommand("validate", "check a scaffold document");
  validate->add_option("scaffold", scaffold_path, "scaffold YAML path")->required();
  validate->add_flag("--strict", strict, "treat repairable geometry as errors");
  validate->add_flag("--lenient", lenient, "defer repairable geometry to calibration (default)");

  CLI::App* compile_cmd = app.add_subcommand("compile", "emit UXML/USS for a calibrated scaffold");
  compile_cmd->add_option("scaffold", scaffold_path, "calibrated scaffold YAML path")->required();
  compile_cmd->add_option("-o,--out", out_dir, "output directory")->required();

  CLI::App* calibrate_cmd =
      app.add_subcommand("calibrate", "clamp, fuse and contain scaffold geometry");
  calibrate_cmd->add_option("scaffold", scaffold_path, "scaffold YAML path")->required();
  calibrate_cmd->add_option("--detections", detections_path,
                            "JSON map of element id -> [x0, y0, x1, y1] or null");
  calibrate_cmd->add_option("-o,--out", out_path, "output path (default: stdout)");
  calibrate_cmd->add_option("--containment-tolerance", params.containment_tolerance_frac,
                            "per-edge escape tolerance as a fraction of the parent dimension");
  calibrate_cmd->add_option("--fusion-iou", params.fusion_iou_threshold,
                            "detector agreement gate");
  calibrate_cmd->add_option("--reassign-overlap", params.reassign_overlap_frac,
                            "area fraction a new parent must cover");
  calibrate_cmd->add_option("--min-box-px", params.min_box_px, "minimum box extent after clipping");

  CLI::App* extract_cmd = app.add_subcommand("extract", "segment and export sprite assets");
  extract_cmd->add_option("scaffold", scaffold_path, "scaffold YAML path")->required();
  extract_cmd->add_option("--image", image_path, "source screenshot PNG")->required();
  extract_cmd->add_option("--out", out_dir, "output directory")->required();
  extract_cmd->add_option("--backend", backend_cfg, "backend config path")->required();

  CLI::App* pipeline_cmd = app.add_subcommand("pipeline", "full three-stage run");
  pipeline_cmd->add_option("--image", image_path, "source screenshot PNG")->required();
  pipeline_cmd->add_option("--config", config_path, "pipeline config path")->required();
  pipeline_cmd->add_option("-o,--out", out_dir, "output directory");

  CLI::App* eval_cmd = app.add_subcommand("eval", "score a scaffold against ground truth");
  eval_cmd->add_option("--pred", scaffold_path, "predicted scaffold YAML")->required();
  eval_cmd->add_option("--truth", truth_path, "ground truth file")->required();
  eval_cmd->add_option("--kind", kind, "design_json | uxml_pair")
      ->check(CLI::IsMember({"design_json", "uxml_pair"}));
  eval_cmd->add_option("--min-iou", min_iou, "matching threshold (default 0.5)");
  eval_cmd->add_flag("--json", as_json, "machine-readable output");

  CLI::App* tokens_cmd =
      app.add_subcommand("tokens", "serialization efficiency of a scaffold (yaml vs json bytes)");
  tokens_cmd->add_option("scaffold", scaffold_path, "scaffold YAML path")->required();
  tokens_cmd->add_flag("--json", as_json, "machine-readable output");

  CLI::App* gen_cmd = app.add_subcommand("gen-fixture", "write the synthetic demo fixture");
  gen_cmd->add_option("--out", out_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      if (strict && lenient) {
        std::cerr << "error: --strict and --lenient are mutually exclusive\n";
        return kExitInput;
      }
      return run_validate(scaffold_path, strict);
    }
    if (compile_cmd->parsed()) return run_compile(scaffold_path, out_dir);
    if (calibrate_cmd->parsed())
      return run_calibrate(scaffold_path, detections_path, out_path, params);
    if (extract_cmd->parsed())
      return run_extract(scaffold_path, image_path, out_dir, backend_cfg);
    if (pipeline_cmd->parsed()) return run_pipeline_cmd(image_path, config_path, out_dir);
    if (eval_cmd->parsed()) return run_eval(scaffold_path, truth_path, kind, min_iou, as_json);
    if (tokens_cmd->parsed()) return run_tokens(scaffold_path, as_json);
    if (gen_cmd->parsed()) return run_gen_fixture(out_dir);
    std::cerr << "error: no subcommand\n";
    return kExitInput;
  } catch (const sprite::BackendError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kExitBackend;
  } catch (const sprite::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitInput;
  } catch (const sprite::SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    print_diagnostics({e.diagnostic});
    return kExitInput;
  } catch (const sprite::IOError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitInput;
  } catch (const sprite::Error& e) {
    // ContractError, GraphError, CalibrationError, AssetError.
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
