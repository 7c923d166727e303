#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "sprite/assets.hpp"
#include "sprite/backend.hpp"
#include "sprite/calibration.hpp"
#include "sprite/evaluation.hpp"
#include "sprite/http_backend.hpp"
#include "sprite/mock_backend.hpp"
#include "sprite/png_io.hpp"
#include "sprite/scaffold_io.hpp"
#include "sprite/synthesis.hpp"
#include "sprite/util.hpp"

namespace sprite {

struct PipelineConfig {
  std::string backend_config_path;
  CalibrationParams calibration;
  std::string output_dir;
  int parallelism = 4;
  ValidationMode strictness = ValidationMode::Lenient;
  std::string prompt_file;  // empty = use the built-in UI Master prompt
};

/// Loads a pipeline config; backend_config and prompt_file entries are
/// resolved against the config file's own directory.
inline PipelineConfig load_pipeline_config(const std::string& path) {
  namespace fs = std::filesystem;
  PipelineConfig config;
  const fs::path base = fs::path(path).parent_path();
  const auto resolve = [&](const std::string& value) {
    const fs::path p(value);
    return p.is_absolute() ? p.string() : (base / p).string();
  };
  for (const auto& [key, value] : detail::parse_kv_config(read_file(path), "pipeline config")) {
    if (key == "backend_config") {
      config.backend_config_path = resolve(value);
    } else if (key == "output_dir") {
      config.output_dir = value;
    } else if (key == "parallelism") {
      config.parallelism = detail::parse_config_int(value, key, "pipeline config");
    } else if (key == "strictness") {
      if (value == "strict") {
        config.strictness = ValidationMode::Strict;
      } else if (value == "lenient") {
        config.strictness = ValidationMode::Lenient;
      } else {
        throw ParseError("pipeline config: strictness must be 'strict' or 'lenient'");
      }
    } else if (key == "prompt_file") {
      config.prompt_file = resolve(value);
    } else if (key == "containment_tolerance_frac") {
      config.calibration.containment_tolerance_frac =
          detail::parse_config_double(value, key, "pipeline config");
    } else if (key == "fusion_iou_threshold") {
      config.calibration.fusion_iou_threshold =
          detail::parse_config_double(value, key, "pipeline config");
    } else if (key == "reassign_overlap_frac") {
      config.calibration.reassign_overlap_frac =
          detail::parse_config_double(value, key, "pipeline config");
    } else if (key == "min_box_px") {
      config.calibration.min_box_px = detail::parse_config_int(value, key, "pipeline config");
    } else {
      throw ParseError("pipeline config: unknown key '" + key + "'");
    }
  }
  if (config.backend_config_path.empty()) {
    throw ParseError("pipeline config: backend_config is required");
  }
  if (config.parallelism < 1) throw ParseError("pipeline config: parallelism must be >= 1");
  return config;
}

/// Builds the backend set named by a backend config file; mock manifest paths
/// resolve against the backend config's directory.
inline BackendSet make_backend(const std::string& backend_config_path) {
  namespace fs = std::filesystem;
  BackendConfig config =
      parse_backend_config(read_file(backend_config_path), backend_config_path);
  if (config.kind == BackendKind::Http) return make_http_backend(config);
  fs::path manifest(config.mock_manifest);
  if (!manifest.is_absolute()) {
    manifest = fs::path(backend_config_path).parent_path() / manifest;
  }
  return make_mock_backend(manifest.string(), config.segmenter_mode);
}

struct StageReport {
  std::string name;
  double duration_ms = 0.0;
  std::map<std::string, int> backend_calls;
};

struct RunReport {
  std::vector<StageReport> stages;
  std::vector<Diagnostic> diagnostics;
  std::vector<std::string> artifacts;  // paths relative to the output dir
  std::optional<std::string> failed_stage;
  std::string error;
};

inline std::string run_report_json(const RunReport& report) {
  nlohmann::ordered_json out;
  nlohmann::ordered_json stages = nlohmann::ordered_json::array();
  for (const StageReport& stage : report.stages) {
    nlohmann::ordered_json item;
    item["name"] = stage.name;
    item["duration_ms"] = stage.duration_ms;
    item["backend_calls"] = stage.backend_calls;
    stages.push_back(std::move(item));
  }
  out["stages"] = std::move(stages);
  nlohmann::ordered_json diagnostics = nlohmann::ordered_json::array();
  for (const Diagnostic& d : report.diagnostics) diagnostics.push_back(format_diagnostic(d));
  out["diagnostics"] = std::move(diagnostics);
  out["artifacts"] = report.artifacts;
  if (report.failed_stage) {
    out["failed_stage"] = *report.failed_stage;
    out["error"] = report.error;
  } else {
    out["failed_stage"] = nullptr;
  }
  return out.dump(2) + "\n";
}

struct PipelineResult {
  bool ok = false;
  RunReport report;
  Scaffold calibrated;  // valid when ok
};

/// Runs the three-stage pipeline end to end: scaffold inference, grounding
/// (detection, calibration, segmentation, sprite extraction, background
/// recovery) and code synthesis. Artifacts are written via temp-file-rename;
/// with mock backends two runs over the same inputs are byte-identical
/// except for the timings inside run_report.json. Backend failures preserve
/// the artifacts written so far and name the failing stage in the report.
inline PipelineResult run_pipeline(const std::string& image_path, const PipelineConfig& config,
                                   const BackendSet& backends, const std::string& out_dir) {
  namespace fs = std::filesystem;
  using Clock = std::chrono::steady_clock;
  PipelineResult result;
  RunReport& report = result.report;

  fs::create_directories(out_dir);
  const auto emit = [&](const std::string& relative, const std::string& bytes) {
    write_file_atomic(fs::path(out_dir) / relative, bytes);
    report.artifacts.push_back(relative);
  };
  const auto emit_binary = [&](const std::string& relative, const std::vector<std::uint8_t>& bytes) {
    write_file_atomic(fs::path(out_dir) / relative, bytes);
    report.artifacts.push_back(relative);
  };
  const auto finish_report = [&]() {
    write_file_atomic(fs::path(out_dir) / "run_report.json", run_report_json(report));
  };

  std::string stage_name = "scaffold";
  StageReport* stage = nullptr;
  const auto begin_stage = [&](const std::string& name) {
    report.stages.push_back(StageReport{name, 0.0, {}});
    stage = &report.stages.back();
    stage_name = name;
    return Clock::now();
  };
  const auto end_stage = [&](Clock::time_point start) {
    stage->duration_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(Clock::now() - start)
            .count();
  };

  // Inputs load before any stage begins: failures here are caller errors,
  // not pipeline failures, and nothing has been written yet.
  const std::string prompt =
      config.prompt_file.empty() ? default_ui_master_prompt() : read_file(config.prompt_file);
  const Image screenshot = read_png(image_path);

  try {
    // Stage 1: semantic scaffolding.
    auto start = begin_stage("scaffold");
    ScaffoldInference inference = backends.scaffold_provider->infer(screenshot, prompt);
    ++stage->backend_calls["scaffold"];
    for (const Diagnostic& d : inference.diagnostics) report.diagnostics.push_back(d);
    Scaffold scaffold = std::move(inference.scaffold);
    if (scaffold.source_image.empty()) {
      scaffold.source_image = fs::path(image_path).filename().string();
    }
    if (has_errors(inference.diagnostics)) {
      throw BackendError(BackendError::Kind::Protocol,
                         "scaffold backend returned a document with validation errors");
    }
    if (config.strictness == ValidationMode::Strict) {
      const std::vector<Diagnostic> strict = validate(scaffold, ValidationMode::Strict);
      for (const Diagnostic& d : strict) report.diagnostics.push_back(d);
      if (has_errors(strict)) {
        throw BackendError(BackendError::Kind::Protocol,
                           "scaffold fails strict validation and strictness = strict");
      }
    }
    if (scaffold.canvas_width != screenshot.width || scaffold.canvas_height != screenshot.height) {
      report.diagnostics.push_back(make_warning(
          codes::unsupported_feature, std::nullopt,
          "scaffold canvas does not match the screenshot dimensions; keeping the scaffold values"));
    }
    emit("scaffold.yaml", serialize_scaffold(scaffold));
    end_stage(start);

    // Stage 2: precision grounding and asset extraction.
    start = begin_stage("ground");
    std::map<std::string, std::optional<BBox>> detections;
    for (const UIElement& element : scaffold.elements) {
      DetectionResult detected = backends.detector->detect(screenshot, element.seg_prompt);
      ++stage->backend_calls["detect"];
      if (detected.detections.empty()) {
        detections[element.id] = std::nullopt;
      } else {
        detections[element.id] = detected.detections.front().bbox;  // at most one per element
      }
    }
    CalibrateResult calibrated = calibrate(scaffold, detections, config.calibration);
    for (const Diagnostic& d : calibrated.diagnostics) report.diagnostics.push_back(d);
    Scaffold& doc = calibrated.scaffold;

    // Per-element segmentation with bounded parallelism; results assembled
    // in element-list order so output is order-deterministic.
    std::vector<int> targets;
    for (int i = 0; i < static_cast<int>(doc.elements.size()); ++i) {
      if (!doc.elements[i].label.is_panel()) targets.push_back(i);
    }
    std::vector<Mask> masks(targets.size());
    {
      std::atomic<std::size_t> next{0};
      std::mutex failure_mutex;
      std::exception_ptr failure;
      const int workers = std::max(1, std::min<int>(config.parallelism,
                                                    static_cast<int>(targets.size())));
      auto work = [&]() {
        while (true) {
          const std::size_t k = next.fetch_add(1);
          if (k >= targets.size()) return;
          const UIElement& element = doc.elements[targets[k]];
          try {
            masks[k] = backends.segmenter->segment(screenshot, element.bbox, element.seg_prompt);
          } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            return;
          }
        }
      };
      if (workers == 1) {
        work();
      } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& t : pool) t.join();
      }
      stage->backend_calls["segment"] += static_cast<int>(targets.size());
      if (failure) std::rethrow_exception(failure);
    }

    const std::string sprite_dir = (fs::path(out_dir) / "sprites").string();
    Image background = screenshot;
    for (std::size_t k = 0; k < targets.size(); ++k) {
      UIElement& element = doc.elements[targets[k]];
      Mask& mask = masks[k];
      if (!mask.any()) {
        report.diagnostics.push_back(make_warning(
            codes::unsupported_feature, element.id,
            "segmentation returned an empty mask; falling back to the box interior"));
        mask = Mask::from_box(screenshot.width, screenshot.height, element.bbox);
      }
      const SpriteAsset sprite = extract_sprite(screenshot, mask, element.id);
      const std::string file_name = write_sprite(sprite, sprite_dir);
      report.artifacts.push_back("sprites/" + file_name);
      element.asset_path = "sprites/" + file_name;
      background = recover_background(background, mask, *backends.inpainter);
      ++stage->backend_calls["inpaint"];
    }
    report.artifacts.push_back("sprites/sprites.json");
    emit_binary("background.png", encode_png(background));
    emit("scaffold.calibrated.yaml", serialize_scaffold(doc));
    end_stage(start);

    // Stage 3: engine-native synthesis.
    start = begin_stage("synthesize");
    const CompiledUI compiled = compile(doc, "ui");
    emit("ui.uxml", compiled.uxml_text);
    emit("ui.uss", compiled.uss_text);
    emit("manifest.json", asset_manifest_json(compiled.asset_manifest) + "\n");
    end_stage(start);

    result.ok = true;
    result.calibrated = std::move(doc);
    finish_report();
    return result;
  } catch (const std::exception& e) {
    report.failed_stage = stage_name;
    report.error = e.what();
    finish_report();
    result.ok = false;
    return result;
  }
}

}  // namespace sprite
