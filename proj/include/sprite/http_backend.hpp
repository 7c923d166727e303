#pragma once

#include <chrono>
#include <cstdlib>
#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "sprite/backend.hpp"
#include "sprite/scaffold_io.hpp"
#include "sprite/wire.hpp"

namespace sprite {

namespace detail {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;
};

inline SplitUrl split_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) {
    throw ParseError("endpoint URL must include a scheme: " + url);
  }
  const std::size_t path = url.find('/', scheme + 3);
  if (path == std::string::npos) return SplitUrl{url, "/"};
  return SplitUrl{url.substr(0, path), url.substr(path)};
}

}  // namespace detail

/// JSON-over-HTTP client for remote model servers. Each call makes at most
/// 1 + max_retries attempts with exponential backoff; transport failures and
/// 5xx responses retry, anything else surfaces immediately. Credentials are
/// read from the configured environment variable at call time.
class HttpBackend : public ScaffoldProvider, public Detector, public Segmenter, public Inpainter {
 public:
  explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {
    if (config_.kind != BackendKind::Http) {
      throw ContractError("HttpBackend requires an http backend config");
    }
  }

  ScaffoldInference infer(const Image& image, const std::string& prompt) override {
    if (prompt.empty()) throw ContractError("infer requires a nonempty prompt");
    const std::string body = post(config_.scaffold_url, wire::scaffold_request(image, prompt));
    std::string yaml_text;
    try {
      yaml_text = nlohmann::json::parse(body).at("scaffold_yaml").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(BackendError::Kind::Protocol,
                         std::string("scaffold response is not valid JSON: ") + e.what());
    }
    ScaffoldInference result;
    try {
      result.scaffold = parse_scaffold(yaml_text);
    } catch (const SchemaError& e) {
      throw SchemaError(e.what(), e.diagnostic, yaml_text);
    } catch (const ParseError& e) {
      throw SchemaError(std::string("backend returned unparseable YAML: ") + e.what(),
                        make_error(codes::missing_field, std::nullopt, e.what()), yaml_text);
    }
    result.diagnostics = validate(result.scaffold, ValidationMode::Lenient);
    return result;
  }

  DetectionResult detect(const Image& image, const std::string& phrase) override {
    if (phrase.empty()) throw ContractError("detect requires a nonempty phrase");
    const std::string body = post(config_.detect_url, wire::detect_request(image, phrase));
    DetectionResult result;
    try {
      const nlohmann::json doc = nlohmann::json::parse(body);
      for (const nlohmann::json& item : doc.at("detections")) {
        Detection detection;
        detection.bbox = wire::bbox_from_json(item.at("bbox_2d"));
        detection.score = item.at("score").get<double>();
        detection.phrase = item.value("phrase", phrase);
        result.detections.push_back(std::move(detection));
      }
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(BackendError::Kind::Protocol,
                         std::string("detect response is malformed: ") + e.what());
    }
    for (const Detection& d : result.detections) {
      if (d.score < 0.0 || d.score > 1.0) {
        throw BackendError(BackendError::Kind::Protocol, "detection score outside [0, 1]");
      }
      if (!d.bbox.positive() || d.bbox.x_min < 0 || d.bbox.y_min < 0 ||
          d.bbox.x_max > image.width || d.bbox.y_max > image.height) {
        throw BackendError(BackendError::Kind::Protocol,
                           "detection box " + to_string(d.bbox) + " escapes the image");
      }
    }
    std::stable_sort(result.detections.begin(), result.detections.end(),
                     [](const Detection& a, const Detection& b) { return a.score > b.score; });
    return result;
  }

  Mask segment(const Image& image, const BBox& box, const std::string& phrase) override {
    const std::string body = post(config_.segment_url, wire::segment_request(image, box, phrase));
    Mask mask;
    try {
      mask = wire::mask_from_json(nlohmann::json::parse(body).at("mask"));
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(BackendError::Kind::Protocol,
                         std::string("segment response is malformed: ") + e.what());
    }
    if (mask.width != image.width || mask.height != image.height) {
      throw BackendError(BackendError::Kind::Protocol,
                         "segment mask dimensions do not match the image");
    }
    for (int y = 0; y < mask.height; ++y) {
      for (int x = 0; x < mask.width; ++x) {
        if (mask.get(x, y) && !box.contains_point(x, y)) {
          throw BackendError(BackendError::Kind::Protocol,
                             "segment mask sets pixels outside the requested box");
        }
      }
    }
    return mask;
  }

  Image inpaint(const Image& image, const Mask& mask) override {
    if (mask.width != image.width || mask.height != image.height) {
      throw ContractError("inpaint requires mask dimensions equal to the image");
    }
    const std::string body = post(config_.inpaint_url, wire::inpaint_request(image, mask));
    Image out;
    try {
      out = wire::image_from_json(nlohmann::json::parse(body).at("image_png_base64"));
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(BackendError::Kind::Protocol,
                         std::string("inpaint response is malformed: ") + e.what());
    }
    if (out.width != image.width || out.height != image.height) {
      throw BackendError(BackendError::Kind::Protocol,
                         "inpaint response image dimensions do not match the input");
    }
    return out;
  }

 private:
  std::string post(const std::string& url, const std::string& body) {
    const detail::SplitUrl split = detail::split_url(url);
    httplib::Headers headers;
    if (!config_.credential_env.empty()) {
      if (const char* token = std::getenv(config_.credential_env.c_str());
          token && *token != '\0') {
        headers.emplace("Authorization", std::string("Bearer ") + token);
      }
    }

    std::string last_failure = "no attempts made";
    int last_status = 0;
    const int attempts = 1 + std::max(0, config_.max_retries);
    for (int attempt = 0; attempt < attempts; ++attempt) {
      if (attempt > 0) {
        const auto delay = std::chrono::milliseconds(
            static_cast<long long>(config_.retry_base_ms) * (1LL << (attempt - 1)));
        std::this_thread::sleep_for(delay);
      }
      httplib::Client client(split.base);
      client.set_connection_timeout(config_.timeout_ms / 1000,
                                    (config_.timeout_ms % 1000) * 1000);
      client.set_read_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
      client.set_write_timeout(config_.timeout_ms / 1000, (config_.timeout_ms % 1000) * 1000);
      httplib::Result res = client.Post(split.path, headers, body, "application/json");
      if (!res) {
        last_failure = "transport failure (" + httplib::to_string(res.error()) + ") calling " + url;
        last_status = 0;
        continue;
      }
      if (res->status >= 200 && res->status < 300) return res->body;
      if (res->status >= 500) {
        last_failure = "server error " + std::to_string(res->status) + " calling " + url;
        last_status = res->status;
        continue;
      }
      throw BackendError(BackendError::Kind::HttpStatus,
                         "request to " + url + " failed with status " +
                             std::to_string(res->status),
                         res->status);
    }
    if (last_status != 0) {
      throw BackendError(BackendError::Kind::HttpStatus,
                         last_failure + " after " + std::to_string(attempts) + " attempts",
                         last_status);
    }
    throw BackendError(BackendError::Kind::Transport,
                       last_failure + " after " + std::to_string(attempts) + " attempts");
  }

  BackendConfig config_;
};

inline BackendSet make_http_backend(const BackendConfig& config) {
  auto backend = std::make_shared<HttpBackend>(config);
  BackendSet set;
  set.scaffold_provider = backend;
  set.detector = backend;
  set.segmenter = backend;
  set.inpainter = backend;
  return set;
}

}  // namespace sprite
