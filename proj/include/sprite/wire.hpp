#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "sprite/backend.hpp"
#include "sprite/png_io.hpp"
#include "sprite/raster.hpp"
#include "sprite/util.hpp"

// JSON-over-HTTP wire schemas for the four backend roles; the byte formats
// are documented in WIRE.md and exercised from both sides by the test suite.
namespace sprite::wire {

inline nlohmann::ordered_json image_to_json(const Image& image) {
  return nlohmann::ordered_json(base64_encode(encode_png(image)));
}

inline Image image_from_json(const nlohmann::json& value) {
  return decode_png(base64_decode(value.get<std::string>()));
}

inline nlohmann::ordered_json mask_to_json(const Mask& mask) {
  nlohmann::ordered_json out;
  out["width"] = mask.width;
  out["height"] = mask.height;
  out["bits_base64"] = base64_encode(mask.bits);
  return out;
}

inline Mask mask_from_json(const nlohmann::json& value) {
  Mask mask;
  mask.width = value.at("width").get<int>();
  mask.height = value.at("height").get<int>();
  if (mask.width <= 0 || mask.height <= 0) {
    throw BackendError(BackendError::Kind::Protocol, "mask dimensions must be positive");
  }
  mask.bits = base64_decode(value.at("bits_base64").get<std::string>());
  const std::size_t expected = (static_cast<std::size_t>(mask.width) * mask.height + 7) / 8;
  if (mask.bits.size() != expected) {
    throw BackendError(BackendError::Kind::Protocol, "mask bit buffer has the wrong length");
  }
  mask.popcount = 0;
  for (std::uint8_t byte : mask.bits) mask.popcount += __builtin_popcount(byte);
  return mask;
}

inline nlohmann::ordered_json bbox_to_json(const BBox& box) {
  return nlohmann::ordered_json::array({box.x_min, box.y_min, box.x_max, box.y_max});
}

inline BBox bbox_from_json(const nlohmann::json& value) {
  if (!value.is_array() || value.size() != 4) {
    throw BackendError(BackendError::Kind::Protocol, "bbox_2d must be [x_min, y_min, x_max, y_max]");
  }
  return BBox{value.at(0).get<int>(), value.at(1).get<int>(), value.at(2).get<int>(),
              value.at(3).get<int>()};
}

inline std::string scaffold_request(const Image& image, const std::string& prompt) {
  nlohmann::ordered_json body;
  body["image_png_base64"] = image_to_json(image);
  body["prompt"] = prompt;
  return body.dump(-1, ' ', true);
}

inline std::string detect_request(const Image& image, const std::string& phrase) {
  nlohmann::ordered_json body;
  body["image_png_base64"] = image_to_json(image);
  body["phrase"] = phrase;
  return body.dump(-1, ' ', true);
}

inline std::string segment_request(const Image& image, const BBox& box,
                                   const std::string& phrase) {
  nlohmann::ordered_json body;
  body["image_png_base64"] = image_to_json(image);
  body["phrase"] = phrase;
  body["bbox_2d"] = bbox_to_json(box);
  return body.dump(-1, ' ', true);
}

inline std::string inpaint_request(const Image& image, const Mask& mask) {
  nlohmann::ordered_json body;
  body["image_png_base64"] = image_to_json(image);
  body["mask"] = mask_to_json(mask);
  return body.dump(-1, ' ', true);
}

inline std::string scaffold_response(const std::string& scaffold_yaml) {
  nlohmann::ordered_json body;
  body["scaffold_yaml"] = scaffold_yaml;
  return body.dump(-1, ' ', true);
}

inline std::string detect_response(const DetectionResult& result) {
  nlohmann::ordered_json body;
  nlohmann::ordered_json detections = nlohmann::ordered_json::array();
  for (const Detection& d : result.detections) {
    nlohmann::ordered_json item;
    item["bbox_2d"] = bbox_to_json(d.bbox);
    item["score"] = d.score;
    item["phrase"] = d.phrase;
    detections.push_back(std::move(item));
  }
  body["detections"] = std::move(detections);
  return body.dump(-1, ' ', true);
}

inline std::string segment_response(const Mask& mask) {
  nlohmann::ordered_json body;
  body["mask"] = mask_to_json(mask);
  return body.dump(-1, ' ', true);
}

inline std::string inpaint_response(const Image& image) {
  nlohmann::ordered_json body;
  body["image_png_base64"] = image_to_json(image);
  return body.dump(-1, ' ', true);
}

}  // namespace sprite::wire
