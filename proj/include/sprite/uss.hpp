#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sprite/diagnostics.hpp"

namespace sprite::uss {

struct Block {
  std::string selector;
  std::vector<std::pair<std::string, std::string>> properties;

  const std::string* property(const std::string& name) const {
    for (const auto& [key, value] : properties) {
      if (key == name) return &value;
    }
    return nullptr;
  }
};

struct Sheet {
  std::vector<Block> blocks;

  const Block* block(const std::string& selector) const {
    for (const Block& b : blocks) {
      if (b.selector == selector) return &b;
    }
    return nullptr;
  }
};

namespace detail {

inline std::string strip(const std::string& s) {
  std::size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  std::size_t end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace detail

/// Minimal stylesheet reader for the USS subset this project emits:
/// `selector { prop: value; ... }` blocks and /* */ comments.
inline Sheet parse(const std::string& text) {
  Sheet sheet;
  std::string clean;
  clean.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) {
    if (text.compare(i, 2, "/*") == 0) {
      const std::size_t end = text.find("*/", i + 2);
      if (end == std::string::npos) throw ParseError("unterminated USS comment");
      i = end + 2;
    } else {
      clean.push_back(text[i]);
      ++i;
    }
  }

  std::size_t pos = 0;
  while (pos < clean.size()) {
    const std::size_t open = clean.find('{', pos);
    if (open == std::string::npos) {
      if (!detail::strip(clean.substr(pos)).empty()) {
        throw ParseError("USS has trailing content outside any block");
      }
      break;
    }
    const std::size_t close = clean.find('}', open);
    if (close == std::string::npos) throw ParseError("unterminated USS block");
    Block block;
    block.selector = detail::strip(clean.substr(pos, open - pos));
    if (block.selector.empty()) throw ParseError("USS block without a selector");
    std::string body = clean.substr(open + 1, close - open - 1);
    std::size_t cursor = 0;
    while (cursor < body.size()) {
      const std::size_t semi = body.find(';', cursor);
      const std::string declaration =
          detail::strip(semi == std::string::npos ? body.substr(cursor)
                                                  : body.substr(cursor, semi - cursor));
      cursor = semi == std::string::npos ? body.size() : semi + 1;
      if (declaration.empty()) continue;
      const std::size_t colon = declaration.find(':');
      if (colon == std::string::npos) {
        throw ParseError("USS declaration missing ':' in block '" + block.selector + "'");
      }
      block.properties.emplace_back(detail::strip(declaration.substr(0, colon)),
                                    detail::strip(declaration.substr(colon + 1)));
    }
    sheet.blocks.push_back(std::move(block));
    pos = close + 1;
  }
  return sheet;
}

/// Parses "123px" into 123. Anything else (percentages, auto, floats) is not
/// absolute pixel geometry and yields nullopt.
inline std::optional<int> pixel_value(const std::string& value) {
  if (value.size() < 3 || value.compare(value.size() - 2, 2, "px") != 0) return std::nullopt;
  const std::string number = value.substr(0, value.size() - 2);
  std::size_t i = number[0] == '-' ? 1 : 0;
  if (i == number.size()) return std::nullopt;
  for (; i < number.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(number[i]))) return std::nullopt;
  }
  return std::stoi(number);
}

}  // namespace sprite::uss
