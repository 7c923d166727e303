#pragma once

#include <cctype>
#include <string>
#include <utility>
#include <vector>

#include "sprite/diagnostics.hpp"

namespace sprite::xml {

struct Element {
  std::string tag;  // as written, possibly prefixed ("ui:Button")
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;

  std::string local_name() const {
    const std::size_t colon = tag.find(':');
    return colon == std::string::npos ? tag : tag.substr(colon + 1);
  }

  const std::string* attribute(const std::string& name) const {
    for (const auto& [key, value] : attributes) {
      if (key == name) return &value;
    }
    return nullptr;
  }
};

namespace detail {

class Reader {
 public:
  explicit Reader(const std::string& text) : text_(text) {}

  Element parse_document() {
    skip_misc();
    if (eof()) throw ParseError("XML document has no root element");
    Element root = parse_element();
    skip_misc();
    if (!eof()) throw ParseError("XML document has content after the root element");
    return root;
  }

 private:
  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool starts_with(const char* prefix) const { return text_.compare(pos_, strlen_(prefix), prefix) == 0; }
  static std::size_t strlen_(const char* s) {
    std::size_t n = 0;
    while (s[n]) ++n;
    return n;
  }

  void skip_whitespace() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  // Whitespace, text content, declarations, comments, doctypes.
  void skip_misc() {
    while (!eof()) {
      if (std::isspace(static_cast<unsigned char>(peek()))) {
        ++pos_;
      } else if (starts_with("<?")) {
        const std::size_t end = text_.find("?>", pos_);
        if (end == std::string::npos) throw ParseError("unterminated XML declaration");
        pos_ = end + 2;
      } else if (starts_with("<!--")) {
        const std::size_t end = text_.find("-->", pos_);
        if (end == std::string::npos) throw ParseError("unterminated XML comment");
        pos_ = end + 3;
      } else if (starts_with("<!")) {
        const std::size_t end = text_.find('>', pos_);
        if (end == std::string::npos) throw ParseError("unterminated XML doctype");
        pos_ = end + 1;
      } else if (peek() != '<') {
        ++pos_;  // text content is not part of the scene structure
      } else {
        return;
      }
    }
  }

  std::string parse_name() {
    const std::size_t begin = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == ':' ||
                      peek() == '_' || peek() == '-' || peek() == '.')) {
      ++pos_;
    }
    if (pos_ == begin) throw ParseError("expected an XML name at offset " + std::to_string(pos_));
    return text_.substr(begin, pos_ - begin);
  }

  static std::string decode_entities(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out.push_back(raw[i]);
        continue;
      }
      const std::size_t end = raw.find(';', i);
      if (end == std::string::npos) throw ParseError("unterminated XML entity");
      const std::string entity = raw.substr(i + 1, end - i - 1);
      if (entity == "amp") out.push_back('&');
      else if (entity == "lt") out.push_back('<');
      else if (entity == "gt") out.push_back('>');
      else if (entity == "quot") out.push_back('"');
      else if (entity == "apos") out.push_back('\'');
      else throw ParseError("unknown XML entity &" + entity + ";");
      i = end;
    }
    return out;
  }

  Element parse_element() {
    if (eof() || peek() != '<') throw ParseError("expected '<'");
    ++pos_;
    Element element;
    element.tag = parse_name();
    while (true) {
      skip_whitespace();
      if (eof()) throw ParseError("unterminated XML tag <" + element.tag + ">");
      if (peek() == '/') {
        ++pos_;
        if (eof() || peek() != '>') throw ParseError("malformed self-closing tag");
        ++pos_;
        return element;
      }
      if (peek() == '>') {
        ++pos_;
        break;
      }
      const std::string name = parse_name();
      skip_whitespace();
      if (eof() || peek() != '=') throw ParseError("attribute '" + name + "' is missing '='");
      ++pos_;
      skip_whitespace();
      if (eof() || (peek() != '"' && peek() != '\'')) {
        throw ParseError("attribute '" + name + "' value must be quoted");
      }
      const char quote = peek();
      ++pos_;
      const std::size_t begin = pos_;
      while (!eof() && peek() != quote) ++pos_;
      if (eof()) throw ParseError("unterminated attribute value for '" + name + "'");
      element.attributes.emplace_back(name, decode_entities(text_.substr(begin, pos_ - begin)));
      ++pos_;
    }
    // Children until the matching close tag.
    while (true) {
      skip_misc();
      if (eof()) throw ParseError("missing closing tag for <" + element.tag + ">");
      if (starts_with("</")) {
        pos_ += 2;
        const std::string close = parse_name();
        if (close != element.tag) {
          throw ParseError("mismatched closing tag </" + close + "> for <" + element.tag + ">");
        }
        skip_whitespace();
        if (eof() || peek() != '>') throw ParseError("malformed closing tag </" + close + ">");
        ++pos_;
        return element;
      }
      element.children.push_back(parse_element());
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Element parse(const std::string& text) { return detail::Reader(text).parse_document(); }

inline std::string escape_attribute(const std::string& value) {
  std::string out;
  out.reserve(value.size());
  for (char c : value) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace sprite::xml
