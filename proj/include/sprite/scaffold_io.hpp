#pragma once

#include <cctype>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <yaml-cpp/yaml.h>

#include <json.hpp>

#include "sprite/scaffold.hpp"
#include "sprite/validate.hpp"

namespace sprite {

enum class ScaffoldFormat { Yaml, CanonicalJson };

namespace detail {

inline bool is_integer_literal(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

inline bool looks_numeric(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  bool digits = false, dot = false, exponent = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits = true;
    } else if (c == '.' && !dot && !exponent) {
      dot = true;
    } else if ((c == 'e' || c == 'E') && digits && !exponent) {
      exponent = true;
      if (i + 1 < s.size() && (s[i + 1] == '-' || s[i + 1] == '+')) ++i;
      digits = false;
    } else {
      return false;
    }
  }
  return digits;
}

inline bool is_reserved_word(const std::string& s) {
  std::string lower;
  lower.reserve(s.size());
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return lower == "null" || lower == "~" || lower == "true" || lower == "false" ||
         lower == "yes" || lower == "no" || lower == "on" || lower == "off";
}

// Conservative: quote anything that could change meaning as a plain scalar.
inline bool scalar_needs_quoting(const std::string& s) {
  if (s.empty()) return true;
  if (std::isspace(static_cast<unsigned char>(s.front())) ||
      std::isspace(static_cast<unsigned char>(s.back()))) {
    return true;
  }
  static const std::string kUnsafeFirst = "-?:,[]{}&*!|>'\"%@`";
  if (kUnsafeFirst.find(s.front()) != std::string::npos) return true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x20 || c == '#') return true;
    if (s[i] == ':' && (i + 1 == s.size() || s[i + 1] == ' ')) return true;
  }
  return is_reserved_word(s) || looks_numeric(s);
}

inline std::string quoted_scalar(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\x%02x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  out += '"';
  return out;
}

inline std::string yaml_scalar(const std::string& s) {
  return scalar_needs_quoting(s) ? quoted_scalar(s) : s;
}

inline void emit_extra_value(std::ostream& out, const ExtraValue& value, int indent);

inline void emit_extra_entry(std::ostream& out, const std::string& key, const ExtraValue& value,
                             int indent) {
  const std::string pad(indent, ' ');
  out << pad << yaml_scalar(key) << ':';
  switch (value.kind) {
    case ExtraValue::Kind::Null:
      out << " null\n";
      break;
    case ExtraValue::Kind::Scalar:
      out << ' ' << yaml_scalar(value.scalar) << '\n';
      break;
    case ExtraValue::Kind::Sequence:
      if (value.items.empty()) {
        out << " []\n";
      } else {
        out << '\n';
        emit_extra_value(out, value, indent);
      }
      break;
    case ExtraValue::Kind::Mapping:
      if (value.entries.empty()) {
        out << " {}\n";
      } else {
        out << '\n';
        for (const auto& [k, v] : value.entries) emit_extra_entry(out, k, v, indent + 2);
      }
      break;
  }
}

inline void emit_extra_value(std::ostream& out, const ExtraValue& value, int indent) {
  const std::string pad(indent, ' ');
  for (const ExtraValue& item : value.items) {
    switch (item.kind) {
      case ExtraValue::Kind::Null:
        out << pad << "- null\n";
        break;
      case ExtraValue::Kind::Scalar:
        out << pad << "- " << yaml_scalar(item.scalar) << '\n';
        break;
      case ExtraValue::Kind::Sequence:
        if (item.items.empty()) {
          out << pad << "- []\n";
        } else {
          out << pad << "-\n";
          emit_extra_value(out, item, indent + 2);
        }
        break;
      case ExtraValue::Kind::Mapping:
        if (item.entries.empty()) {
          out << pad << "- {}\n";
        } else {
          bool first = true;
          for (const auto& [k, v] : item.entries) {
            if (first) {
              std::ostringstream head;
              emit_extra_entry(head, k, v, 0);
              out << pad << "- ";
              // Re-indent continuation lines of nested containers.
              std::string text = head.str();
              std::size_t pos = 0;
              bool first_line = true;
              while (pos < text.size()) {
                std::size_t nl = text.find('\n', pos);
                if (first_line) {
                  out << text.substr(pos, nl - pos) << '\n';
                  first_line = false;
                } else {
                  out << pad << "  " << text.substr(pos, nl - pos) << '\n';
                }
                pos = nl + 1;
              }
              first = false;
            } else {
              emit_extra_entry(out, k, v, indent + 2);
            }
          }
        }
        break;
    }
  }
}

inline ExtraValue node_to_extra(const YAML::Node& node) {
  ExtraValue value;
  switch (node.Type()) {
    case YAML::NodeType::Null:
    case YAML::NodeType::Undefined:
      value.kind = ExtraValue::Kind::Null;
      break;
    case YAML::NodeType::Scalar:
      value.kind = ExtraValue::Kind::Scalar;
      value.scalar = node.Scalar();
      break;
    case YAML::NodeType::Sequence:
      value.kind = ExtraValue::Kind::Sequence;
      for (const YAML::Node& item : node) value.items.push_back(node_to_extra(item));
      break;
    case YAML::NodeType::Map:
      value.kind = ExtraValue::Kind::Mapping;
      for (const auto& entry : node) {
        if (!entry.first.IsScalar()) {
          throw SchemaError("extras mapping keys must be scalars",
                            make_error(codes::missing_field, std::nullopt,
                                       "extras mapping keys must be scalars"));
        }
        value.entries.emplace_back(entry.first.Scalar(), node_to_extra(entry.second));
      }
      break;
  }
  return value;
}

inline nlohmann::ordered_json extra_to_json(const ExtraValue& value) {
  switch (value.kind) {
    case ExtraValue::Kind::Null:
      return nullptr;
    case ExtraValue::Kind::Scalar:
      return value.scalar;
    case ExtraValue::Kind::Sequence: {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const ExtraValue& item : value.items) arr.push_back(extra_to_json(item));
      return arr;
    }
    case ExtraValue::Kind::Mapping: {
      nlohmann::ordered_json obj = nlohmann::ordered_json::object();
      for (const auto& [k, v] : value.entries) obj[k] = extra_to_json(v);
      return obj;
    }
  }
  return nullptr;
}

[[noreturn]] inline void schema_fail(const std::string& message,
                                     std::optional<std::string> element_id = std::nullopt) {
  throw SchemaError(message, make_error(codes::missing_field, std::move(element_id), message));
}

inline long long require_int(const YAML::Node& node, const std::string& what,
                             const std::optional<std::string>& element_id = std::nullopt) {
  if (!node.IsScalar() || !is_integer_literal(node.Scalar())) {
    schema_fail(what + " must be an integer", element_id);
  }
  return std::stoll(node.Scalar());
}

}  // namespace detail

/// Parses a scaffold document. Accepts YAML and, because JSON is a YAML
/// subset, the canonical JSON twin as well. Unknown keys are preserved in
/// extras. Elements without an explicit id get `<label>_<index>` ids.
inline Scaffold parse_scaffold(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ParseError(std::string("malformed YAML: ") + e.what());
  }
  if (!root.IsMap()) {
    detail::schema_fail("scaffold document must be a mapping");
  }

  Scaffold scaffold;
  bool saw_width = false, saw_height = false, saw_elements = false;
  YAML::Node elements_node;

  for (const auto& entry : root) {
    if (!entry.first.IsScalar()) detail::schema_fail("document keys must be scalars");
    const std::string key = entry.first.Scalar();
    const YAML::Node& value = entry.second;
    if (key == "canvas_width") {
      if (saw_width) detail::schema_fail("duplicate key canvas_width");
      scaffold.canvas_width = static_cast<int>(detail::require_int(value, "canvas_width"));
      saw_width = true;
    } else if (key == "canvas_height") {
      if (saw_height) detail::schema_fail("duplicate key canvas_height");
      scaffold.canvas_height = static_cast<int>(detail::require_int(value, "canvas_height"));
      saw_height = true;
    } else if (key == "source_image") {
      if (value.IsNull()) continue;
      if (!value.IsScalar()) detail::schema_fail("source_image must be a scalar");
      scaffold.source_image = value.Scalar();
    } else if (key == "phase") {
      if (!value.IsScalar()) detail::schema_fail("phase must be a scalar");
      const std::optional<Phase> phase = parse_phase(value.Scalar());
      if (!phase) detail::schema_fail("unknown phase '" + value.Scalar() + "'");
      scaffold.phase = *phase;
    } else if (key == "elements") {
      if (saw_elements) detail::schema_fail("duplicate key elements");
      elements_node = value;
      saw_elements = true;
    } else {
      scaffold.extras.emplace_back(key, detail::node_to_extra(value));
    }
  }

  if (!saw_width) detail::schema_fail("missing required field canvas_width");
  if (!saw_height) detail::schema_fail("missing required field canvas_height");
  if (!saw_elements) detail::schema_fail("missing required field elements");
  if (scaffold.canvas_width <= 0 || scaffold.canvas_height <= 0) {
    detail::schema_fail("canvas dimensions must be positive");
  }
  if (!elements_node.IsSequence() && !elements_node.IsNull()) {
    detail::schema_fail("elements must be a sequence");
  }

  std::size_t index = 0;
  for (const YAML::Node& item : elements_node) {
    if (!item.IsMap()) detail::schema_fail("element " + std::to_string(index) + " must be a mapping");
    UIElement element;
    bool saw_label = false, saw_bbox = false, saw_prompt = false, saw_id = false;
    for (const auto& entry : item) {
      if (!entry.first.IsScalar()) detail::schema_fail("element keys must be scalars");
      const std::string key = entry.first.Scalar();
      const YAML::Node& value = entry.second;
      if (key == "id") {
        if (!value.IsScalar()) detail::schema_fail("id must be a scalar");
        element.id = value.Scalar();
        saw_id = true;
      } else if (key == "label") {
        if (!value.IsScalar()) detail::schema_fail("label must be a scalar");
        element.label = parse_label(value.Scalar());
        saw_label = true;
      } else if (key == "parent") {
        if (value.IsNull()) {
          element.parent.reset();
        } else if (value.IsScalar()) {
          element.parent = value.Scalar();
        } else {
          detail::schema_fail("parent must be a scalar or null");
        }
      } else if (key == "bbox_2d") {
        if (!value.IsSequence() || value.size() != 4) {
          detail::schema_fail("bbox_2d must be a sequence of 4 integers",
                              saw_id ? std::optional<std::string>(element.id) : std::nullopt);
        }
        const long long coords[4] = {
            detail::require_int(value[0], "bbox_2d[0]"), detail::require_int(value[1], "bbox_2d[1]"),
            detail::require_int(value[2], "bbox_2d[2]"), detail::require_int(value[3], "bbox_2d[3]")};
        element.bbox = BBox{static_cast<int>(coords[0]), static_cast<int>(coords[1]),
                            static_cast<int>(coords[2]), static_cast<int>(coords[3])};
        saw_bbox = true;
      } else if (key == "seg_prompt") {
        if (value.IsNull()) {
          element.seg_prompt.clear();
        } else if (value.IsScalar()) {
          element.seg_prompt = value.Scalar();
        } else {
          detail::schema_fail("seg_prompt must be a scalar");
        }
        saw_prompt = true;
      } else if (key == "asset_path") {
        if (value.IsNull()) {
          element.asset_path.reset();
        } else if (value.IsScalar()) {
          element.asset_path = value.Scalar();
        } else {
          detail::schema_fail("asset_path must be a scalar or null");
        }
      } else {
        element.extras.emplace_back(key, detail::node_to_extra(value));
      }
    }
    const std::optional<std::string> where =
        saw_id ? std::optional<std::string>(element.id) : std::nullopt;
    if (!saw_label) detail::schema_fail("element missing required field label", where);
    if (!saw_bbox) detail::schema_fail("element missing required field bbox_2d", where);
    if (!saw_prompt) detail::schema_fail("element missing required field seg_prompt", where);
    if (!saw_id) element.id = to_string(element.label) + "_" + std::to_string(index);
    scaffold.elements.push_back(std::move(element));
    ++index;
  }
  return scaffold;
}

/// Serialization without the validity precondition; exists so tooling and
/// tests can materialize intentionally faulty documents such as the injected
/// fault corpus. Production paths use serialize_scaffold.
inline std::string serialize_scaffold_unchecked(const Scaffold& scaffold,
                                                ScaffoldFormat format = ScaffoldFormat::Yaml) {
  if (format == ScaffoldFormat::CanonicalJson) {
    nlohmann::ordered_json doc;
    doc["canvas_width"] = scaffold.canvas_width;
    doc["canvas_height"] = scaffold.canvas_height;
    doc["source_image"] = scaffold.source_image;
    doc["phase"] = to_string(scaffold.phase);
    nlohmann::ordered_json elements = nlohmann::ordered_json::array();
    for (const UIElement& e : scaffold.elements) {
      nlohmann::ordered_json item;
      item["id"] = e.id;
      item["label"] = to_string(e.label);
      if (e.parent) {
        item["parent"] = *e.parent;
      } else {
        item["parent"] = nullptr;
      }
      item["bbox_2d"] = {e.bbox.x_min, e.bbox.y_min, e.bbox.x_max, e.bbox.y_max};
      item["seg_prompt"] = e.seg_prompt;
      if (e.asset_path) item["asset_path"] = *e.asset_path;
      for (const auto& [k, v] : e.extras) item[k] = detail::extra_to_json(v);
      elements.push_back(std::move(item));
    }
    doc["elements"] = std::move(elements);
    for (const auto& [k, v] : scaffold.extras) doc[k] = detail::extra_to_json(v);
    return doc.dump(-1, ' ', true);
  }

  std::ostringstream out;
  out << "canvas_width: " << scaffold.canvas_width << '\n';
  out << "canvas_height: " << scaffold.canvas_height << '\n';
  out << "source_image: "
      << (scaffold.source_image.empty() ? "\"\"" : detail::yaml_scalar(scaffold.source_image))
      << '\n';
  out << "phase: " << to_string(scaffold.phase) << '\n';
  if (scaffold.elements.empty()) {
    out << "elements: []\n";
  } else {
    out << "elements:\n";
    for (const UIElement& e : scaffold.elements) {
      out << "- id: " << detail::yaml_scalar(e.id) << '\n';
      out << "  label: " << detail::yaml_scalar(to_string(e.label)) << '\n';
      out << "  parent: " << (e.parent ? detail::yaml_scalar(*e.parent) : "null") << '\n';
      out << "  bbox_2d: [" << e.bbox.x_min << ", " << e.bbox.y_min << ", " << e.bbox.x_max << ", "
          << e.bbox.y_max << "]\n";
      out << "  seg_prompt: "
          << (e.seg_prompt.empty() ? "\"\"" : detail::yaml_scalar(e.seg_prompt)) << '\n';
      if (e.asset_path) out << "  asset_path: " << detail::yaml_scalar(*e.asset_path) << '\n';
      for (const auto& [k, v] : e.extras) detail::emit_extra_entry(out, k, v, 2);
    }
  }
  for (const auto& [k, v] : scaffold.extras) detail::emit_extra_entry(out, k, v, 0);
  return out.str();
}

/// Deterministic byte output. YAML: block style, 2-space indentation, fixed
/// key order (id, label, parent, bbox_2d, seg_prompt, asset_path), extras
/// last in document order. Canonical JSON: same key order, no insignificant
/// whitespace, non-ASCII escaped (\uXXXX) for interop; extras scalars are
/// carried as JSON strings so values survive cross-format round trips.
/// Requires a scaffold with no lenient-mode validation errors.
inline std::string serialize_scaffold(const Scaffold& scaffold,
                                      ScaffoldFormat format = ScaffoldFormat::Yaml) {
  const std::vector<Diagnostic> diagnostics = validate(scaffold, ValidationMode::Lenient);
  if (has_errors(diagnostics)) {
    std::string detail;
    for (const Diagnostic& d : diagnostics) {
      if (d.severity != Severity::Error) continue;
      if (!detail.empty()) detail += "; ";
      detail += format_diagnostic(d);
    }
    throw ContractError("serialize_scaffold requires a scaffold with no validation errors: " +
                        detail);
  }
  return serialize_scaffold_unchecked(scaffold, format);
}

inline Scaffold load_scaffold_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open scaffold file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scaffold(buffer.str());
}

}  // namespace sprite
