#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sprite {

enum class Severity { Warning, Error };

// Machine-readable diagnostic codes. The registry is closed and documented
// in SCHEMA.md; code strings are stable API.
namespace codes {
inline constexpr const char* cycle = "E_CYCLE";
inline constexpr const char* dangling_parent = "E_DANGLING_PARENT";
inline constexpr const char* dup_id = "E_DUP_ID";
inline constexpr const char* bbox_inverted = "E_BBOX_INVERTED";
inline constexpr const char* bbox_oob = "E_BBOX_OOB";
inline constexpr const char* bbox_containment = "E_BBOX_CONTAINMENT";
inline constexpr const char* missing_field = "E_MISSING_FIELD";
inline constexpr const char* child_of_leaf = "E_CHILD_OF_LEAF";
inline constexpr const char* orphan_promoted = "W_ORPHAN_PROMOTED";
inline constexpr const char* fusion_rejected = "W_FUSION_REJECTED";
inline constexpr const char* reparented = "W_REPARENTED";
inline constexpr const char* box_collapsed = "W_BOX_COLLAPSED";
inline constexpr const char* unknown_tag = "W_UNKNOWN_TAG";
inline constexpr const char* unsupported_feature = "W_UNSUPPORTED_FEATURE";
}  // namespace codes

struct Diagnostic {
  std::string code;
  std::optional<std::string> element_id;
  std::string message;
  Severity severity = Severity::Error;

  bool operator==(const Diagnostic&) const = default;
};

inline Diagnostic make_error(std::string code, std::optional<std::string> element_id,
                             std::string message) {
  return Diagnostic{std::move(code), std::move(element_id), std::move(message), Severity::Error};
}

inline Diagnostic make_warning(std::string code, std::optional<std::string> element_id,
                               std::string message) {
  return Diagnostic{std::move(code), std::move(element_id), std::move(message), Severity::Warning};
}

/// One diagnostic per line: "<severity> <code> <element_id>: <message>".
inline std::string format_diagnostic(const Diagnostic& d) {
  std::ostringstream out;
  out << (d.severity == Severity::Error ? "error" : "warning") << ' ' << d.code << ' '
      << (d.element_id ? *d.element_id : "-") << ": " << d.message;
  return out.str();
}

inline bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  for (const Diagnostic& d : diagnostics) {
    if (d.severity == Severity::Error) return true;
  }
  return false;
}

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input text (YAML, XML, JSON) that could not be read at all.
struct ParseError : Error {
  using Error::Error;
};

/// Well-formed input that does not satisfy the scaffold schema.
struct SchemaError : Error {
  SchemaError(const std::string& message, Diagnostic diagnostic, std::string payload = {})
      : Error(message), diagnostic(std::move(diagnostic)), payload(std::move(payload)) {}

  Diagnostic diagnostic;
  // Raw backend payload when the schema violation came off the wire.
  std::string payload;
};

/// A documented precondition was violated by the caller.
struct ContractError : Error {
  using Error::Error;
};

struct CalibrationError : Error {
  using Error::Error;
};

struct GraphError : Error {
  GraphError(std::string code_, const std::string& message) : Error(message), code(std::move(code_)) {}
  std::string code;
};

struct AssetError : Error {
  using Error::Error;
};

struct IOError : Error {
  using Error::Error;
};

struct BackendError : Error {
  enum class Kind { Timeout, Transport, HttpStatus, Protocol };

  BackendError(Kind kind_, const std::string& message, int status_ = 0)
      : Error(message), kind(kind_), status(status_) {}

  Kind kind;
  int status = 0;  // HTTP status when kind == HttpStatus
};

}  // namespace sprite
