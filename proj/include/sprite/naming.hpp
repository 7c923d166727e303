#pragma once

#include <cctype>
#include <map>
#include <string>

#include "sprite/diagnostics.hpp"
#include "sprite/scaffold.hpp"

namespace sprite {

/// Lowercases and replaces every character outside [a-z0-9_-] with '-'.
inline std::string sanitize_name(const std::string& id) {
  if (id.empty()) throw ContractError("sanitize_name requires a nonempty id");
  std::string out;
  out.reserve(id.size());
  for (unsigned char c : id) {
    const unsigned char lower = static_cast<unsigned char>(std::tolower(c));
    if ((lower >= 'a' && lower <= 'z') || (lower >= '0' && lower <= '9') || lower == '_' ||
        lower == '-') {
      out.push_back(static_cast<char>(lower));
    } else {
      out.push_back('-');
    }
  }
  return out;
}

/// Removes one collision suffix ("-2", "-3", ...) appended by the name
/// allocator. "btn-2" -> "btn"; names without the suffix pass through.
inline std::string strip_collision_suffix(const std::string& name) {
  const std::size_t dash = name.find_last_of('-');
  if (dash == std::string::npos || dash == 0 || dash + 1 == name.size()) return name;
  const std::string tail = name.substr(dash + 1);
  if (tail[0] < '2' || tail[0] > '9') return name;
  for (char c : tail) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return name;
  }
  return name.substr(0, dash);
}

/// Allocates document-unique names in first-come order; later collisions get
/// "-2", "-3", ... suffixes (the convention strip_collision_suffix inverts).
class NameAllocator {
 public:
  std::string allocate(const std::string& id) {
    const std::string base = sanitize_name(id);
    int& count = used_[base];
    ++count;
    if (count == 1) return base;
    std::string name = base + "-" + std::to_string(count);
    // The suffixed form could itself collide with an explicit id; keep bumping.
    while (used_.find(name) != used_.end()) {
      ++count;
      name = base + "-" + std::to_string(count);
    }
    used_[name] = 1;
    return name;
  }

 private:
  std::map<std::string, int> used_;
};

/// The UXML tag mapping is lossy (icon/image/grid compile to plain
/// containers). This projection applies the documented inverse table so two
/// labels compare equal exactly when their round-tripped forms do.
inline std::string projected_label_token(const ElementLabel& label) {
  switch (label.kind) {
    case ElementKind::Panel:
    case ElementKind::Icon:
    case ElementKind::Image:
    case ElementKind::Grid:
      return "panel";
    case ElementKind::Button: return "button";
    case ElementKind::Toggle: return "toggle";
    case ElementKind::ProgressBar: return "progress_bar";
    case ElementKind::Slider: return "slider";
    case ElementKind::Text: return "text";
    case ElementKind::Custom: return "~" + sanitize_name(label.raw);
  }
  return "panel";
}

}  // namespace sprite
