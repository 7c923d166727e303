#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sprite/calibration.hpp"
#include "sprite/scaffold_io.hpp"
#include "sprite/synthesis.hpp"
#include "sprite/util.hpp"

namespace sprite {

/// Ground truth normalized into a scaffold (strict-valid), plus any loader
/// diagnostics (skipped layout constructs, unknown tags).
struct GroundTruth {
  Scaffold scaffold;
  std::vector<Diagnostic> diagnostics;
};

enum class GroundTruthKind { DesignJson, UxmlPair };

struct MatchedPair {
  std::string pred_id;
  std::string truth_id;
  double iou = 0.0;

  bool operator==(const MatchedPair&) const = default;
};

namespace detail {

// O(n^3) Hungarian algorithm (potentials + shortest augmenting paths) on a
// square cost matrix; returns the column assigned to each row.
inline std::vector<int> solve_assignment_min(const std::vector<std::vector<double>>& cost) {
  const int n = static_cast<int>(cost.size());
  if (n == 0) return {};
  const double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double current = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (current < minv[j]) {
          minv[j] = current;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] >= 1) assignment[p[j] - 1] = j - 1;
  }
  return assignment;
}

// Maximum achievable weight sum given some (row, col) pairs already forced
// out of the matrix.
inline double best_total_excluding(const std::vector<std::vector<double>>& weight,
                                   const std::vector<bool>& row_taken,
                                   const std::vector<bool>& col_taken) {
  std::vector<int> rows, cols;
  for (int i = 0; i < static_cast<int>(weight.size()); ++i) {
    if (!row_taken[i]) rows.push_back(i);
  }
  for (int j = 0; j < static_cast<int>(weight.empty() ? 0 : weight[0].size()); ++j) {
    if (!col_taken[j]) cols.push_back(j);
  }
  const int n = static_cast<int>(std::max(rows.size(), cols.size()));
  if (n == 0) return 0.0;
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
      cost[i][j] = -weight[rows[i]][cols[j]];
    }
  }
  const std::vector<int> assignment = solve_assignment_min(cost);
  double total = 0.0;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    if (assignment[i] < static_cast<int>(cols.size())) {
      total += weight[rows[i]][cols[assignment[i]]];
    }
  }
  return total;
}

inline bool labels_match(const ElementLabel& a, const ElementLabel& b) {
  if (a.kind != b.kind) return false;
  return a.kind != ElementKind::Custom || a.raw == b.raw;
}

}  // namespace detail

/// Optimal one-to-one assignment maximizing total IoU over label-identical
/// pairs with IoU >= min_iou, solved exactly; among equal-total solutions the
/// (pred_id, truth_id)-lexicographically first matching is returned.
inline std::vector<MatchedPair> match_elements(const Scaffold& pred, const GroundTruth& truth,
                                               double min_iou = 0.5) {
  const auto& pred_elements = pred.elements;
  const auto& truth_elements = truth.scaffold.elements;
  const int np = static_cast<int>(pred_elements.size());
  const int nt = static_cast<int>(truth_elements.size());
  if (np == 0 || nt == 0) return {};

  std::vector<std::vector<double>> weight(np, std::vector<double>(nt, 0.0));
  struct Candidate {
    std::string pred_id, truth_id;
    int i, j;
    double iou;
  };
  std::vector<Candidate> candidates;
  for (int i = 0; i < np; ++i) {
    for (int j = 0; j < nt; ++j) {
      if (!detail::labels_match(pred_elements[i].label, truth_elements[j].label)) continue;
      const double overlap = iou(pred_elements[i].bbox, truth_elements[j].bbox);
      if (overlap < min_iou) continue;
      weight[i][j] = overlap;
      candidates.push_back(Candidate{pred_elements[i].id, truth_elements[j].id, i, j, overlap});
    }
  }
  if (candidates.empty()) return {};

  std::vector<bool> row_taken(np, false), col_taken(nt, false);
  const double best_total = detail::best_total_excluding(weight, row_taken, col_taken);
  const double eps = 1e-9 * std::max(1.0, std::abs(best_total));

  // Greedy lexicographic refinement: force each candidate pair in id order
  // whenever doing so still permits an optimal completion.
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    return std::tie(a.pred_id, a.truth_id) < std::tie(b.pred_id, b.truth_id);
  });
  std::vector<MatchedPair> matches;
  double forced_total = 0.0;
  for (const Candidate& candidate : candidates) {
    if (row_taken[candidate.i] || col_taken[candidate.j]) continue;
    row_taken[candidate.i] = true;
    col_taken[candidate.j] = true;
    const double completion = detail::best_total_excluding(weight, row_taken, col_taken);
    if (forced_total + candidate.iou + completion + eps >= best_total) {
      forced_total += candidate.iou;
      matches.push_back(MatchedPair{candidate.pred_id, candidate.truth_id, candidate.iou});
    } else {
      row_taken[candidate.i] = false;
      col_taken[candidate.j] = false;
    }
  }
  return matches;  // already (pred_id, truth_id) sorted by construction
}

struct SerializationEfficiency {
  std::int64_t yaml_bytes = 0;
  std::int64_t json_bytes = 0;
  double ratio = 0.0;  // yaml / json, the byte ratio used as a token proxy
};

inline SerializationEfficiency measure_serialization_efficiency(const Scaffold& scaffold) {
  SerializationEfficiency result;
  result.yaml_bytes =
      static_cast<std::int64_t>(serialize_scaffold(scaffold, ScaffoldFormat::Yaml).size());
  result.json_bytes =
      static_cast<std::int64_t>(serialize_scaffold(scaffold, ScaffoldFormat::CanonicalJson).size());
  result.ratio = result.json_bytes == 0
                     ? 0.0
                     : static_cast<double>(result.yaml_bytes) / static_cast<double>(result.json_bytes);
  return result;
}

struct EvalReport {
  std::vector<MatchedPair> matches;
  std::vector<std::string> unmatched_pred;
  std::vector<std::string> unmatched_truth;
  double mean_matched_iou = 0.0;
  double detection_recall = 0.0;
  double detection_precision = 0.0;
  double parent_consistency = 0.0;
  double serialization_ratio = 0.0;
};

/// Full fidelity report for a prediction against ground truth. Empty-set
/// conventions: recall/precision/parent consistency over zero candidates are
/// vacuously 1.0; the mean IoU over zero matches is 0.0.
inline EvalReport evaluate(const Scaffold& pred, const GroundTruth& truth, double min_iou = 0.5) {
  EvalReport report;
  report.matches = match_elements(pred, truth, min_iou);

  std::map<std::string, std::string> truth_of_pred;
  std::map<std::string, std::string> pred_of_truth;
  double iou_sum = 0.0;
  for (const MatchedPair& pair : report.matches) {
    truth_of_pred[pair.pred_id] = pair.truth_id;
    pred_of_truth[pair.truth_id] = pair.pred_id;
    iou_sum += pair.iou;
  }
  for (const UIElement& e : pred.elements) {
    if (truth_of_pred.find(e.id) == truth_of_pred.end()) report.unmatched_pred.push_back(e.id);
  }
  for (const UIElement& e : truth.scaffold.elements) {
    if (pred_of_truth.find(e.id) == pred_of_truth.end()) report.unmatched_truth.push_back(e.id);
  }

  const std::size_t matched = report.matches.size();
  report.mean_matched_iou = matched == 0 ? 0.0 : iou_sum / static_cast<double>(matched);
  report.detection_recall = truth.scaffold.elements.empty()
                                ? 1.0
                                : static_cast<double>(matched) / truth.scaffold.elements.size();
  report.detection_precision =
      pred.elements.empty() ? 1.0 : static_cast<double>(matched) / pred.elements.size();

  // A matched pair is parent-consistent when both sit at the root or both
  // parents are matched to each other.
  std::size_t consistent = 0;
  for (const MatchedPair& pair : report.matches) {
    const UIElement* p = pred.find(pair.pred_id);
    const UIElement* t = truth.scaffold.find(pair.truth_id);
    if (!p || !t) continue;
    if (!p->parent && !t->parent) {
      ++consistent;
    } else if (p->parent && t->parent) {
      auto it = truth_of_pred.find(*p->parent);
      if (it != truth_of_pred.end() && it->second == *t->parent) ++consistent;
    }
  }
  report.parent_consistency =
      matched == 0 ? 1.0 : static_cast<double>(consistent) / static_cast<double>(matched);
  report.serialization_ratio = measure_serialization_efficiency(pred).ratio;
  return report;
}

inline std::string eval_report_json(const EvalReport& report) {
  nlohmann::ordered_json out;
  nlohmann::ordered_json matches = nlohmann::ordered_json::array();
  for (const MatchedPair& pair : report.matches) {
    nlohmann::ordered_json item;
    item["pred_id"] = pair.pred_id;
    item["truth_id"] = pair.truth_id;
    item["iou"] = pair.iou;
    matches.push_back(std::move(item));
  }
  out["matches"] = std::move(matches);
  out["unmatched_pred"] = report.unmatched_pred;
  out["unmatched_truth"] = report.unmatched_truth;
  out["mean_matched_iou"] = report.mean_matched_iou;
  out["detection_recall"] = report.detection_recall;
  out["detection_precision"] = report.detection_precision;
  out["parent_consistency"] = report.parent_consistency;
  out["serialization_ratio"] = report.serialization_ratio;
  return out.dump(-1, ' ', true);
}

inline std::string eval_report_table(const EvalReport& report) {
  std::ostringstream out;
  out << "matched pairs (pred <-> truth, IoU):\n";
  for (const MatchedPair& pair : report.matches) {
    out << "  " << pair.pred_id << " <-> " << pair.truth_id << "  " << pair.iou << "\n";
  }
  if (report.matches.empty()) out << "  (none)\n";
  if (!report.unmatched_pred.empty()) {
    out << "unmatched predictions:";
    for (const std::string& id : report.unmatched_pred) out << ' ' << id;
    out << '\n';
  }
  if (!report.unmatched_truth.empty()) {
    out << "unmatched ground truth:";
    for (const std::string& id : report.unmatched_truth) out << ' ' << id;
    out << '\n';
  }
  out << "mean matched IoU:    " << report.mean_matched_iou << '\n';
  out << "detection recall:    " << report.detection_recall << '\n';
  out << "detection precision: " << report.detection_precision << '\n';
  out << "parent consistency:  " << report.parent_consistency << '\n';
  out << "byte ratio (token proxy, yaml/json): " << report.serialization_ratio << '\n';
  return out.str();
}

namespace detail {

inline ElementLabel design_node_label(const std::string& type) {
  static const std::map<std::string, ElementKind> kDesignTypes = {
      {"FRAME", ElementKind::Panel},         {"GROUP", ElementKind::Panel},
      {"COMPONENT", ElementKind::Panel},     {"COMPONENT_SET", ElementKind::Panel},
      {"INSTANCE", ElementKind::Panel},      {"CANVAS", ElementKind::Panel},
      {"TEXT", ElementKind::Text},           {"RECTANGLE", ElementKind::Image},
      {"ELLIPSE", ElementKind::Image},       {"VECTOR", ElementKind::Image},
      {"LINE", ElementKind::Image},          {"STAR", ElementKind::Image},
      {"POLYGON", ElementKind::Image},       {"BOOLEAN_OPERATION", ElementKind::Image},
      {"IMAGE", ElementKind::Image},
  };
  auto it = kDesignTypes.find(type);
  if (it != kDesignTypes.end()) return make_label(it->second);
  // Allow the closed tag set directly so hand-written fixtures can be exact.
  const ElementLabel direct = parse_label(type);
  return direct;
}

inline void load_design_node(const nlohmann::json& node, const std::optional<std::string>& parent,
                             GroundTruth& out) {
  const std::string name = node.value("name", std::string{});
  const std::string type = node.value("type", std::string{"FRAME"});
  std::string id = node.value("id", name);

  const bool auto_layout =
      node.contains("layoutMode") && node.at("layoutMode").get<std::string>() != "NONE";
  std::optional<std::string> parent_for_children = parent;
  if (auto_layout) {
    out.diagnostics.push_back(make_warning(
        codes::unsupported_feature, id,
        "auto-layout node '" + id + "' skipped; only absolute coordinates are supported"));
  } else {
    if (id.empty()) {
      throw ParseError("design JSON node without id or name");
    }
    if (!node.contains("absoluteBoundingBox")) {
      throw ParseError("design JSON node '" + id + "' lacks absoluteBoundingBox");
    }
    const nlohmann::json& box = node.at("absoluteBoundingBox");
    const double x = box.at("x").get<double>();
    const double y = box.at("y").get<double>();
    const double w = box.at("width").get<double>();
    const double h = box.at("height").get<double>();
    UIElement element;
    element.id = id;
    element.label = design_node_label(type);
    element.parent = parent;
    element.bbox = BBox{static_cast<int>(std::llround(x)), static_cast<int>(std::llround(y)),
                        static_cast<int>(std::llround(x + w)), static_cast<int>(std::llround(y + h))};
    element.seg_prompt = name.empty() ? id : name;
    out.scaffold.elements.push_back(std::move(element));
    parent_for_children = id;
  }
  if (node.contains("children")) {
    for (const nlohmann::json& child : node.at("children")) {
      load_design_node(child, parent_for_children, out);
    }
  }
}

}  // namespace detail

/// Loads benchmark ground truth. design_json: the documented design-export
/// subset (absolute-coordinate node tree, see GT_FORMAT.md). uxml_pair: a
/// hand-authored document plus stylesheet; `path` names the .uxml and the
/// .uss sits beside it with the same stem. The result always passes strict
/// validation; loaders throw on anything that would not.
inline GroundTruth load_ground_truth(const std::string& path, GroundTruthKind kind) {
  GroundTruth out;
  if (kind == GroundTruthKind::DesignJson) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("design JSON " + path + ": " + e.what());
    }
    try {
      out.scaffold.canvas_width = doc.at("canvas_width").get<int>();
      out.scaffold.canvas_height = doc.at("canvas_height").get<int>();
      out.scaffold.source_image = doc.value("source_image", std::string{});
      out.scaffold.phase = Phase::Scaffolded;
      const nlohmann::json& document = doc.at("document");
      if (document.contains("children")) {
        for (const nlohmann::json& child : document.at("children")) {
          detail::load_design_node(child, std::nullopt, out);
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("design JSON " + path + " is malformed: " + e.what());
    }
  } else {
    const std::string uxml_text = read_file(path);
    std::string uss_path = path;
    const std::size_t dot = uss_path.find_last_of('.');
    uss_path = (dot == std::string::npos ? uss_path : uss_path.substr(0, dot)) + ".uss";
    const uss::Sheet sheet = uss::parse(read_file(uss_path));

    SceneGraph graph = parse_uxml(uxml_text);
    for (const Diagnostic& d : graph.diagnostics) out.diagnostics.push_back(d);
    const ResolvedGeometry resolved = resolve_absolute_geometry(graph, sheet);
    for (const Diagnostic& d : resolved.diagnostics) out.diagnostics.push_back(d);
    if (!resolved.canvas_width || !resolved.canvas_height) {
      throw ParseError(uss_path +
                       ": stylesheet must declare --canvas-width/--canvas-height in a :root block");
    }
    out.scaffold.canvas_width = *resolved.canvas_width;
    out.scaffold.canvas_height = *resolved.canvas_height;
    out.scaffold.phase = Phase::Scaffolded;

    std::vector<bool> keep(graph.nodes.size(), false);
    for (int node : resolved.resolved_nodes) keep[node] = true;
    for (std::size_t node = 1; node < graph.nodes.size(); ++node) {
      if (!keep[node]) continue;
      UIElement element = *graph.nodes[node].element;
      const int parent = graph.nodes[node].parent;
      element.parent = parent == SceneGraph::kRoot || !keep[parent]
                           ? std::optional<std::string>{}
                           : std::optional<std::string>{graph.node_id(parent)};
      element.seg_prompt = element.id;
      out.scaffold.elements.push_back(std::move(element));
    }
  }

  const std::vector<Diagnostic> diagnostics = validate(out.scaffold, ValidationMode::Strict);
  for (const Diagnostic& d : diagnostics) {
    if (d.severity == Severity::Error) {
      throw SchemaError("ground truth " + path + " is not strict-valid: " + format_diagnostic(d),
                        d);
    }
  }
  return out;
}

}  // namespace sprite
