/*
 * Copyright 2026 The unistpa Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "unistpa/reports.hpp"

#include <openssl/evp.h>

#include <array>
#include <cctype>
#include <memory>
#include <stdexcept>

#include "json.hpp"
#include "unistpa/parser.hpp"

namespace unistpa {

using json = nlohmann::json;

std::string sha256_hex(std::string_view data) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest.data(), &length) != 1) {
    throw std::runtime_error("sha256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < length; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

ReportBundle make_bundle(SafetyModel model, std::span<const Waiver> waivers) {
  ReportBundle bundle{std::move(model), {}, {}, {}, {}, {}};
  bundle.worksheet = uca_worksheet(bundle.model, waivers);
  bundle.audit = traceability_audit(bundle.model);
  bundle.coverage = coverage_metrics(bundle.model, waivers);
  bundle.loops = control_loop_audit(bundle.model);
  bundle.metadata = {std::string(kToolVersion), sha256_hex(render_canonical(bundle.model))};
  return bundle;
}

// ---------------------------------------------------------------------------
// Structured export

namespace {

json ids(const IdList& list) {
  json out = json::array();
  for (const auto& id : list) out.push_back(id.str());
  return out;
}

json ratio(const Ratio& r) {
  return {{"numerator", r.numerator}, {"denominator", r.denominator}, {"decimal", r.decimal()}};
}

std::string_view status_name(CellStatus s) {
  switch (s) {
    case CellStatus::Documented: return "documented";
    case CellStatus::Waived: return "waived";
    case CellStatus::Gap: return "gap";
  }
  return "?";
}

json model_json(const SafetyModel& m) {
  json doc = json::object();
  doc["name"] = m.name();
  doc["losses"] = json::array();
  for (const auto& l : m.losses()) {
    doc["losses"].push_back(
        {{"id", l.id.str()}, {"description", l.description}, {"safety_critical", l.safety_critical}});
  }
  doc["hazards"] = json::array();
  for (const auto& h : m.hazards()) {
    doc["hazards"].push_back(
        {{"id", h.id.str()}, {"description", h.description}, {"losses", ids(h.losses)}});
  }
  doc["nodes"] = json::array();
  for (const auto& n : m.nodes()) {
    doc["nodes"].push_back({{"id", n.id.str()},
                            {"stage", stage_tag(n.stage)},
                            {"kind", node_kind_keyword(n.kind)},
                            {"label", n.label}});
  }
  doc["edges"] = json::array();
  for (const auto& e : m.edges()) {
    doc["edges"].push_back({{"from", e.from.str()},
                            {"to", e.to.str()},
                            {"kind", edge_kind_keyword(e.kind)},
                            {"label", e.label},
                            {"cross_stage", m.is_cross_stage(e)}});
  }
  doc["actions"] = json::array();
  for (const auto& a : m.actions()) {
    doc["actions"].push_back({{"id", a.id.str()},
                              {"controller", a.controller.str()},
                              {"name", a.name},
                              {"stage", stage_tag(m.action_stage(a))}});
  }
  doc["ucas"] = json::array();
  for (const auto& u : m.ucas()) {
    doc["ucas"].push_back({{"id", u.id.str()},
                           {"action", u.action.str()},
                           {"mode", mode_keyword(u.mode)},
                           {"hazards", ids(u.hazards)},
                           {"description", u.description},
                           {"stage", stage_tag(m.uca_stage(u))}});
  }
  doc["scenarios"] = json::array();
  for (const auto& s : m.scenarios()) {
    doc["scenarios"].push_back({{"id", s.id.str()},
                                {"uca", s.uca.str()},
                                {"stage", stage_tag(s.stage)},
                                {"description", s.description}});
  }
  doc["requirements"] = json::array();
  for (const auto& r : m.requirements()) {
    doc["requirements"].push_back(
        {{"id", r.id.str()}, {"scenarios", ids(r.scenarios)}, {"description", r.description}});
  }
  return doc;
}

json worksheet_json(const UcaWorksheet& sheet) {
  json rows = json::array();
  for (const auto& row : sheet.rows) {
    json cells = json::array();
    for (const auto& cell : row.cells) {
      json c = {{"mode", mode_keyword(cell.mode)},
                {"status", status_name(cell.status())},
                {"ucas", ids(cell.ucas)}};
      if (cell.waiver) c["waiver"] = *cell.waiver;
      cells.push_back(std::move(c));
    }
    rows.push_back({{"action", row.action.str()},
                    {"name", row.name},
                    {"stage", stage_tag(row.stage)},
                    {"cells", std::move(cells)}});
  }
  json unmatched = json::array();
  for (const auto& w : sheet.unmatched_waivers) {
    unmatched.push_back(
        {{"action", w.action.str()}, {"mode", mode_keyword(w.mode)}, {"reason", w.reason}});
  }
  return {{"rows", std::move(rows)},
          {"cell_count", sheet.cell_count()},
          {"documented", sheet.count(CellStatus::Documented)},
          {"waived", sheet.count(CellStatus::Waived)},
          {"gaps", sheet.count(CellStatus::Gap)},
          {"unmatched_waivers", std::move(unmatched)}};
}

json audit_json(const TraceAudit& audit) {
  json findings = json::array();
  for (const auto& f : audit.findings) {
    findings.push_back({{"severity", f.severity == Severity::Error ? "error" : "warning"},
                        {"category", category_name(f.category)},
                        {"id", f.id},
                        {"message", f.message}});
  }
  json dangling = json::array();
  for (const auto& d : audit.dangling) {
    dangling.push_back({{"from_category", category_name(d.from_category)},
                        {"from", d.from},
                        {"to_category", category_name(d.to_category)},
                        {"to", d.to}});
  }
  return {{"orphan_losses", ids(audit.orphan_losses)},
          {"orphan_hazards", ids(audit.orphan_hazards)},
          {"orphan_ucas", ids(audit.orphan_ucas)},
          {"orphan_scenarios", ids(audit.orphan_scenarios)},
          {"unreached_requirements", ids(audit.unreached_requirements)},
          {"dangling", std::move(dangling)},
          {"findings", std::move(findings)}};
}

json coverage_json(const CoverageMetrics& c) {
  json per_stage = json::object();
  for (const auto& [stage, n] : c.per_stage_uca_counts) per_stage[std::string(stage_tag(stage))] = n;
  json per_mode = json::object();
  for (const auto& [mode, n] : c.per_mode_uca_counts) per_mode[std::string(mode_keyword(mode))] = n;
  return {{"uca_mode_coverage", ratio(c.uca_mode_coverage)},
          {"per_stage_uca_counts", std::move(per_stage)},
          {"per_mode_uca_counts", std::move(per_mode)},
          {"hazard_mitigation_ratio", ratio(c.hazard_mitigation_ratio)},
          {"loss_mitigation_ratio", ratio(c.loss_mitigation_ratio)},
          {"unmitigated_hazards", ids(c.unmitigated_hazards)},
          {"unmitigated_losses", ids(c.unmitigated_losses)}};
}

json loops_json(const LoopFindings& loops) {
  json cross = json::array();
  for (const auto& e : loops.cross_stage_edges) {
    cross.push_back({{"from", e.from.str()}, {"to", e.to.str()}, {"kind", edge_kind_keyword(e.kind)}});
  }
  return {{"controllers_without_feedback", ids(loops.controllers_without_feedback)},
          {"unreachable_nodes", ids(loops.unreachable_nodes)},
          {"cross_stage_edges", std::move(cross)}};
}

}  // namespace

std::string export_structured(const ReportBundle& bundle) {
  json doc = model_json(bundle.model);
  doc["analysis"] = {{"worksheet", worksheet_json(bundle.worksheet)},
                     {"audit", audit_json(bundle.audit)},
                     {"coverage", coverage_json(bundle.coverage)},
                     {"control_structure", loops_json(bundle.loops)}};
  doc["metadata"] = {{"tool", kToolName},
                     {"tool_version", bundle.metadata.tool_version},
                     {"input_digest", {{"algorithm", "sha256"}, {"value", bundle.metadata.input_digest}}}};
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

Result<SafetyModel, std::vector<std::string>> import_structured(std::string_view json_text) {
  std::vector<RawDeclaration> decls;
  try {
    const json doc = json::parse(json_text);
    auto id = [](const json& j) { return Identifier(j.get<std::string>()); };
    auto id_list = [&](const json& j) {
      IdList out;
      for (const auto& x : j) out.push_back(id(x));
      return out;
    };
    auto stage = [](const json& j) {
      auto s = parse_stage(j.get<std::string>());
      if (!s) throw std::invalid_argument("unknown stage '" + j.get<std::string>() + "'");
      return *s;
    };

    decls.push_back({ModelHeader{doc.at("name").get<std::string>()}});
    for (const auto& l : doc.at("losses")) {
      decls.push_back({Loss{id(l.at("id")), l.at("description").get<std::string>(),
                            l.at("safety_critical").get<bool>()}});
    }
    for (const auto& h : doc.at("hazards")) {
      decls.push_back({Hazard{id(h.at("id")), h.at("description").get<std::string>(),
                              id_list(h.at("losses"))}});
    }
    for (const auto& n : doc.at("nodes")) {
      const std::string kind = n.at("kind").get<std::string>();
      if (kind != "technical" && kind != "human") {
        throw std::invalid_argument("unknown node kind '" + kind + "'");
      }
      decls.push_back({Node{id(n.at("id")), stage(n.at("stage")),
                            kind == "technical" ? NodeKind::Technical : NodeKind::Human,
                            n.at("label").get<std::string>()}});
    }
    for (const auto& e : doc.at("edges")) {
      const std::string kind = e.at("kind").get<std::string>();
      if (kind != "control" && kind != "feedback") {
        throw std::invalid_argument("unknown edge kind '" + kind + "'");
      }
      decls.push_back({Edge{id(e.at("from")), id(e.at("to")),
                            kind == "control" ? EdgeKind::Control : EdgeKind::Feedback,
                            e.at("label").get<std::string>()}});
    }
    for (const auto& a : doc.at("actions")) {
      decls.push_back(
          {ControlAction{id(a.at("id")), id(a.at("controller")), a.at("name").get<std::string>()}});
    }
    for (const auto& u : doc.at("ucas")) {
      auto mode = parse_mode(u.at("mode").get<std::string>());
      if (!mode) throw std::invalid_argument("unknown failure mode '" + u.at("mode").get<std::string>() + "'");
      decls.push_back({Uca{id(u.at("id")), id(u.at("action")), *mode, id_list(u.at("hazards")),
                           u.at("description").get<std::string>()}});
    }
    for (const auto& s : doc.at("scenarios")) {
      decls.push_back({CausalScenario{id(s.at("id")), id(s.at("uca")), stage(s.at("stage")),
                                      s.at("description").get<std::string>()}});
    }
    for (const auto& r : doc.at("requirements")) {
      decls.push_back({SafetyRequirement{id(r.at("id")), id_list(r.at("scenarios")),
                                         r.at("description").get<std::string>()}});
    }
  } catch (const std::exception& e) {
    return fail(std::vector<std::string>{e.what()});
  }
  auto built = build_model(decls);
  if (!built) {
    std::vector<std::string> errors;
    for (const auto& e : built.error().errors) errors.push_back(e.message());
    return fail(std::move(errors));
  }
  return std::move(built).value();
}

// ---------------------------------------------------------------------------
// Markdown tables

namespace {

std::string cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') {
      out += "\\|";
    } else if (c == '\n' || c == '\r') {
      out += ' ';
    } else {
      out += c;
    }
  }
  return out;
}

std::string joined(const IdList& list, std::string_view empty = "") {
  if (list.empty()) return std::string(empty);
  std::string out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (i > 0) out += ", ";
    out += list[i].str();
  }
  return out;
}

std::string row(std::initializer_list<std::string> cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

}  // namespace

std::string render_tables(const ReportBundle& b) {
  const SafetyModel& m = b.model;
  std::string out = "# Safety Analysis Report: " + cell(m.name()) + "\n\n";

  out += "## Losses\n\n";
  out += row({"Loss ID", "Description", "Safety-Critical"});
  out += "|---|---|---|\n";
  for (const auto& l : m.losses()) {
    out += row({l.id.str(), cell(l.description), l.safety_critical ? "yes" : "no"});
  }

  out += "\n## Hazards\n\n";
  out += row({"Hazard ID", "System-Level Hazard", "Associated Losses"});
  out += "|---|---|---|\n";
  for (const auto& h : m.hazards()) {
    out += row({h.id.str(), cell(h.description), joined(h.losses)});
  }

  out += "\n## Unsafe Control Actions\n\n";
  out += row({"UCA ID", "Control Action", "Description", "Failure Mode", "Hazards"});
  out += "|---|---|---|---|---|\n";
  for (const auto& u : m.ucas()) {
    out += row({u.id.str(), cell(m.find_action(u.action)->name), cell(u.description),
                std::string(mode_display_name(u.mode)), joined(u.hazards)});
  }

  out += "\n## Causal Scenarios\n\n";
  out += row({"UCA ID", "CS ID", "Stage", "Causal Scenario Description"});
  out += "|---|---|---|---|\n";
  for (const auto& s : m.scenarios()) {
    out += row({s.uca.str(), s.id.str(), std::string(stage_display_name(s.stage)),
                cell(s.description)});
  }

  out += "\n## Safety Requirements\n\n";
  out += row({"Causal Scenario ID", "Requirement ID", "Safety Requirement Description"});
  out += "|---|---|---|\n";
  for (const auto& r : m.requirements()) {
    out += row({joined(r.scenarios), r.id.str(), cell(r.description)});
  }

  out += "\n## Analysis Findings\n\n";
  const auto& ws = b.worksheet;
  out += "### UCA Worksheet\n\n";
  out += "- cells: " + std::to_string(ws.cell_count()) +
         ", documented: " + std::to_string(ws.count(CellStatus::Documented)) +
         ", waived: " + std::to_string(ws.count(CellStatus::Waived)) +
         ", gaps: " + std::to_string(ws.count(CellStatus::Gap)) + "\n";
  out += "- uca mode coverage: " + b.coverage.uca_mode_coverage.to_string() + "\n";
  for (const auto& r : ws.rows) {
    for (const auto& c : r.cells) {
      if (c.status() == CellStatus::Gap) {
        out += "- gap: " + r.action.str() + " " + std::string(mode_keyword(c.mode)) + "\n";
      } else if (c.status() == CellStatus::Waived) {
        out += "- waived: " + r.action.str() + " " + std::string(mode_keyword(c.mode)) + " (" +
               cell(*c.waiver) + ")\n";
      }
    }
  }
  for (const auto& w : ws.unmatched_waivers) {
    out += "- unmatched waiver: " + w.action.str() + " " + std::string(mode_keyword(w.mode)) + "\n";
  }

  const auto& a = b.audit;
  out += "\n### Traceability\n\n";
  out += "- orphan losses: " + joined(a.orphan_losses, "none") + "\n";
  out += "- orphan hazards: " + joined(a.orphan_hazards, "none") + "\n";
  out += "- orphan ucas: " + joined(a.orphan_ucas, "none") + "\n";
  out += "- orphan scenarios: " + joined(a.orphan_scenarios, "none") + "\n";
  out += "- unreached requirements: " + joined(a.unreached_requirements, "none") + "\n";

  const auto& c = b.coverage;
  out += "\n### Coverage\n\n";
  out += "- hazard mitigation: " + c.hazard_mitigation_ratio.to_string() + "\n";
  out += "- loss mitigation: " + c.loss_mitigation_ratio.to_string() + "\n";
  out += "- unmitigated hazards: " + joined(c.unmitigated_hazards, "none") + "\n";
  out += "- unmitigated losses: " + joined(c.unmitigated_losses, "none") + "\n";
  out += "- ucas per stage:";
  for (const auto& [stage, n] : c.per_stage_uca_counts) {
    out += " " + std::string(stage_tag(stage)) + "=" + std::to_string(n);
  }
  out += "\n- ucas per mode:";
  for (const auto& [mode, n] : c.per_mode_uca_counts) {
    out += " " + std::string(mode_keyword(mode)) + "=" + std::to_string(n);
  }
  out += "\n";

  const auto& l = b.loops;
  out += "\n### Control Structure\n\n";
  out += "- controllers without feedback: " + joined(l.controllers_without_feedback, "none") + "\n";
  out += "- unconnected nodes: " + joined(l.unreachable_nodes, "none") + "\n";
  out += "- cross-stage edges: " + std::to_string(l.cross_stage_edges.size()) + "\n";
  for (const auto& e : l.cross_stage_edges) {
    out += "  - " + e.from.str() + " -> " + e.to.str() + " (" +
           std::string(edge_kind_keyword(e.kind)) + ")\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graphviz

namespace {

std::string dot_quote(std::string_view text) {
  std::string out = "\"";
  for (char c : text) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': break;
      default: out += c; break;
    }
  }
  return out + "\"";
}

}  // namespace

std::string export_graph(const SafetyModel& m) {
  std::string out = "digraph " + dot_quote(m.name()) + " {\n";
  out += "  rankdir=LR;\n";
  out += "  compound=true;\n";
  out += "  node [fontname=\"Helvetica\"];\n";
  for (Stage stage : kAllStages) {
    out += "  subgraph cluster_" + std::string(stage_tag(stage)) + " {\n";
    out += "    label=" + dot_quote(stage_display_name(stage)) + ";\n";
    for (const auto& n : m.nodes()) {
      if (n.stage != stage) continue;
      const bool human = n.kind == NodeKind::Human;
      out += "    " + dot_quote(n.id.str()) + " [label=" + dot_quote(n.label) +
             ", shape=" + (human ? "ellipse" : "box") +
             ", style=filled, fillcolor=" + (human ? "yellow" : "gray") + "];\n";
    }
    out += "  }\n";
  }
  for (const auto& e : m.edges()) {
    const bool cross = m.is_cross_stage(e);
    out += "  " + dot_quote(e.from.str()) + " -> " + dot_quote(e.to.str()) + " [style=" +
           (e.kind == EdgeKind::Control ? "solid" : "dashed") +
           ", color=" + (cross ? "red" : "black");
    if (cross) out += ", class=\"cross-stage\"";
    if (!e.label.empty()) out += ", label=" + dot_quote(e.label);
    out += "];\n";
  }
  out += "}\n";
  return out;
}

namespace {

enum class DotTok { Id, LBrace, RBrace, LBracket, RBracket, Semi, Comma, Eq, Colon, Arrow, Dash, End };

struct DotToken {
  DotTok kind;
  std::string text;
  bool quoted = false;
};

class DotChecker {
 public:
  explicit DotChecker(std::string_view src) : src_(src) {}

  DotCheck run() {
    DotCheck result;
    try {
      lex();
      parse_graph();
      if (peek().kind != DotTok::End) fail("trailing content after graph");
      result.valid = true;
    } catch (const std::runtime_error& e) {
      result.error = e.what();
    }
    result.cluster_ids = std::move(clusters_);
    return result;
  }

 private:
  [[noreturn]] void fail(const std::string& what) { throw std::runtime_error(what); }

  void lex() {
    std::size_t i = 0;
    bool line_start = true;
    while (i < src_.size()) {
      const char c = src_[i];
      if (c == '\n') {
        line_start = true;
        ++i;
        continue;
      }
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++i;
        continue;
      }
      if (c == '#' && line_start) {  // preprocessor-style line
        while (i < src_.size() && src_[i] != '\n') ++i;
        continue;
      }
      line_start = false;
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '/') {
        while (i < src_.size() && src_[i] != '\n') ++i;
        continue;
      }
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '*') {
        const auto end = src_.find("*/", i + 2);
        if (end == std::string_view::npos) fail("unterminated comment");
        i = end + 2;
        continue;
      }
      switch (c) {
        case '{': toks_.push_back({DotTok::LBrace, "{"}); ++i; continue;
        case '}': toks_.push_back({DotTok::RBrace, "}"}); ++i; continue;
        case '[': toks_.push_back({DotTok::LBracket, "["}); ++i; continue;
        case ']': toks_.push_back({DotTok::RBracket, "]"}); ++i; continue;
        case ';': toks_.push_back({DotTok::Semi, ";"}); ++i; continue;
        case ',': toks_.push_back({DotTok::Comma, ","}); ++i; continue;
        case '=': toks_.push_back({DotTok::Eq, "="}); ++i; continue;
        case ':': toks_.push_back({DotTok::Colon, ":"}); ++i; continue;
        default: break;
      }
      if (c == '-' && i + 1 < src_.size() && (src_[i + 1] == '>' || src_[i + 1] == '-')) {
        toks_.push_back({src_[i + 1] == '>' ? DotTok::Arrow : DotTok::Dash, ""});
        i += 2;
        continue;
      }
      if (c == '"') {
        std::string text;
        ++i;
        bool closed = false;
        while (i < src_.size()) {
          if (src_[i] == '\\' && i + 1 < src_.size()) {
            text += src_[i];
            text += src_[i + 1];
            i += 2;
            continue;
          }
          if (src_[i] == '"') {
            closed = true;
            ++i;
            break;
          }
          text += src_[i++];
        }
        if (!closed) fail("unterminated quoted string");
        toks_.push_back({DotTok::Id, text, true});
        continue;
      }
      if (c == '<') {  // HTML string, nested angle brackets
        int depth = 0;
        const std::size_t start = i;
        do {
          if (src_[i] == '<') ++depth;
          if (src_[i] == '>') --depth;
          ++i;
        } while (i < src_.size() && depth > 0);
        if (depth != 0) fail("unterminated HTML string");
        toks_.push_back({DotTok::Id, std::string(src_.substr(start, i - start)), true});
        continue;
      }
      const auto uc = static_cast<unsigned char>(c);
      if (std::isalpha(uc) || c == '_' || uc >= 0x80) {
        const std::size_t start = i;
        while (i < src_.size()) {
          const auto d = static_cast<unsigned char>(src_[i]);
          if (!(std::isalnum(d) || d == '_' || d >= 0x80)) break;
          ++i;
        }
        toks_.push_back({DotTok::Id, std::string(src_.substr(start, i - start))});
        continue;
      }
      if (std::isdigit(uc) || c == '.' || c == '-') {
        const std::size_t start = i;
        if (src_[i] == '-') ++i;
        bool digits = false, dot = false;
        while (i < src_.size()) {
          if (std::isdigit(static_cast<unsigned char>(src_[i]))) {
            digits = true;
          } else if (src_[i] == '.' && !dot) {
            dot = true;
          } else {
            break;
          }
          ++i;
        }
        if (!digits) fail("malformed numeral");
        toks_.push_back({DotTok::Id, std::string(src_.substr(start, i - start))});
        continue;
      }
      fail(std::string("unexpected character '") + c + "'");
    }
    toks_.push_back({DotTok::End, ""});
  }

  const DotToken& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }

  DotToken take() {
    DotToken t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }

  void expect(DotTok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    take();
  }

  static bool is_keyword(const DotToken& t, std::string_view kw) {
    if (t.kind != DotTok::Id || t.quoted || t.text.size() != kw.size()) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(t.text[i])) != kw[i]) return false;
    }
    return true;
  }

  static bool is_any_keyword(const DotToken& t) {
    return is_keyword(t, "graph") || is_keyword(t, "digraph") || is_keyword(t, "subgraph") ||
           is_keyword(t, "node") || is_keyword(t, "edge") || is_keyword(t, "strict");
  }

  bool is_plain_id(const DotToken& t) const { return t.kind == DotTok::Id && !is_any_keyword(t); }

  void parse_graph() {
    if (is_keyword(peek(), "strict")) take();
    if (is_keyword(peek(), "digraph")) {
      directed_ = true;
    } else if (!is_keyword(peek(), "graph")) {
      fail("expected 'graph' or 'digraph'");
    }
    take();
    if (is_plain_id(peek())) take();
    expect(DotTok::LBrace, "'{'");
    parse_stmt_list();
    expect(DotTok::RBrace, "'}'");
  }

  void parse_stmt_list() {
    while (peek().kind != DotTok::RBrace && peek().kind != DotTok::End) {
      parse_stmt();
      if (peek().kind == DotTok::Semi) take();
    }
  }

  void parse_stmt() {
    const DotToken& t = peek();
    if (is_keyword(t, "graph") || is_keyword(t, "node") || is_keyword(t, "edge")) {
      take();
      parse_attr_list(true);
      return;
    }
    if (is_plain_id(t) && peek(1).kind == DotTok::Eq) {
      take();
      take();
      if (!is_plain_id(peek())) fail("expected attribute value");
      take();
      return;
    }
    // node_stmt, edge_stmt or subgraph
    parse_endpoint();
    bool edge = false;
    while (peek().kind == DotTok::Arrow || peek().kind == DotTok::Dash) {
      if ((peek().kind == DotTok::Arrow) != directed_) {
        fail(directed_ ? "'--' in a digraph" : "'->' in an undirected graph");
      }
      take();
      parse_endpoint();
      edge = true;
    }
    (void)edge;
    if (peek().kind == DotTok::LBracket) parse_attr_list(true);
  }

  void parse_endpoint() {
    if (is_keyword(peek(), "subgraph") || peek().kind == DotTok::LBrace) {
      parse_subgraph();
      return;
    }
    if (!is_plain_id(peek())) fail("expected node id");
    take();
    if (peek().kind == DotTok::Colon) {  // port
      take();
      if (!is_plain_id(peek())) fail("expected port");
      take();
      if (peek().kind == DotTok::Colon) {
        take();
        if (!is_plain_id(peek())) fail("expected compass point");
        take();
      }
    }
  }

  void parse_subgraph() {
    if (is_keyword(peek(), "subgraph")) {
      take();
      if (is_plain_id(peek())) {
        const DotToken id = take();
        if (id.text.rfind("cluster", 0) == 0) clusters_.push_back(id.text);
      }
    }
    expect(DotTok::LBrace, "'{'");
    parse_stmt_list();
    expect(DotTok::RBrace, "'}'");
  }

  void parse_attr_list(bool required) {
    if (peek().kind != DotTok::LBracket) {
      if (required) fail("expected '['");
      return;
    }
    while (peek().kind == DotTok::LBracket) {
      take();
      while (peek().kind != DotTok::RBracket) {
        if (!is_plain_id(peek())) fail("expected attribute name");
        take();
        expect(DotTok::Eq, "'='");
        if (!is_plain_id(peek())) fail("expected attribute value");
        take();
        if (peek().kind == DotTok::Comma || peek().kind == DotTok::Semi) take();
      }
      take();
    }
  }

  std::string_view src_;
  std::vector<DotToken> toks_;
  std::size_t pos_ = 0;
  bool directed_ = false;
  std::vector<std::string> clusters_;
};

}  // namespace

DotCheck check_dot(std::string_view text) { return DotChecker(text).run(); }

}  // namespace unistpa
