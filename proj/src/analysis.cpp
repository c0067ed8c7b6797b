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

#include "unistpa/analysis.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace unistpa {

// ---------------------------------------------------------------------------
// Ratio

double Ratio::value() const {
  if (denominator == 0) return 1.0;
  return static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::string Ratio::decimal() const {
  std::size_t scaled = 10000;
  if (denominator != 0) {
    const std::size_t n = numerator * 10000;
    scaled = n / denominator;
    const std::size_t rem = n % denominator;
    if (2 * rem > denominator || (2 * rem == denominator && scaled % 2 == 1)) ++scaled;
  }
  std::string frac = std::to_string(scaled % 10000);
  frac.insert(0, 4 - frac.size(), '0');
  return std::to_string(scaled / 10000) + "." + frac;
}

std::string Ratio::to_string() const {
  return std::to_string(numerator) + "/" + std::to_string(denominator) + " (" + decimal() + ")";
}

bool Ratio::equals(std::size_t num, std::size_t den) const {
  return numerator * den == num * denominator && (den == 0) == (denominator == 0);
}

// ---------------------------------------------------------------------------
// Worksheet

Result<std::vector<Waiver>, std::vector<ParseDiagnostic>> parse_waivers(std::string_view text) {
  TokenStream stream = tokenize(text);
  std::vector<ParseDiagnostic> diagnostics = std::move(stream.diagnostics);
  std::vector<Waiver> waivers;

  // Group tokens by source line; each non-empty line is one waiver.
  std::map<std::size_t, std::vector<const Token*>> lines;
  for (const auto& t : stream.tokens) lines[t.span.line].push_back(&t);

  for (const auto& [line, tokens] : lines) {
    const bool shape_ok = tokens.size() == 3 &&
                          (tokens[0]->kind == TokenKind::Ident ||
                           tokens[0]->kind == TokenKind::Keyword) &&
                          (tokens[1]->kind == TokenKind::Ident ||
                           tokens[1]->kind == TokenKind::Keyword) &&
                          tokens[2]->kind == TokenKind::String;
    if (!shape_ok) {
      diagnostics.push_back({Severity::Error, "expected 'ACTION_ID MODE \"reason\"'",
                             tokens.front()->span});
      continue;
    }
    auto mode = parse_mode(tokens[1]->text);
    if (!mode) {
      diagnostics.push_back(
          {Severity::Error,
           "unknown failure mode '" + tokens[1]->text +
               "' (expected one of: not_provided, provided_improperly, mistimed, "
               "inappropriate_duration)",
           tokens[1]->span});
      continue;
    }
    waivers.push_back({Identifier(tokens[0]->text), *mode, tokens[2]->text, line});
  }
  if (has_errors(diagnostics)) return fail(std::move(diagnostics));
  return waivers;
}

std::size_t UcaWorksheet::cell_count() const {
  std::size_t n = 0;
  for (const auto& row : rows) n += row.cells.size();
  return n;
}

std::size_t UcaWorksheet::count(CellStatus status) const {
  std::size_t n = 0;
  for (const auto& row : rows) {
    n += std::count_if(row.cells.begin(), row.cells.end(),
                       [status](const WorksheetCell& c) { return c.status() == status; });
  }
  return n;
}

std::size_t UcaWorksheet::documented_in(FailureMode mode) const {
  std::size_t n = 0;
  for (const auto& row : rows) {
    for (const auto& cell : row.cells) {
      if (cell.mode == mode && cell.status() == CellStatus::Documented) ++n;
    }
  }
  return n;
}

UcaWorksheet uca_worksheet(const SafetyModel& model, std::span<const Waiver> waivers) {
  UcaWorksheet sheet;
  std::unordered_map<std::string, std::size_t> row_of;
  for (const auto& action : model.actions()) {
    WorksheetRow row{action.id, action.name, model.action_stage(action), {}};
    for (FailureMode mode : kAllFailureModes) row.cells.push_back({mode, {}, std::nullopt});
    row_of.emplace(action.id.str(), sheet.rows.size());
    sheet.rows.push_back(std::move(row));
  }
  for (const auto& uca : model.ucas()) {
    auto& row = sheet.rows[row_of.at(uca.action.str())];
    row.cells[static_cast<std::size_t>(uca.mode)].ucas.push_back(uca.id);
  }
  for (const auto& waiver : waivers) {
    auto it = row_of.find(waiver.action.str());
    if (it == row_of.end()) {
      sheet.unmatched_waivers.push_back(waiver);
      continue;
    }
    auto& cell = sheet.rows[it->second].cells[static_cast<std::size_t>(waiver.mode)];
    if (!cell.ucas.empty() || cell.waiver) {
      sheet.unmatched_waivers.push_back(waiver);
      continue;
    }
    cell.waiver = waiver.reason;
  }
  return sheet;
}

// ---------------------------------------------------------------------------
// Traceability audit

bool TraceAudit::has_errors() const {
  return std::any_of(findings.begin(), findings.end(),
                     [](const AuditFinding& f) { return f.severity == Severity::Error; });
}

bool TraceAudit::has_warnings() const {
  return std::any_of(findings.begin(), findings.end(),
                     [](const AuditFinding& f) { return f.severity == Severity::Warning; });
}

namespace {

// Chain links as declared, tolerant of dangling references.
struct LooseChain {
  struct Entry {
    Identifier id;
    std::vector<std::string> down;  // ids one level toward losses
  };
  // Indexed by chain level (loss, hazard, uca, scenario, requirement).
  std::array<std::vector<Entry>, 5> levels;
  std::array<std::unordered_map<std::string, std::size_t>, 5> index;

  void add(std::size_t level, const Identifier& id, std::vector<std::string> down) {
    if (index[level].count(id.str())) return;
    index[level].emplace(id.str(), levels[level].size());
    levels[level].push_back({id, std::move(down)});
  }

  bool has(std::size_t level, const std::string& id) const { return index[level].count(id) > 0; }
};

std::vector<std::string> strings_of(const IdList& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

}  // namespace

TraceAudit traceability_audit(std::span<const RawDeclaration> declarations) {
  LooseChain chain;
  std::unordered_set<std::string> nodes, actions;
  for (const auto& d : declarations) {
    if (const auto* x = std::get_if<Loss>(&d.body)) chain.add(0, x->id, {});
    if (const auto* x = std::get_if<Hazard>(&d.body)) chain.add(1, x->id, strings_of(x->losses));
    if (const auto* x = std::get_if<Uca>(&d.body)) chain.add(2, x->id, strings_of(x->hazards));
    if (const auto* x = std::get_if<CausalScenario>(&d.body)) chain.add(3, x->id, {x->uca.str()});
    if (const auto* x = std::get_if<SafetyRequirement>(&d.body)) {
      chain.add(4, x->id, strings_of(x->scenarios));
    }
    if (const auto* x = std::get_if<Node>(&d.body)) nodes.insert(x->id.str());
    if (const auto* x = std::get_if<ControlAction>(&d.body)) actions.insert(x->id.str());
  }

  TraceAudit audit;

  // Dangling references, in declaration order.
  auto dangle = [&](Category from_cat, const std::string& from, Category to_cat,
                    const std::string& to) {
    audit.dangling.push_back({from_cat, from, to_cat, to});
    audit.findings.push_back({Severity::Error, from_cat, from,
                              std::string(category_name(from_cat)) + " '" + from +
                                  "' references undeclared " +
                                  std::string(category_name(to_cat)) + " '" + to + "'"});
  };
  for (const auto& d : declarations) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Hazard>) {
            for (const auto& l : x.losses) {
              if (!chain.has(0, l.str())) dangle(Category::Hazard, x.id.str(), Category::Loss, l.str());
            }
          } else if constexpr (std::is_same_v<T, Uca>) {
            if (!actions.count(x.action.str())) {
              dangle(Category::Uca, x.id.str(), Category::Action, x.action.str());
            }
            for (const auto& h : x.hazards) {
              if (!chain.has(1, h.str())) dangle(Category::Uca, x.id.str(), Category::Hazard, h.str());
            }
          } else if constexpr (std::is_same_v<T, CausalScenario>) {
            if (!chain.has(2, x.uca.str())) {
              dangle(Category::Scenario, x.id.str(), Category::Uca, x.uca.str());
            }
          } else if constexpr (std::is_same_v<T, SafetyRequirement>) {
            for (const auto& s : x.scenarios) {
              if (!chain.has(3, s.str())) {
                dangle(Category::Requirement, x.id.str(), Category::Scenario, s.str());
              }
            }
          } else if constexpr (std::is_same_v<T, ControlAction>) {
            if (!nodes.count(x.controller.str())) {
              dangle(Category::Action, x.id.str(), Category::Node, x.controller.str());
            }
          } else if constexpr (std::is_same_v<T, Edge>) {
            const std::string name = x.from.str() + "->" + x.to.str();
            if (!nodes.count(x.from.str())) dangle(Category::Node, name, Category::Node, x.from.str());
            if (x.to != x.from && !nodes.count(x.to.str())) {
              dangle(Category::Node, name, Category::Node, x.to.str());
            }
          }
        },
        d.body);
  }

  // A requirement is unreached when any downstream path hits a gap.
  std::array<std::unordered_map<std::string, bool>, 5> broken_memo;
  std::function<bool(std::size_t, const std::string&)> broken = [&](std::size_t level,
                                                                   const std::string& id) {
    if (level == 0) return false;
    auto memo = broken_memo[level].find(id);
    if (memo != broken_memo[level].end()) return memo->second;
    const auto& entry = chain.levels[level][chain.index[level].at(id)];
    bool result = false;
    for (const auto& next : entry.down) {
      if (!chain.has(level - 1, next) || broken(level - 1, next)) {
        result = true;
        break;
      }
    }
    broken_memo[level][id] = result;
    return result;
  };
  for (const auto& req : chain.levels[4]) {
    if (broken(4, req.id.str())) {
      audit.unreached_requirements.push_back(req.id);
      audit.findings.push_back({Severity::Error, Category::Requirement, req.id.str(),
                                "requirement '" + req.id.str() +
                                    "' does not reach a loss: its chain has a dangling reference"});
    }
  }

  // Orphans: nothing one level up refers to them.
  std::array<IdList*, 4> orphan_sets = {&audit.orphan_losses, &audit.orphan_hazards,
                                        &audit.orphan_ucas, &audit.orphan_scenarios};
  constexpr std::array<std::string_view, 4> orphan_text = {
      "is not linked to any hazard", "is not addressed by any UCA", "has no causal scenario",
      "has no safety requirement"};
  for (std::size_t level = 0; level < 4; ++level) {
    std::unordered_set<std::string> referenced;
    for (const auto& up : chain.levels[level + 1]) {
      referenced.insert(up.down.begin(), up.down.end());
    }
    for (const auto& entry : chain.levels[level]) {
      if (referenced.count(entry.id.str())) continue;
      orphan_sets[level]->push_back(entry.id);
      const Category cat = kChainLevels[level];
      audit.findings.push_back({Severity::Warning, cat, entry.id.str(),
                                std::string(category_name(cat)) + " '" + entry.id.str() + "' " +
                                    std::string(orphan_text[level])});
    }
  }
  return audit;
}

TraceAudit traceability_audit(const SafetyModel& model) {
  const auto declarations = extract_declarations(model);
  return traceability_audit(std::span<const RawDeclaration>(declarations));
}

// ---------------------------------------------------------------------------
// Coverage

CoverageMetrics coverage_metrics(const SafetyModel& model, std::span<const Waiver> waivers) {
  CoverageMetrics m;
  const UcaWorksheet sheet = uca_worksheet(model, waivers);
  m.uca_mode_coverage = {sheet.count(CellStatus::Documented) + sheet.count(CellStatus::Waived),
                         sheet.cell_count()};

  for (Stage s : kAllStages) m.per_stage_uca_counts[s] = 0;
  for (FailureMode f : kAllFailureModes) m.per_mode_uca_counts[f] = 0;
  for (const auto& uca : model.ucas()) {
    ++m.per_stage_uca_counts[model.uca_stage(uca)];
    ++m.per_mode_uca_counts[uca.mode];
  }

  std::set<std::string> mitigated_hazards;
  for (const auto& req : model.requirements()) {
    for (const auto& sid : req.scenarios) {
      const auto* uca = model.find_uca(model.find_scenario(sid)->uca);
      for (const auto& h : uca->hazards) mitigated_hazards.insert(h.str());
    }
  }
  std::set<std::string> mitigated_losses;
  for (const auto& hazard : model.hazards()) {
    if (mitigated_hazards.count(hazard.id.str())) {
      for (const auto& l : hazard.losses) mitigated_losses.insert(l.str());
    } else {
      m.unmitigated_hazards.push_back(hazard.id);
    }
  }
  for (const auto& loss : model.losses()) {
    if (!mitigated_losses.count(loss.id.str())) m.unmitigated_losses.push_back(loss.id);
  }
  m.hazard_mitigation_ratio = {model.hazards().size() - m.unmitigated_hazards.size(),
                               model.hazards().size()};
  m.loss_mitigation_ratio = {model.losses().size() - m.unmitigated_losses.size(),
                             model.losses().size()};
  return m;
}

// ---------------------------------------------------------------------------
// Chain queries

std::string_view direction_name(Direction direction) {
  return direction == Direction::Upstream ? "up" : "down";
}

IdList TraceChain::reached(Category category) const {
  IdList out;
  const auto origin_level = chain_level(origin_category);
  const auto target_level = chain_level(category);
  if (!origin_level || !target_level) return out;
  const long hops = direction == Direction::Upstream
                        ? static_cast<long>(*target_level) - static_cast<long>(*origin_level)
                        : static_cast<long>(*origin_level) - static_cast<long>(*target_level);
  if (hops < 0) return out;
  for (const auto& path : paths) {
    if (static_cast<std::size_t>(hops) >= path.ids.size()) continue;
    const auto& id = path.ids[static_cast<std::size_t>(hops)];
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
  }
  return out;
}

namespace {

void walk(const SafetyModel& model, std::size_t level, const Identifier& id,
          Direction direction, IdList& path, std::vector<TracePath>& out) {
  path.push_back(id);
  const auto neighbors = resolve_chain_neighbors(model, kChainLevels[level], id);
  const IdList& next =
      direction == Direction::Upstream ? neighbors->upstream : neighbors->downstream;
  if (next.empty()) {
    const bool terminal = direction == Direction::Upstream ? level == kChainLevels.size() - 1
                                                           : level == 0;
    if (path.size() > 1 || !terminal) out.push_back({path, !terminal});
  } else {
    const std::size_t next_level = direction == Direction::Upstream ? level + 1 : level - 1;
    for (const auto& n : next) walk(model, next_level, n, direction, path, out);
  }
  path.pop_back();
}

}  // namespace

Result<TraceChain, LookupError> trace_chain(const SafetyModel& model, const Identifier& origin,
                                            Direction direction) {
  auto category = chain_category_of(model, origin);
  if (!category) return fail(LookupError{LookupErrorKind::UnknownId, origin.str(), std::nullopt});
  return trace_chain(model, *category, origin, direction);
}

Result<TraceChain, LookupError> trace_chain(const SafetyModel& model, Category category,
                                            const Identifier& origin, Direction direction) {
  const auto level = chain_level(category);
  if (!level || !model.contains(category, origin)) {
    return fail(LookupError{LookupErrorKind::UnknownId, origin.str(), category});
  }
  TraceChain chain{origin, category, direction, {}};
  IdList path;
  walk(model, *level, origin, direction, path, chain.paths);
  return chain;
}

// ---------------------------------------------------------------------------
// Control structure

LoopFindings control_loop_audit(const SafetyModel& model) {
  LoopFindings findings;
  std::unordered_map<std::string, std::vector<const Edge*>> outgoing;
  std::unordered_set<std::string> incident;
  for (const auto& e : model.edges()) {
    outgoing[e.from.str()].push_back(&e);
    incident.insert(e.from.str());
    incident.insert(e.to.str());
    if (model.is_cross_stage(e)) findings.cross_stage_edges.push_back(e);
  }

  // Feedback closes the loop when some path from a controlled node returns
  // to the controller over at least one feedback edge.
  auto loop_closed = [&](const Node& controller) {
    using State = std::pair<std::string, bool>;
    std::set<State> seen;
    std::deque<State> queue;
    for (const Edge* e : outgoing[controller.id.str()]) {
      if (e->kind != EdgeKind::Control) continue;
      State s{e->to.str(), false};
      if (seen.insert(s).second) queue.push_back(s);
    }
    while (!queue.empty()) {
      auto [node, via_feedback] = queue.front();
      queue.pop_front();
      if (node == controller.id.str() && via_feedback) return true;
      for (const Edge* e : outgoing[node]) {
        State next{e->to.str(), via_feedback || e->kind == EdgeKind::Feedback};
        if (seen.insert(next).second) queue.push_back(next);
      }
    }
    return false;
  };

  for (const auto& node : model.nodes()) {
    const auto& out = outgoing[node.id.str()];
    const bool is_controller = std::any_of(out.begin(), out.end(), [](const Edge* e) {
      return e->kind == EdgeKind::Control;
    });
    if (is_controller && !loop_closed(node)) findings.controllers_without_feedback.push_back(node.id);
    if (!incident.count(node.id.str())) findings.unreachable_nodes.push_back(node.id);
  }
  return findings;
}

}  // namespace unistpa
