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

#include "unistpa/model.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace unistpa {

namespace {

bool is_id_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }

bool is_id_char(char c) {
  return is_id_start(c) || (c >= '0' && c <= '9') || c == '_' || c == '.' || c == '-';
}

}  // namespace

Identifier::Identifier(std::string text) : text_(std::move(text)) {
  if (!is_valid(text_)) {
    throw std::invalid_argument("invalid identifier '" + text_ + "'");
  }
}

bool Identifier::is_valid(std::string_view text) {
  if (text.empty() || !is_id_start(text.front())) return false;
  return std::all_of(text.begin(), text.end(), is_id_char);
}

std::string_view stage_tag(Stage stage) {
  switch (stage) {
    case Stage::IG: return "IG";
    case Stage::DP: return "DP";
    case Stage::LT: return "LT";
    case Stage::VF: return "VF";
    case Stage::DT: return "DT";
  }
  return "?";
}

std::string_view stage_display_name(Stage stage) {
  switch (stage) {
    case Stage::IG: return "Information Gathering";
    case Stage::DP: return "Data Preparation";
    case Stage::LT: return "Closed Loop Training";
    case Stage::VF: return "Verification";
    case Stage::DT: return "Deployment";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view tag) {
  for (Stage s : kAllStages) {
    if (stage_tag(s) == tag) return s;
  }
  return std::nullopt;
}

std::string_view mode_keyword(FailureMode mode) {
  switch (mode) {
    case FailureMode::NotProvided: return "not_provided";
    case FailureMode::ProvidedImproperly: return "provided_improperly";
    case FailureMode::MistimedProvision: return "mistimed";
    case FailureMode::InappropriateDuration: return "inappropriate_duration";
  }
  return "?";
}

std::string_view mode_display_name(FailureMode mode) {
  switch (mode) {
    case FailureMode::NotProvided: return "Not Provided";
    case FailureMode::ProvidedImproperly: return "Provided Improperly";
    case FailureMode::MistimedProvision: return "Mistimed Provision";
    case FailureMode::InappropriateDuration: return "Inappropriate Duration";
  }
  return "?";
}

std::optional<FailureMode> parse_mode(std::string_view keyword) {
  for (FailureMode m : kAllFailureModes) {
    if (mode_keyword(m) == keyword) return m;
  }
  return std::nullopt;
}

std::string_view node_kind_keyword(NodeKind kind) {
  return kind == NodeKind::Technical ? "technical" : "human";
}

std::string_view edge_kind_keyword(EdgeKind kind) {
  return kind == EdgeKind::Control ? "control" : "feedback";
}

std::string_view category_name(Category category) {
  switch (category) {
    case Category::Loss: return "loss";
    case Category::Hazard: return "hazard";
    case Category::Node: return "node";
    case Category::Action: return "action";
    case Category::Uca: return "uca";
    case Category::Scenario: return "scenario";
    case Category::Requirement: return "requirement";
  }
  return "?";
}

namespace {

std::string_view link_list_name(Category category) {
  switch (category) {
    case Category::Hazard: return "losses";
    case Category::Uca: return "hazards";
    case Category::Requirement: return "scenarios";
    default: return "links";
  }
}

std::string quoted(std::string_view s) { return "'" + std::string(s) + "'"; }

}  // namespace

std::string ValidationError::message() const {
  const std::string cat(category_name(category));
  switch (kind) {
    case ValidationErrorKind::DuplicateId:
      return "duplicate " + cat + " id " + quoted(id);
    case ValidationErrorKind::DanglingReference:
      return cat + " " + quoted(id) + " references undeclared " +
             std::string(category_name(to_category.value_or(Category::Loss))) + " " +
             quoted(to_id);
    case ValidationErrorKind::EmptyLinkSet:
      return cat + " " + quoted(id) + " has an empty " + std::string(link_list_name(category)) +
             " list";
    case ValidationErrorKind::SelfLoop:
      return "edge " + quoted(id) + " is a self-loop";
    case ValidationErrorKind::StageMismatch:
      return "scenario " + quoted(id) + " declares stage " +
             std::string(stage_tag(declared_stage.value_or(Stage::IG))) +
             " but its UCA belongs to stage " +
             std::string(stage_tag(derived_stage.value_or(Stage::IG)));
    case ValidationErrorKind::EmptyDescription:
      return cat + " " + quoted(id) + " has an empty description";
    case ValidationErrorKind::DuplicateUca:
      return "uca " + quoted(id) + " repeats the action, mode and description of uca " +
             quoted(to_id);
    case ValidationErrorKind::DuplicateLink:
      return cat + " " + quoted(id) + " lists " +
             std::string(category_name(to_category.value_or(Category::Loss))) + " " +
             quoted(to_id) + " more than once";
    case ValidationErrorKind::DuplicateHeader:
      return "duplicate model header";
  }
  return "validation error";
}

const Loss* SafetyModel::find_loss(const Identifier& id) const {
  auto it = loss_index_.find(id.str());
  return it == loss_index_.end() ? nullptr : &losses_[it->second];
}

const Hazard* SafetyModel::find_hazard(const Identifier& id) const {
  auto it = hazard_index_.find(id.str());
  return it == hazard_index_.end() ? nullptr : &hazards_[it->second];
}

const Node* SafetyModel::find_node(const Identifier& id) const {
  auto it = node_index_.find(id.str());
  return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

const ControlAction* SafetyModel::find_action(const Identifier& id) const {
  auto it = action_index_.find(id.str());
  return it == action_index_.end() ? nullptr : &actions_[it->second];
}

const Uca* SafetyModel::find_uca(const Identifier& id) const {
  auto it = uca_index_.find(id.str());
  return it == uca_index_.end() ? nullptr : &ucas_[it->second];
}

const CausalScenario* SafetyModel::find_scenario(const Identifier& id) const {
  auto it = scenario_index_.find(id.str());
  return it == scenario_index_.end() ? nullptr : &scenarios_[it->second];
}

const SafetyRequirement* SafetyModel::find_requirement(const Identifier& id) const {
  auto it = requirement_index_.find(id.str());
  return it == requirement_index_.end() ? nullptr : &requirements_[it->second];
}

bool SafetyModel::contains(Category category, const Identifier& id) const {
  switch (category) {
    case Category::Loss: return find_loss(id) != nullptr;
    case Category::Hazard: return find_hazard(id) != nullptr;
    case Category::Node: return find_node(id) != nullptr;
    case Category::Action: return find_action(id) != nullptr;
    case Category::Uca: return find_uca(id) != nullptr;
    case Category::Scenario: return find_scenario(id) != nullptr;
    case Category::Requirement: return find_requirement(id) != nullptr;
  }
  return false;
}

Stage SafetyModel::action_stage(const ControlAction& action) const {
  return find_node(action.controller)->stage;
}

Stage SafetyModel::uca_stage(const Uca& uca) const {
  return action_stage(*find_action(uca.action));
}

bool SafetyModel::is_cross_stage(const Edge& edge) const {
  return find_node(edge.from)->stage != find_node(edge.to)->stage;
}

namespace {

using Index = std::unordered_map<std::string, std::size_t>;

// Indexes of the first declaration of each id, per category.
struct Registry {
  Index loss, hazard, node, action, uca, scenario, requirement;

  Index& of(Category c) {
    switch (c) {
      case Category::Loss: return loss;
      case Category::Hazard: return hazard;
      case Category::Node: return node;
      case Category::Action: return action;
      case Category::Uca: return uca;
      case Category::Scenario: return scenario;
      case Category::Requirement: return requirement;
    }
    throw std::logic_error("unknown category");
  }
};

template <typename T>
constexpr Category category_of() {
  if constexpr (std::is_same_v<T, Loss>) return Category::Loss;
  if constexpr (std::is_same_v<T, Hazard>) return Category::Hazard;
  if constexpr (std::is_same_v<T, Node>) return Category::Node;
  if constexpr (std::is_same_v<T, ControlAction>) return Category::Action;
  if constexpr (std::is_same_v<T, Uca>) return Category::Uca;
  if constexpr (std::is_same_v<T, CausalScenario>) return Category::Scenario;
  if constexpr (std::is_same_v<T, SafetyRequirement>) return Category::Requirement;
  return Category::Loss;
}

class Validator {
 public:
  explicit Validator(std::span<const RawDeclaration> decls) : decls_(decls) {}

  std::vector<ValidationError> run() {
    index_all();
    bool seen_header = false;
    std::unordered_map<std::string, std::string> first_uca_for_triple;

    for (std::size_t i = 0; i < decls_.size(); ++i) {
      line_ = decls_[i].line;
      std::visit(
          [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ModelHeader>) {
              if (seen_header) push({.kind = ValidationErrorKind::DuplicateHeader});
              seen_header = true;
            } else if constexpr (std::is_same_v<T, Edge>) {
              check_edge(d);
            } else {
              check_duplicate<T>(d.id, i);
              check(d);
            }
          },
          decls_[i].body);
      if (const auto* u = std::get_if<Uca>(&decls_[i].body)) {
        std::string key = u->action.str() + '\x1f' + u->description;
        auto [it, inserted] = first_uca_for_triple.emplace(
            key + '\x1f' + std::string(mode_keyword(u->mode)), u->id.str());
        if (!inserted) {
          push({.kind = ValidationErrorKind::DuplicateUca,
                .category = Category::Uca,
                .id = u->id.str(),
                .to_category = Category::Uca,
                .to_id = it->second});
        }
      }
    }
    return std::move(errors_);
  }

 private:
  void index_all() {
    for (std::size_t i = 0; i < decls_.size(); ++i) {
      std::visit(
          [&](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (!std::is_same_v<T, ModelHeader> && !std::is_same_v<T, Edge>) {
              registry_.of(category_of<T>()).emplace(d.id.str(), i);
            }
          },
          decls_[i].body);
    }
  }

  template <typename T>
  void check_duplicate(const Identifier& id, std::size_t position) {
    const Category c = category_of<T>();
    if (registry_.of(c).at(id.str()) != position) {
      push({.kind = ValidationErrorKind::DuplicateId, .category = c, .id = id.str()});
    }
  }

  bool resolves(Category to, const Identifier& ref) { return registry_.of(to).count(ref.str()) > 0; }

  template <typename T>
  const T* lookup(Category to, const Identifier& ref) {
    auto it = registry_.of(to).find(ref.str());
    if (it == registry_.of(to).end()) return nullptr;
    return std::get_if<T>(&decls_[it->second].body);
  }

  void check_reference(Category from, const std::string& from_id, Category to,
                       const Identifier& ref) {
    if (!resolves(to, ref)) {
      push({.kind = ValidationErrorKind::DanglingReference,
            .category = from,
            .id = from_id,
            .to_category = to,
            .to_id = ref.str()});
    }
  }

  void check_links(Category from, const Identifier& id, Category to, const IdList& links) {
    if (links.empty()) {
      push({.kind = ValidationErrorKind::EmptyLinkSet, .category = from, .id = id.str()});
      return;
    }
    std::set<std::string> seen;
    for (const auto& ref : links) {
      if (!seen.insert(ref.str()).second) {
        push({.kind = ValidationErrorKind::DuplicateLink,
              .category = from,
              .id = id.str(),
              .to_category = to,
              .to_id = ref.str()});
        continue;
      }
      check_reference(from, id.str(), to, ref);
    }
  }

  void check(const Loss& loss) {
    if (loss.description.empty()) {
      push({.kind = ValidationErrorKind::EmptyDescription,
            .category = Category::Loss,
            .id = loss.id.str()});
    }
  }

  void check(const Hazard& h) { check_links(Category::Hazard, h.id, Category::Loss, h.losses); }

  void check(const Node&) {}

  void check(const ControlAction& a) {
    check_reference(Category::Action, a.id.str(), Category::Node, a.controller);
  }

  void check(const Uca& u) {
    check_reference(Category::Uca, u.id.str(), Category::Action, u.action);
    check_links(Category::Uca, u.id, Category::Hazard, u.hazards);
  }

  void check(const CausalScenario& s) {
    check_reference(Category::Scenario, s.id.str(), Category::Uca, s.uca);
    const auto* uca = lookup<Uca>(Category::Uca, s.uca);
    if (uca == nullptr) return;
    const auto* action = lookup<ControlAction>(Category::Action, uca->action);
    if (action == nullptr) return;
    const auto* controller = lookup<Node>(Category::Node, action->controller);
    if (controller == nullptr) return;
    if (controller->stage != s.stage) {
      push({.kind = ValidationErrorKind::StageMismatch,
            .category = Category::Scenario,
            .id = s.id.str(),
            .declared_stage = s.stage,
            .derived_stage = controller->stage});
    }
  }

  void check(const SafetyRequirement& r) {
    check_links(Category::Requirement, r.id, Category::Scenario, r.scenarios);
  }

  void check_edge(const Edge& e) {
    const std::string name = e.from.str() + "->" + e.to.str();
    if (e.from == e.to) {
      push({.kind = ValidationErrorKind::SelfLoop, .category = Category::Node, .id = name});
    }
    check_reference(Category::Node, name, Category::Node, e.from);
    if (e.to != e.from) check_reference(Category::Node, name, Category::Node, e.to);
  }

  void push(ValidationError error) {
    error.line = line_;
    errors_.push_back(std::move(error));
  }

  std::span<const RawDeclaration> decls_;
  Registry registry_;
  std::vector<ValidationError> errors_;
  std::size_t line_ = 0;
};

}  // namespace

BuildResult build_model(std::span<const RawDeclaration> declarations) {
  auto errors = Validator(declarations).run();
  if (!errors.empty()) return fail(ValidationFailure{std::move(errors)});

  SafetyModel model;
  bool named = false;
  for (const auto& decl : declarations) {
    std::visit(
        [&](const auto& d) {
          using T = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<T, ModelHeader>) {
            if (!named) model.name_ = d.name;
            named = true;
          } else if constexpr (std::is_same_v<T, Loss>) {
            model.loss_index_.emplace(d.id.str(), model.losses_.size());
            model.losses_.push_back(d);
          } else if constexpr (std::is_same_v<T, Hazard>) {
            model.hazard_index_.emplace(d.id.str(), model.hazards_.size());
            model.hazards_.push_back(d);
          } else if constexpr (std::is_same_v<T, Node>) {
            model.node_index_.emplace(d.id.str(), model.nodes_.size());
            model.nodes_.push_back(d);
          } else if constexpr (std::is_same_v<T, Edge>) {
            model.edges_.push_back(d);
          } else if constexpr (std::is_same_v<T, ControlAction>) {
            model.action_index_.emplace(d.id.str(), model.actions_.size());
            model.actions_.push_back(d);
          } else if constexpr (std::is_same_v<T, Uca>) {
            model.uca_index_.emplace(d.id.str(), model.ucas_.size());
            model.ucas_.push_back(d);
          } else if constexpr (std::is_same_v<T, CausalScenario>) {
            model.scenario_index_.emplace(d.id.str(), model.scenarios_.size());
            model.scenarios_.push_back(d);
          } else if constexpr (std::is_same_v<T, SafetyRequirement>) {
            model.requirement_index_.emplace(d.id.str(), model.requirements_.size());
            model.requirements_.push_back(d);
          }
        },
        decl.body);
  }
  return model;
}

std::vector<RawDeclaration> extract_declarations(const SafetyModel& model) {
  std::vector<RawDeclaration> out;
  out.push_back({ModelHeader{model.name()}});
  auto append = [&out](const auto& registry) {
    for (const auto& item : registry) out.push_back({item});
  };
  append(model.losses());
  append(model.hazards());
  append(model.nodes());
  append(model.edges());
  append(model.actions());
  append(model.ucas());
  append(model.scenarios());
  append(model.requirements());
  return out;
}

std::string LookupError::message() const {
  if (kind == LookupErrorKind::UnknownId) return "unknown id '" + id + "'";
  return std::string(category_name(category.value_or(Category::Loss))) + " '" + id +
         "' has no lifecycle stage";
}

Result<Stage, LookupError> stage_of(const SafetyModel& model, const Identifier& id) {
  if (const auto* node = model.find_node(id)) return node->stage;
  if (const auto* action = model.find_action(id)) return model.action_stage(*action);
  if (const auto* uca = model.find_uca(id)) return model.uca_stage(*uca);
  if (const auto* scenario = model.find_scenario(id)) return scenario->stage;
  for (Category c : {Category::Loss, Category::Hazard, Category::Requirement}) {
    if (model.contains(c, id)) {
      return fail(LookupError{LookupErrorKind::StagelessCategory, id.str(), c});
    }
  }
  return fail(LookupError{LookupErrorKind::UnknownId, id.str(), std::nullopt});
}

std::optional<std::size_t> chain_level(Category category) {
  for (std::size_t i = 0; i < kChainLevels.size(); ++i) {
    if (kChainLevels[i] == category) return i;
  }
  return std::nullopt;
}

std::optional<Category> chain_category_of(const SafetyModel& model, const Identifier& id) {
  for (Category c : kChainLevels) {
    if (model.contains(c, id)) return c;
  }
  return std::nullopt;
}

Result<ChainNeighbors, LookupError> resolve_chain_neighbors(const SafetyModel& model,
                                                           const Identifier& id) {
  auto category = chain_category_of(model, id);
  if (!category) return fail(LookupError{LookupErrorKind::UnknownId, id.str(), std::nullopt});
  return resolve_chain_neighbors(model, *category, id);
}

Result<ChainNeighbors, LookupError> resolve_chain_neighbors(const SafetyModel& model,
                                                           Category category,
                                                           const Identifier& id) {
  if (!chain_level(category) || !model.contains(category, id)) {
    return fail(LookupError{LookupErrorKind::UnknownId, id.str(), category});
  }
  ChainNeighbors n{category, {}, {}};
  auto contains = [](const IdList& list, const Identifier& x) {
    return std::find(list.begin(), list.end(), x) != list.end();
  };
  switch (category) {
    case Category::Loss:
      for (const auto& h : model.hazards()) {
        if (contains(h.losses, id)) n.upstream.push_back(h.id);
      }
      break;
    case Category::Hazard:
      for (const auto& u : model.ucas()) {
        if (contains(u.hazards, id)) n.upstream.push_back(u.id);
      }
      n.downstream = model.find_hazard(id)->losses;
      break;
    case Category::Uca:
      for (const auto& s : model.scenarios()) {
        if (s.uca == id) n.upstream.push_back(s.id);
      }
      n.downstream = model.find_uca(id)->hazards;
      break;
    case Category::Scenario:
      for (const auto& r : model.requirements()) {
        if (contains(r.scenarios, id)) n.upstream.push_back(r.id);
      }
      n.downstream = {model.find_scenario(id)->uca};
      break;
    case Category::Requirement:
      n.downstream = model.find_requirement(id)->scenarios;
      break;
    default:
      break;
  }
  return n;
}

}  // namespace unistpa
