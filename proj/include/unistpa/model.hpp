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

/**
 * @file model.hpp
 * @brief Domain types of a lifecycle STPA model and the validating builder.
 *
 * A SafetyModel is assembled from an ordered list of raw declarations by
 * build_model(). Construction either yields a model in which every identifier
 * is unique within its category and every cross-reference resolves, or a
 * ValidationFailure listing every violation found. Models are immutable once
 * built.
 */

#ifndef UNISTPA_MODEL_HPP
#define UNISTPA_MODEL_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "unistpa/result.hpp"

namespace unistpa {

/// Identifier token: `[A-Za-z][A-Za-z0-9_.-]*`, compared case-sensitively.
class Identifier {
 public:
  /// Throws std::invalid_argument when `text` is not a legal identifier.
  explicit Identifier(std::string text);

  static bool is_valid(std::string_view text);

  const std::string& str() const { return text_; }

  friend bool operator==(const Identifier&, const Identifier&) = default;
  friend auto operator<=>(const Identifier&, const Identifier&) = default;

 private:
  std::string text_;
};

using IdList = std::vector<Identifier>;

/// Lifecycle stages in development-time order.
enum class Stage { IG, DP, LT, VF, DT };

inline constexpr std::array<Stage, 5> kAllStages = {Stage::IG, Stage::DP, Stage::LT,
                                                    Stage::VF, Stage::DT};

std::string_view stage_tag(Stage stage);
std::string_view stage_display_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view tag);

enum class NodeKind { Technical, Human };
enum class EdgeKind { Control, Feedback };

/// The four ways a control action can be unsafe.
enum class FailureMode { NotProvided, ProvidedImproperly, MistimedProvision, InappropriateDuration };

inline constexpr std::array<FailureMode, 4> kAllFailureModes = {
    FailureMode::NotProvided, FailureMode::ProvidedImproperly, FailureMode::MistimedProvision,
    FailureMode::InappropriateDuration};

/// DSL keyword (`not_provided`, `provided_improperly`, `mistimed`, `inappropriate_duration`).
std::string_view mode_keyword(FailureMode mode);
std::string_view mode_display_name(FailureMode mode);
std::optional<FailureMode> parse_mode(std::string_view keyword);

std::string_view node_kind_keyword(NodeKind kind);
std::string_view edge_kind_keyword(EdgeKind kind);

/// Identifier namespaces. Ids are unique within a category, not across them.
enum class Category { Loss, Hazard, Node, Action, Uca, Scenario, Requirement };

std::string_view category_name(Category category);

enum class Severity { Error, Warning };

struct Loss {
  Identifier id;
  std::string description;
  bool safety_critical = true;

  friend bool operator==(const Loss&, const Loss&) = default;
};

struct Hazard {
  Identifier id;
  std::string description;
  IdList losses;

  friend bool operator==(const Hazard&, const Hazard&) = default;
};

struct Node {
  Identifier id;
  Stage stage;
  NodeKind kind;
  std::string label;

  friend bool operator==(const Node&, const Node&) = default;
};

/// Directed control or feedback link. Whether it crosses stages is derived
/// from its endpoints, never stored.
struct Edge {
  Identifier from;
  Identifier to;
  EdgeKind kind;
  std::string label;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct ControlAction {
  Identifier id;
  Identifier controller;
  std::string name;

  friend bool operator==(const ControlAction&, const ControlAction&) = default;
};

struct Uca {
  Identifier id;
  Identifier action;
  FailureMode mode;
  IdList hazards;
  std::string description;

  friend bool operator==(const Uca&, const Uca&) = default;
};

struct CausalScenario {
  Identifier id;
  Identifier uca;
  Stage stage;
  std::string description;

  friend bool operator==(const CausalScenario&, const CausalScenario&) = default;
};

struct SafetyRequirement {
  Identifier id;
  IdList scenarios;
  std::string description;

  friend bool operator==(const SafetyRequirement&, const SafetyRequirement&) = default;
};

struct ModelHeader {
  std::string name;

  friend bool operator==(const ModelHeader&, const ModelHeader&) = default;
};

using Declaration = std::variant<ModelHeader, Loss, Hazard, Node, Edge, ControlAction, Uca,
                                 CausalScenario, SafetyRequirement>;

/// One declaration plus the source line it came from (0 when built in code).
struct RawDeclaration {
  Declaration body;
  std::size_t line = 0;

  friend bool operator==(const RawDeclaration&, const RawDeclaration&) = default;
};

enum class ValidationErrorKind {
  DuplicateId,
  DanglingReference,
  EmptyLinkSet,
  SelfLoop,
  StageMismatch,
  EmptyDescription,
  DuplicateUca,
  DuplicateLink,
  DuplicateHeader,
};

/// One invariant violation. Fields not relevant to `kind` stay empty.
struct ValidationError {
  ValidationErrorKind kind;
  Category category = Category::Loss;  ///< category of the offending declaration
  std::string id{};                    ///< offending id (edges use "from->to")
  std::optional<Category> to_category{};
  std::string to_id{};
  std::optional<Stage> declared_stage{};
  std::optional<Stage> derived_stage{};
  std::size_t line = 0;

  std::string message() const;

  friend bool operator==(const ValidationError&, const ValidationError&) = default;
};

struct ValidationFailure {
  std::vector<ValidationError> errors;
};

class SafetyModel;

using BuildResult = Result<SafetyModel, ValidationFailure>;

/// Validated, immutable registry of every analysis artifact. Registries keep
/// declaration order.
class SafetyModel {
 public:
  const std::string& name() const { return name_; }
  const std::vector<Loss>& losses() const { return losses_; }
  const std::vector<Hazard>& hazards() const { return hazards_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<ControlAction>& actions() const { return actions_; }
  const std::vector<Uca>& ucas() const { return ucas_; }
  const std::vector<CausalScenario>& scenarios() const { return scenarios_; }
  const std::vector<SafetyRequirement>& requirements() const { return requirements_; }

  const Loss* find_loss(const Identifier& id) const;
  const Hazard* find_hazard(const Identifier& id) const;
  const Node* find_node(const Identifier& id) const;
  const ControlAction* find_action(const Identifier& id) const;
  const Uca* find_uca(const Identifier& id) const;
  const CausalScenario* find_scenario(const Identifier& id) const;
  const SafetyRequirement* find_requirement(const Identifier& id) const;

  bool contains(Category category, const Identifier& id) const;

  /// Stage of an action's controller; actions always resolve in a built model.
  Stage action_stage(const ControlAction& action) const;
  Stage uca_stage(const Uca& uca) const;
  bool is_cross_stage(const Edge& edge) const;

  friend bool operator==(const SafetyModel& a, const SafetyModel& b) {
    return a.name_ == b.name_ && a.losses_ == b.losses_ && a.hazards_ == b.hazards_ &&
           a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.actions_ == b.actions_ &&
           a.ucas_ == b.ucas_ && a.scenarios_ == b.scenarios_ &&
           a.requirements_ == b.requirements_;
  }

 private:
  friend BuildResult build_model(std::span<const RawDeclaration> declarations);

  using Index = std::unordered_map<std::string, std::size_t>;

  SafetyModel() = default;

  std::string name_;
  std::vector<Loss> losses_;
  std::vector<Hazard> hazards_;
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<ControlAction> actions_;
  std::vector<Uca> ucas_;
  std::vector<CausalScenario> scenarios_;
  std::vector<SafetyRequirement> requirements_;

  Index loss_index_, hazard_index_, node_index_, action_index_, uca_index_, scenario_index_,
      requirement_index_;
};

/// Validates declarations and assembles a model. Reports every violation,
/// never a partially built model.
BuildResult build_model(std::span<const RawDeclaration> declarations);

/// Declarations that rebuild `model`: header first, then each registry in
/// canonical category order.
std::vector<RawDeclaration> extract_declarations(const SafetyModel& model);

enum class LookupErrorKind { UnknownId, StagelessCategory };

struct LookupError {
  LookupErrorKind kind;
  std::string id;
  std::optional<Category> category;

  std::string message() const;
};

/// Stage of a node, action (its controller), UCA (its action) or scenario
/// (declared). Stage-bearing categories are searched before stageless ones.
Result<Stage, LookupError> stage_of(const SafetyModel& model, const Identifier& id);

/// The five categories of the loss <- hazard <- UCA <- scenario <- requirement
/// chain, ordered from the loss end.
inline constexpr std::array<Category, 5> kChainLevels = {
    Category::Loss, Category::Hazard, Category::Uca, Category::Scenario, Category::Requirement};

/// Position of `category` in kChainLevels, if it is a chain category.
std::optional<std::size_t> chain_level(Category category);

/// First chain category (loss end first) that declares `id`.
std::optional<Category> chain_category_of(const SafetyModel& model, const Identifier& id);

struct ChainNeighbors {
  Category category;
  IdList upstream;    ///< one hop toward requirements
  IdList downstream;  ///< one hop toward losses
};

Result<ChainNeighbors, LookupError> resolve_chain_neighbors(const SafetyModel& model,
                                                           const Identifier& id);
Result<ChainNeighbors, LookupError> resolve_chain_neighbors(const SafetyModel& model,
                                                           Category category,
                                                           const Identifier& id);

}  // namespace unistpa

template <>
struct std::hash<unistpa::Identifier> {
  std::size_t operator()(const unistpa::Identifier& id) const noexcept {
    return std::hash<std::string>{}(id.str());
  }
};

#endif  // UNISTPA_MODEL_HPP
