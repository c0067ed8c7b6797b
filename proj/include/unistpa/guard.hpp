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
 * @file guard.hpp
 * @brief Runtime monitor/response state machine and trace replay.
 *
 * Three monitors report a discrete risk level per step. The decision step
 * aggregates the latest level of every monitor, maps the aggregate to a
 * response tier through a GuardPolicy, and applies hysteresis:
 *
 * - escalation takes effect on the step it is computed
 * - de-escalation drops one tier after `hold` consecutive lower steps
 * - SystemDeactivation never releases
 *
 * Every monitor at Degraded or worse produces a feedback ticket addressed to
 * the lifecycle stage that owns its failure class.
 */

#ifndef UNISTPA_GUARD_HPP
#define UNISTPA_GUARD_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unistpa/model.hpp"
#include "unistpa/parser.hpp"
#include "unistpa/result.hpp"

namespace unistpa::guard {

enum class MonitorSource { EgoMotion, Perception, Trajectory };

inline constexpr std::array<MonitorSource, 3> kAllSources = {
    MonitorSource::EgoMotion, MonitorSource::Perception, MonitorSource::Trajectory};

enum class RiskLevel { Nominal, Degraded, Critical };

inline constexpr std::array<RiskLevel, 3> kAllRiskLevels = {RiskLevel::Nominal, RiskLevel::Degraded,
                                                            RiskLevel::Critical};

enum class ResponseLevel {
  Continue,
  PerformanceDegradation,
  FunctionalEscalation,
  TakeoverRequest,
  SystemDeactivation,
};

inline constexpr std::array<ResponseLevel, 5> kAllResponses = {
    ResponseLevel::Continue, ResponseLevel::PerformanceDegradation,
    ResponseLevel::FunctionalEscalation, ResponseLevel::TakeoverRequest,
    ResponseLevel::SystemDeactivation};

/// Lowercase file-format names: `ego_motion`, `perception`, `trajectory`.
std::string_view source_keyword(MonitorSource source);
std::string_view risk_keyword(RiskLevel level);
/// snake_case tier names, e.g. `takeover_request`.
std::string_view response_keyword(ResponseLevel level);

/// Case-insensitive. `egomotion` is accepted as an alias of `ego_motion`.
std::optional<MonitorSource> parse_source(std::string_view text);
std::optional<RiskLevel> parse_risk(std::string_view text);
std::optional<ResponseLevel> parse_response(std::string_view text);

struct MonitorReading {
  std::uint64_t step = 0;
  MonitorSource source = MonitorSource::EgoMotion;
  RiskLevel level = RiskLevel::Nominal;
  std::size_t line = 0;  ///< source line in a trace file, 0 when built in code

  friend bool operator==(const MonitorReading&, const MonitorReading&) = default;
};

/// Latest level per source, indexed by MonitorSource.
using LevelMap = std::array<RiskLevel, 3>;

struct Aggregate {
  RiskLevel level = RiskLevel::Nominal;
  std::size_t count_at_max = 0;

  friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

Aggregate aggregate_risk(const LevelMap& levels);

/// Aggregated risk shapes the policy maps to tiers. `CriticalSustained`
/// applies once Critical has persisted for `persistence` steps and is
/// combined with the instantaneous pattern by taking the higher tier.
enum class RiskPattern {
  Nominal,
  DegradedOne,
  DegradedMany,
  CriticalOne,
  CriticalMany,
  CriticalSustained,
};

inline constexpr std::array<RiskPattern, 6> kAllPatterns = {
    RiskPattern::Nominal,     RiskPattern::DegradedOne,  RiskPattern::DegradedMany,
    RiskPattern::CriticalOne, RiskPattern::CriticalMany, RiskPattern::CriticalSustained};

std::string_view pattern_keyword(RiskPattern pattern);
std::optional<RiskPattern> parse_pattern(std::string_view text);

RiskPattern classify(const Aggregate& aggregate);

struct GuardPolicy {
  std::array<ResponseLevel, 6> rules = {
      ResponseLevel::Continue,           ResponseLevel::PerformanceDegradation,
      ResponseLevel::FunctionalEscalation, ResponseLevel::TakeoverRequest,
      ResponseLevel::SystemDeactivation, ResponseLevel::SystemDeactivation};
  int deescalation_hold = 3;
  int deactivation_persistence = 2;

  ResponseLevel rule(RiskPattern pattern) const { return rules[static_cast<std::size_t>(pattern)]; }

  /// Empty when usable: hold and persistence >= 1 and the rule table is
  /// non-decreasing along Nominal..CriticalMany with CriticalSustained at or
  /// above CriticalOne.
  std::vector<std::string> problems() const;

  friend bool operator==(const GuardPolicy&, const GuardPolicy&) = default;
};

/// Tier the policy assigns to `levels` given a Critical streak (including
/// this step) before hysteresis.
ResponseLevel computed_response(const GuardPolicy& policy, const LevelMap& levels,
                                int critical_streak);

struct GuardState {
  LevelMap last_levels = {RiskLevel::Nominal, RiskLevel::Nominal, RiskLevel::Nominal};
  ResponseLevel current_response = ResponseLevel::Continue;
  int hold_counter = 0;
  int critical_streak = 0;
  std::optional<std::uint64_t> last_step;

  friend bool operator==(const GuardState&, const GuardState&) = default;
};

struct FeedbackTicket {
  std::uint64_t step = 0;
  MonitorSource source = MonitorSource::EgoMotion;
  Stage target_stage = Stage::IG;
  std::string note;

  friend bool operator==(const FeedbackTicket&, const FeedbackTicket&) = default;
};

struct ResponseDecision {
  std::uint64_t step = 0;
  ResponseLevel response = ResponseLevel::Continue;
  std::vector<MonitorSource> triggering_sources;  ///< sources at the aggregated max; empty at Nominal
  std::vector<FeedbackTicket> tickets;

  friend bool operator==(const ResponseDecision&, const ResponseDecision&) = default;
};

/// Fixed routing: Trajectory -> VF, Perception -> LT, EgoMotion -> DP.
Stage route_feedback(MonitorSource source);

enum class GuardErrorKind { NonMonotonicStep, EmptyStep, MixedSteps, InvalidPolicy };

struct GuardError {
  GuardErrorKind kind;
  std::uint64_t step = 0;
  std::uint64_t previous_step = 0;
  std::size_t index = 0;  ///< offending position in the reading list
  std::size_t line = 0;
  std::string detail{};

  std::string message() const;
};

struct StepOutcome {
  GuardState state;
  ResponseDecision decision;
};

/// One decision from readings that all carry the same step.
Result<StepOutcome, GuardError> decide_step(const GuardState& state, const GuardPolicy& policy,
                                            std::span<const MonitorReading> readings);

/// One decision per distinct step, folded from a fresh GuardState.
Result<std::vector<ResponseDecision>, GuardError> simulate_trace(
    std::span<const MonitorReading> trace, const GuardPolicy& policy = {});

// ---------------------------------------------------------------------------
// File formats

/// `STEP SOURCE LEVEL` per line, `#` comments, case-insensitive words.
/// Step order is not checked here; simulate_trace reports it.
Result<std::vector<MonitorReading>, std::vector<ParseDiagnostic>> parse_trace(std::string_view text);

/// `policy { hold=N persistence=N rule PATTERN -> TIER ... }`. Omitted
/// entries keep their defaults.
Result<GuardPolicy, std::vector<ParseDiagnostic>> parse_policy(std::string_view text);

/// `STEP tier [source->STAGE ...]`, one line per decision.
std::string render_decision_line(const ResponseDecision& decision);
std::string render_decision_log(std::span<const ResponseDecision> decisions);
/// JSON array of decisions, sorted keys, trailing newline.
std::string export_decision_log(std::span<const ResponseDecision> decisions);

}  // namespace unistpa::guard

#endif  // UNISTPA_GUARD_HPP
