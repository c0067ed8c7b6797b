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

#include "unistpa/guard.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "json.hpp"

namespace unistpa::guard {

namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(std::string_view text, const std::array<Enum, N>& all,
                           std::string_view (*name)(Enum)) {
  const std::string key = lower(text);
  for (Enum e : all) {
    if (name(e) == key) return e;
  }
  return std::nullopt;
}

std::size_t index_of(MonitorSource source) { return static_cast<std::size_t>(source); }

}  // namespace

std::string_view source_keyword(MonitorSource source) {
  switch (source) {
    case MonitorSource::EgoMotion: return "ego_motion";
    case MonitorSource::Perception: return "perception";
    case MonitorSource::Trajectory: return "trajectory";
  }
  return "?";
}

std::string_view risk_keyword(RiskLevel level) {
  switch (level) {
    case RiskLevel::Nominal: return "nominal";
    case RiskLevel::Degraded: return "degraded";
    case RiskLevel::Critical: return "critical";
  }
  return "?";
}

std::string_view response_keyword(ResponseLevel level) {
  switch (level) {
    case ResponseLevel::Continue: return "continue";
    case ResponseLevel::PerformanceDegradation: return "performance_degradation";
    case ResponseLevel::FunctionalEscalation: return "functional_escalation";
    case ResponseLevel::TakeoverRequest: return "takeover_request";
    case ResponseLevel::SystemDeactivation: return "system_deactivation";
  }
  return "?";
}

std::string_view pattern_keyword(RiskPattern pattern) {
  switch (pattern) {
    case RiskPattern::Nominal: return "nominal";
    case RiskPattern::DegradedOne: return "degraded_one";
    case RiskPattern::DegradedMany: return "degraded_many";
    case RiskPattern::CriticalOne: return "critical_one";
    case RiskPattern::CriticalMany: return "critical_many";
    case RiskPattern::CriticalSustained: return "critical_sustained";
  }
  return "?";
}

std::optional<MonitorSource> parse_source(std::string_view text) {
  if (lower(text) == "egomotion") return MonitorSource::EgoMotion;
  return lookup(text, kAllSources, source_keyword);
}

std::optional<RiskLevel> parse_risk(std::string_view text) {
  return lookup(text, kAllRiskLevels, risk_keyword);
}

std::optional<ResponseLevel> parse_response(std::string_view text) {
  return lookup(text, kAllResponses, response_keyword);
}

std::optional<RiskPattern> parse_pattern(std::string_view text) {
  return lookup(text, kAllPatterns, pattern_keyword);
}

Aggregate aggregate_risk(const LevelMap& levels) {
  const RiskLevel max = *std::max_element(levels.begin(), levels.end());
  return {max, static_cast<std::size_t>(std::count(levels.begin(), levels.end(), max))};
}

RiskPattern classify(const Aggregate& aggregate) {
  switch (aggregate.level) {
    case RiskLevel::Nominal: return RiskPattern::Nominal;
    case RiskLevel::Degraded:
      return aggregate.count_at_max >= 2 ? RiskPattern::DegradedMany : RiskPattern::DegradedOne;
    case RiskLevel::Critical:
      return aggregate.count_at_max >= 2 ? RiskPattern::CriticalMany : RiskPattern::CriticalOne;
  }
  return RiskPattern::Nominal;
}

std::vector<std::string> GuardPolicy::problems() const {
  std::vector<std::string> out;
  if (deescalation_hold < 1) out.push_back("hold must be at least 1");
  if (deactivation_persistence < 1) out.push_back("persistence must be at least 1");
  for (std::size_t i = 1; i <= static_cast<std::size_t>(RiskPattern::CriticalMany); ++i) {
    if (rules[i] < rules[i - 1]) {
      out.push_back("rule " + std::string(pattern_keyword(kAllPatterns[i])) + " maps below rule " +
                    std::string(pattern_keyword(kAllPatterns[i - 1])));
    }
  }
  if (rule(RiskPattern::CriticalSustained) < rule(RiskPattern::CriticalOne)) {
    out.push_back("rule critical_sustained maps below rule critical_one");
  }
  return out;
}

ResponseLevel computed_response(const GuardPolicy& policy, const LevelMap& levels,
                                int critical_streak) {
  ResponseLevel tier = policy.rule(classify(aggregate_risk(levels)));
  if (critical_streak >= policy.deactivation_persistence) {
    tier = std::max(tier, policy.rule(RiskPattern::CriticalSustained));
  }
  return tier;
}

Stage route_feedback(MonitorSource source) {
  switch (source) {
    case MonitorSource::Trajectory: return Stage::VF;
    case MonitorSource::Perception: return Stage::LT;
    case MonitorSource::EgoMotion: return Stage::DP;
  }
  return Stage::VF;
}

std::string GuardError::message() const {
  std::string where = line > 0 ? "line " + std::to_string(line) : "reading " + std::to_string(index);
  switch (kind) {
    case GuardErrorKind::NonMonotonicStep:
      return where + ": step " + std::to_string(step) + " is before step " +
             std::to_string(previous_step);
    case GuardErrorKind::EmptyStep: return "no readings for the step";
    case GuardErrorKind::MixedSteps:
      return where + ": step " + std::to_string(step) + " differs from step " +
             std::to_string(previous_step) + " of the first reading";
    case GuardErrorKind::InvalidPolicy: return "invalid policy: " + detail;
  }
  return "guard error";
}

Result<StepOutcome, GuardError> decide_step(const GuardState& state, const GuardPolicy& policy,
                                            std::span<const MonitorReading> readings) {
  if (auto issues = policy.problems(); !issues.empty()) {
    return fail(GuardError{GuardErrorKind::InvalidPolicy, 0, 0, 0, 0, issues.front()});
  }
  if (readings.empty()) return fail(GuardError{GuardErrorKind::EmptyStep});
  const std::uint64_t step = readings.front().step;
  for (std::size_t i = 0; i < readings.size(); ++i) {
    if (readings[i].step != step) {
      return fail(GuardError{GuardErrorKind::MixedSteps, readings[i].step, step, i, readings[i].line});
    }
  }
  if (state.last_step && step < *state.last_step) {
    return fail(GuardError{GuardErrorKind::NonMonotonicStep, step, *state.last_step, 0,
                           readings.front().line});
  }

  StepOutcome out{state, {}};
  GuardState& next = out.state;
  next.last_step = step;
  for (const auto& r : readings) next.last_levels[index_of(r.source)] = r.level;

  const Aggregate agg = aggregate_risk(next.last_levels);
  next.critical_streak = agg.level == RiskLevel::Critical ? state.critical_streak + 1 : 0;
  const ResponseLevel computed = computed_response(policy, next.last_levels, next.critical_streak);

  if (state.current_response == ResponseLevel::SystemDeactivation) {
    next.hold_counter = 0;
  } else if (computed >= state.current_response) {
    next.current_response = computed;
    next.hold_counter = 0;
  } else if (state.hold_counter + 1 >= policy.deescalation_hold) {
    next.current_response = static_cast<ResponseLevel>(static_cast<int>(state.current_response) - 1);
    next.hold_counter = 0;
  } else {
    next.hold_counter = state.hold_counter + 1;
  }

  ResponseDecision& decision = out.decision;
  decision.step = step;
  decision.response = next.current_response;
  for (MonitorSource s : kAllSources) {
    const RiskLevel level = next.last_levels[index_of(s)];
    if (agg.level != RiskLevel::Nominal && level == agg.level) decision.triggering_sources.push_back(s);
    if (level >= RiskLevel::Degraded) {
      decision.tickets.push_back({step, s, route_feedback(s),
                                  std::string(source_keyword(s)) + " " +
                                      std::string(risk_keyword(level)) + " at step " +
                                      std::to_string(step)});
    }
  }
  return out;
}

Result<std::vector<ResponseDecision>, GuardError> simulate_trace(
    std::span<const MonitorReading> trace, const GuardPolicy& policy) {
  std::vector<ResponseDecision> decisions;
  GuardState state;
  std::size_t i = 0;
  while (i < trace.size()) {
    std::size_t j = i;
    while (j < trace.size() && trace[j].step == trace[i].step) ++j;
    auto outcome = decide_step(state, policy, trace.subspan(i, j - i));
    if (!outcome) {
      GuardError err = outcome.error();
      err.index += i;
      return fail(std::move(err));
    }
    state = outcome->state;
    decisions.push_back(std::move(outcome->decision));
    i = j;
  }
  return decisions;
}

// ---------------------------------------------------------------------------
// File formats

namespace {

std::string choices(auto all, auto name) {
  std::string out;
  for (auto e : all) {
    if (!out.empty()) out += ", ";
    out += name(e);
  }
  return out;
}

bool is_word(const Token& t) { return t.kind == TokenKind::Ident || t.kind == TokenKind::Keyword; }

std::optional<std::uint64_t> to_u64(std::string_view text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [p, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || p != end) return std::nullopt;
  return v;
}

}  // namespace

Result<std::vector<MonitorReading>, std::vector<ParseDiagnostic>> parse_trace(std::string_view text) {
  TokenStream stream = tokenize(text);
  std::vector<ParseDiagnostic> diagnostics = std::move(stream.diagnostics);
  std::map<std::size_t, std::vector<const Token*>> lines;
  for (const auto& t : stream.tokens) lines[t.span.line].push_back(&t);

  std::vector<MonitorReading> readings;
  for (const auto& [line, tokens] : lines) {
    if (tokens.size() != 3 || tokens[0]->kind != TokenKind::Number || !is_word(*tokens[1]) ||
        !is_word(*tokens[2])) {
      diagnostics.push_back({Severity::Error, "expected 'STEP SOURCE LEVEL'", tokens.front()->span});
      continue;
    }
    auto step = to_u64(tokens[0]->text);
    auto source = parse_source(tokens[1]->text);
    auto level = parse_risk(tokens[2]->text);
    if (!step) {
      diagnostics.push_back({Severity::Error, "step '" + tokens[0]->text + "' is out of range",
                             tokens[0]->span});
    }
    if (!source) {
      diagnostics.push_back({Severity::Error,
                             "unknown monitor source '" + tokens[1]->text + "' (expected one of: " +
                                 choices(kAllSources, source_keyword) + ")",
                             tokens[1]->span});
    }
    if (!level) {
      diagnostics.push_back({Severity::Error,
                             "unknown risk level '" + tokens[2]->text + "' (expected one of: " +
                                 choices(kAllRiskLevels, risk_keyword) + ")",
                             tokens[2]->span});
    }
    if (step && source && level) readings.push_back({*step, *source, *level, line});
  }
  if (has_errors(diagnostics)) return fail(std::move(diagnostics));
  return readings;
}

Result<GuardPolicy, std::vector<ParseDiagnostic>> parse_policy(std::string_view text) {
  TokenStream stream = tokenize(text);
  std::vector<ParseDiagnostic> diagnostics = std::move(stream.diagnostics);
  const auto& toks = stream.tokens;
  GuardPolicy policy;

  auto error = [&](std::string msg, SourceSpan span) {
    diagnostics.push_back({Severity::Error, std::move(msg), span});
  };
  const SourceSpan eof_span = toks.empty() ? SourceSpan{} : toks.back().span;

  std::size_t i = 0;
  if (toks.empty() || !is_word(toks[0]) || toks[0].text != "policy") {
    error("expected 'policy {'", toks.empty() ? SourceSpan{} : toks[0].span);
    return fail(std::move(diagnostics));
  }
  ++i;
  if (i >= toks.size() || toks[i].kind != TokenKind::LBrace) {
    error("expected '{' after 'policy'", i < toks.size() ? toks[i].span : eof_span);
    return fail(std::move(diagnostics));
  }
  ++i;

  std::set<std::string> seen;
  bool closed = false;
  while (i < toks.size()) {
    const Token& t = toks[i];
    if (t.kind == TokenKind::RBrace) {
      closed = true;
      ++i;
      break;
    }
    if (is_word(t) && (t.text == "hold" || t.text == "persistence")) {
      if (i + 2 >= toks.size() || toks[i + 1].kind != TokenKind::Equals ||
          toks[i + 2].kind != TokenKind::Number) {
        error("expected '" + t.text + "=N'", t.span);
        ++i;
        continue;
      }
      if (!seen.insert(t.text).second) error("duplicate setting '" + t.text + "'", t.span);
      const auto v = to_u64(toks[i + 2].text);
      if (!v || *v < 1 || *v > 1000000) {
        error(t.text + " must be between 1 and 1000000", toks[i + 2].span);
      } else {
        (t.text == "hold" ? policy.deescalation_hold : policy.deactivation_persistence) =
            static_cast<int>(*v);
      }
      i += 3;
      continue;
    }
    if (is_word(t) && t.text == "rule") {
      if (i + 3 >= toks.size() || !is_word(toks[i + 1]) || toks[i + 2].kind != TokenKind::Arrow ||
          !is_word(toks[i + 3])) {
        error("expected 'rule PATTERN -> TIER'", t.span);
        ++i;
        continue;
      }
      const auto pattern = parse_pattern(toks[i + 1].text);
      const auto tier = parse_response(toks[i + 3].text);
      if (!pattern) {
        error("unknown risk pattern '" + toks[i + 1].text + "' (expected one of: " +
                  choices(kAllPatterns, pattern_keyword) + ")",
              toks[i + 1].span);
      } else if (!seen.insert("rule " + std::string(pattern_keyword(*pattern))).second) {
        error("duplicate rule for '" + toks[i + 1].text + "'", toks[i + 1].span);
      }
      if (!tier) {
        error("unknown response tier '" + toks[i + 3].text + "' (expected one of: " +
                  choices(kAllResponses, response_keyword) + ")",
              toks[i + 3].span);
      }
      if (pattern && tier) policy.rules[static_cast<std::size_t>(*pattern)] = *tier;
      i += 4;
      continue;
    }
    error("unexpected '" + t.text + "' in policy block", t.span);
    // Resynchronize on the next entry so one bad setting yields one error.
    ++i;
    while (i < toks.size() && toks[i].kind != TokenKind::RBrace &&
           !(is_word(toks[i]) &&
             (toks[i].text == "hold" || toks[i].text == "persistence" || toks[i].text == "rule"))) {
      ++i;
    }
  }
  if (!closed) error("missing '}' at end of policy block", eof_span);
  if (i < toks.size()) error("unexpected content after policy block", toks[i].span);
  if (!has_errors(diagnostics)) {
    for (auto& p : policy.problems()) error(p, toks[0].span);
  }
  if (has_errors(diagnostics)) return fail(std::move(diagnostics));
  return policy;
}

std::string render_decision_line(const ResponseDecision& d) {
  std::string out = std::to_string(d.step) + " " + std::string(response_keyword(d.response));
  for (const auto& t : d.tickets) {
    out += " " + std::string(source_keyword(t.source)) + "->" + std::string(stage_tag(t.target_stage));
  }
  return out;
}

std::string render_decision_log(std::span<const ResponseDecision> decisions) {
  std::string out;
  for (const auto& d : decisions) out += render_decision_line(d) + "\n";
  return out;
}

std::string export_decision_log(std::span<const ResponseDecision> decisions) {
  using nlohmann::json;
  json doc = json::array();
  for (const auto& d : decisions) {
    json triggers = json::array();
    for (auto s : d.triggering_sources) triggers.push_back(source_keyword(s));
    json tickets = json::array();
    for (const auto& t : d.tickets) {
      tickets.push_back({{"step", t.step},
                         {"source", source_keyword(t.source)},
                         {"target_stage", stage_tag(t.target_stage)},
                         {"note", t.note}});
    }
    doc.push_back({{"step", d.step},
                   {"response", response_keyword(d.response)},
                   {"triggering_sources", std::move(triggers)},
                   {"tickets", std::move(tickets)}});
  }
  return doc.dump(2) + "\n";
}

}  // namespace unistpa::guard
