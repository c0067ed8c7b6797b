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
 * @file analysis.hpp
 * @brief Analytical passes over a SafetyModel.
 *
 * - uca_worksheet: control action x failure mode matrix, documented vs gaps
 * - traceability_audit: orphans and dangling links along the
 *   loss <- hazard <- UCA <- scenario <- requirement chain
 * - coverage_metrics: ratios over worksheet and chain
 * - trace_chain: every maximal path from one element, up or down the chain
 * - control_loop_audit: controllers lacking feedback, isolated nodes,
 *   cross-stage edges
 *
 * All passes are pure functions of their inputs.
 */

#ifndef UNISTPA_ANALYSIS_HPP
#define UNISTPA_ANALYSIS_HPP

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unistpa/model.hpp"
#include "unistpa/parser.hpp"
#include "unistpa/result.hpp"

namespace unistpa {

/// Exact fraction; the denominator is kept as computed (14/56 stays 14/56).
struct Ratio {
  std::size_t numerator = 0;
  std::size_t denominator = 0;

  /// 0/0 counts as complete (nothing to cover).
  double value() const;
  /// Four decimal places, rounded half to even.
  std::string decimal() const;
  /// "5/6 (0.8333)"
  std::string to_string() const;

  bool equals(std::size_t num, std::size_t den) const;

  friend bool operator==(const Ratio&, const Ratio&) = default;
};

// ---------------------------------------------------------------------------
// Worksheet

/// A documented exemption for one worksheet cell, read from a waiver file.
struct Waiver {
  Identifier action;
  FailureMode mode;
  std::string reason;
  std::size_t line = 0;
};

/// Waiver file: one `ACTION_ID MODE "reason"` per line, `#` comments.
Result<std::vector<Waiver>, std::vector<ParseDiagnostic>> parse_waivers(std::string_view text);

enum class CellStatus { Documented, Waived, Gap };

struct WorksheetCell {
  FailureMode mode;
  IdList ucas;
  std::optional<std::string> waiver;

  CellStatus status() const {
    if (!ucas.empty()) return CellStatus::Documented;
    return waiver ? CellStatus::Waived : CellStatus::Gap;
  }
};

struct WorksheetRow {
  Identifier action;
  std::string name;
  Stage stage;
  std::vector<WorksheetCell> cells;  ///< one per FailureMode, kAllFailureModes order
};

struct UcaWorksheet {
  std::vector<WorksheetRow> rows;
  std::vector<Waiver> unmatched_waivers;  ///< unknown action or already documented

  std::size_t cell_count() const;
  std::size_t count(CellStatus status) const;
  std::size_t documented_in(FailureMode mode) const;
};

UcaWorksheet uca_worksheet(const SafetyModel& model, std::span<const Waiver> waivers = {});

// ---------------------------------------------------------------------------
// Traceability audit

struct AuditFinding {
  Severity severity;
  Category category;
  std::string id;
  std::string message;
};

struct DanglingLink {
  Category from_category;
  std::string from;
  Category to_category;
  std::string to;
};

struct TraceAudit {
  IdList orphan_losses;     ///< referenced by no hazard
  IdList orphan_hazards;    ///< referenced by no UCA
  IdList orphan_ucas;       ///< referenced by no causal scenario
  IdList orphan_scenarios;  ///< referenced by no requirement
  IdList unreached_requirements;
  std::vector<DanglingLink> dangling;
  std::vector<AuditFinding> findings;

  bool has_errors() const;
  bool has_warnings() const;
};

TraceAudit traceability_audit(const SafetyModel& model);

/// Lenient audit over unvalidated declarations: dangling references are
/// reported as findings instead of blocking the analysis. Duplicate ids keep
/// their first declaration.
TraceAudit traceability_audit(std::span<const RawDeclaration> declarations);

// ---------------------------------------------------------------------------
// Coverage

struct CoverageMetrics {
  Ratio uca_mode_coverage;
  std::map<Stage, std::size_t> per_stage_uca_counts;
  std::map<FailureMode, std::size_t> per_mode_uca_counts;
  Ratio hazard_mitigation_ratio;
  Ratio loss_mitigation_ratio;
  IdList unmitigated_hazards;
  IdList unmitigated_losses;
};

/// Waived cells count as covered in uca_mode_coverage.
CoverageMetrics coverage_metrics(const SafetyModel& model, std::span<const Waiver> waivers = {});

// ---------------------------------------------------------------------------
// Chain queries

enum class Direction { Upstream, Downstream };

std::string_view direction_name(Direction direction);

struct TracePath {
  IdList ids;              ///< origin first
  bool truncated = false;  ///< ended before reaching the terminal level
};

struct TraceChain {
  Identifier origin;
  Category origin_category;
  Direction direction;
  std::vector<TracePath> paths;

  /// Distinct ids of `category` across all paths, in first-seen order.
  IdList reached(Category category) const;
};

Result<TraceChain, LookupError> trace_chain(const SafetyModel& model, const Identifier& origin,
                                            Direction direction);
Result<TraceChain, LookupError> trace_chain(const SafetyModel& model, Category category,
                                            const Identifier& origin, Direction direction);

// ---------------------------------------------------------------------------
// Control structure

struct LoopFindings {
  IdList controllers_without_feedback;
  IdList unreachable_nodes;
  std::vector<Edge> cross_stage_edges;
};

LoopFindings control_loop_audit(const SafetyModel& model);

}  // namespace unistpa

#endif  // UNISTPA_ANALYSIS_HPP
