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
 * @file reports.hpp
 * @brief Deterministic report artifacts: JSON export (and its importer),
 * pipe-table markdown, and a stage-clustered Graphviz DOT rendering.
 */

#ifndef UNISTPA_REPORTS_HPP
#define UNISTPA_REPORTS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unistpa/analysis.hpp"
#include "unistpa/model.hpp"
#include "unistpa/result.hpp"

namespace unistpa {

inline constexpr std::string_view kToolName = "unistpa";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

struct ReportMetadata {
  std::string tool_version;
  std::string input_digest;  ///< sha256 of render_canonical(model)
};

struct ReportBundle {
  SafetyModel model;
  UcaWorksheet worksheet;
  TraceAudit audit;
  CoverageMetrics coverage;
  LoopFindings loops;
  ReportMetadata metadata;
};

ReportBundle make_bundle(SafetyModel model, std::span<const Waiver> waivers = {});

/// JSON document, keys sorted, 2-space indent, trailing newline.
std::string export_structured(const ReportBundle& bundle);

/// Rebuilds the model from an export_structured() document. Derived
/// sections (analysis, metadata) are ignored.
Result<SafetyModel, std::vector<std::string>> import_structured(std::string_view json_text);

/// Markdown: losses, hazards, UCAs, causal scenarios, requirements, then an
/// "Analysis Findings" section.
std::string render_tables(const ReportBundle& bundle);

/// Graphviz digraph with one `cluster_<STAGE>` subgraph per lifecycle stage.
std::string export_graph(const SafetyModel& model);

struct DotCheck {
  bool valid = false;
  std::string error;
  std::vector<std::string> cluster_ids;
};

/// Syntax check against the DOT grammar (graph, subgraph, node, edge and
/// attribute statements). Also collects the ids of `cluster*` subgraphs.
DotCheck check_dot(std::string_view text);

}  // namespace unistpa

#endif  // UNISTPA_REPORTS_HPP
