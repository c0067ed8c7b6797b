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

#include "unistpa/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "unistpa/analysis.hpp"
#include "unistpa/guard.hpp"
#include "unistpa/model.hpp"
#include "unistpa/parser.hpp"
#include "unistpa/reports.hpp"

namespace unistpa::cli {

namespace {

namespace fs = std::filesystem;

std::optional<std::string> read_file(const std::string& path) {
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return std::nullopt;
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) return std::nullopt;
  return buf.str();
}

bool write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  return static_cast<bool>(out);
}

void print_diagnostics(std::ostream& err, const std::string& path,
                       const std::vector<ParseDiagnostic>& diagnostics) {
  for (const auto& d : diagnostics) err << path << ":" << format_diagnostic(d) << "\n";
}

void print_validation(std::ostream& err, const std::string& path, const ValidationFailure& failure) {
  for (const auto& e : failure.errors) {
    err << path << ":";
    if (e.line > 0) err << e.line << ":";
    err << " error: " << e.message() << "\n";
  }
}

std::string join(const IdList& ids, std::string_view sep = " ", std::string_view empty = "none") {
  if (ids.empty()) return std::string(empty);
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += sep;
    out += id.str();
  }
  return out;
}

std::string pad(std::string text, std::size_t width) {
  if (text.size() < width) text.append(width - text.size(), ' ');
  return text;
}

/// Loaded model or the exit code explaining why there is none.
struct Loaded {
  std::optional<SafetyModel> model;
  std::vector<RawDeclaration> declarations;
  std::optional<ValidationFailure> failure;
  int status = kOk;
};

Loaded load_model(const std::string& path, std::ostream& err) {
  Loaded out;
  auto text = read_file(path);
  if (!text) {
    err << "error: cannot read '" << path << "'\n";
    out.status = kUsageOrIo;
    return out;
  }
  ModelDocument doc = parse_document(*text);
  print_diagnostics(err, path, doc.diagnostics);
  if (!doc.ok()) {
    out.status = kInvalidInput;
    return out;
  }
  out.declarations = std::move(doc.declarations);
  auto built = build_model(out.declarations);
  if (!built) {
    out.failure = built.error();
    out.status = kInvalidInput;
    return out;
  }
  out.model.emplace(std::move(built).value());
  return out;
}

std::optional<std::vector<Waiver>> load_waivers(const std::string& path, std::ostream& err,
                                                int& status) {
  auto text = read_file(path);
  if (!text) {
    err << "error: cannot read '" << path << "'\n";
    status = kUsageOrIo;
    return std::nullopt;
  }
  auto parsed = parse_waivers(*text);
  if (!parsed) {
    print_diagnostics(err, path, parsed.error());
    status = kInvalidInput;
    return std::nullopt;
  }
  return std::move(parsed).value();
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_check(const std::string& path, std::ostream& out, std::ostream& err) {
  Loaded l = load_model(path, err);
  if (l.failure) print_validation(err, path, *l.failure);
  if (!l.model) return l.status;
  const SafetyModel& m = *l.model;
  out << "ok: " << m.losses().size() << " losses, " << m.hazards().size() << " hazards, "
      << m.ucas().size() << " ucas, " << m.scenarios().size() << " scenarios, "
      << m.requirements().size() << " requirements\n";
  return kOk;
}

int cmd_ucas(const std::string& path, const std::string& waiver_path, bool strict,
             std::ostream& out, std::ostream& err) {
  Loaded l = load_model(path, err);
  if (l.failure) print_validation(err, path, *l.failure);
  if (!l.model) return l.status;
  std::vector<Waiver> waivers;
  if (!waiver_path.empty()) {
    int status = kOk;
    auto w = load_waivers(waiver_path, err, status);
    if (!w) return status;
    waivers = std::move(*w);
  }
  const UcaWorksheet sheet = uca_worksheet(*l.model, waivers);

  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header = {"action", "stage"};
  for (auto mode : kAllFailureModes) header.emplace_back(mode_keyword(mode));
  table.push_back(header);
  for (const auto& row : sheet.rows) {
    std::vector<std::string> line = {row.action.str(), std::string(stage_tag(row.stage))};
    for (const auto& c : row.cells) {
      switch (c.status()) {
        case CellStatus::Documented: line.push_back(join(c.ucas, ",")); break;
        case CellStatus::Waived: line.emplace_back("waived"); break;
        case CellStatus::Gap: line.emplace_back("-"); break;
      }
    }
    table.push_back(std::move(line));
  }
  std::vector<std::size_t> widths(header.size(), 0);
  for (const auto& r : table) {
    for (std::size_t i = 0; i < r.size(); ++i) widths[i] = std::max(widths[i], r[i].size());
  }
  for (const auto& r : table) {
    std::string line;
    for (std::size_t i = 0; i < r.size(); ++i) {
      line += i + 1 < r.size() ? pad(r[i], widths[i] + 2) : r[i];
    }
    out << line << "\n";
  }

  out << "\ncells: " << sheet.cell_count() << ", documented: " << sheet.count(CellStatus::Documented)
      << ", waived: " << sheet.count(CellStatus::Waived) << ", gaps: " << sheet.count(CellStatus::Gap)
      << "\n";
  const std::size_t gaps = sheet.count(CellStatus::Gap);
  if (gaps > 0) {
    out << "gaps:\n";
    for (const auto& row : sheet.rows) {
      for (const auto& c : row.cells) {
        if (c.status() == CellStatus::Gap) {
          out << "  " << row.action.str() << " " << mode_keyword(c.mode) << "\n";
        }
      }
    }
  }
  for (const auto& w : sheet.unmatched_waivers) {
    err << waiver_path << ":" << w.line << ": warning: waiver for " << w.action.str() << " "
        << mode_keyword(w.mode) << " matches no open cell\n";
  }
  return strict && gaps > 0 ? kFindings : kOk;
}

void print_audit(const TraceAudit& audit, std::ostream& out) {
  out << "orphan losses: " << join(audit.orphan_losses) << "\n";
  out << "orphan hazards: " << join(audit.orphan_hazards) << "\n";
  out << "orphan ucas: " << join(audit.orphan_ucas) << "\n";
  out << "orphan scenarios: " << join(audit.orphan_scenarios) << "\n";
  out << "unreached requirements: " << join(audit.unreached_requirements) << "\n";
  out << "dangling references: " << audit.dangling.size() << "\n";
  for (const auto& f : audit.findings) {
    out << (f.severity == Severity::Error ? "error: " : "warning: ") << f.message << "\n";
  }
}

int cmd_audit(const std::string& path, bool strict, std::ostream& out, std::ostream& err) {
  Loaded l = load_model(path, err);
  if (!l.model && !l.failure) return l.status;
  TraceAudit audit;
  if (l.failure) {
    // Only dangling references are survivable; they become findings.
    const bool dangling_only =
        std::all_of(l.failure->errors.begin(), l.failure->errors.end(), [](const ValidationError& e) {
          return e.kind == ValidationErrorKind::DanglingReference;
        });
    if (!dangling_only) {
      print_validation(err, path, *l.failure);
      return kInvalidInput;
    }
    audit = traceability_audit(l.declarations);
  } else {
    audit = traceability_audit(*l.model);
  }
  print_audit(audit, out);
  if (audit.has_errors()) return kFindings;
  if (strict && audit.has_warnings()) return kFindings;
  return kOk;
}

int cmd_coverage(const std::string& path, const std::string& waiver_path, std::ostream& out,
                 std::ostream& err) {
  Loaded l = load_model(path, err);
  if (l.failure) print_validation(err, path, *l.failure);
  if (!l.model) return l.status;
  std::vector<Waiver> waivers;
  if (!waiver_path.empty()) {
    int status = kOk;
    auto w = load_waivers(waiver_path, err, status);
    if (!w) return status;
    waivers = std::move(*w);
  }
  const CoverageMetrics c = coverage_metrics(*l.model, waivers);
  out << "uca mode coverage: " << c.uca_mode_coverage.to_string() << "\n";
  out << "hazard mitigation: " << c.hazard_mitigation_ratio.to_string() << "\n";
  out << "unmitigated: " << join(c.unmitigated_hazards) << "\n";
  out << "loss mitigation: " << c.loss_mitigation_ratio.to_string() << "\n";
  out << "unmitigated losses: " << join(c.unmitigated_losses) << "\n";
  out << "ucas per stage:";
  for (const auto& [stage, n] : c.per_stage_uca_counts) out << " " << stage_tag(stage) << "=" << n;
  out << "\nucas per mode:";
  for (const auto& [mode, n] : c.per_mode_uca_counts) out << " " << mode_keyword(mode) << "=" << n;
  out << "\n";
  return kOk;
}

int cmd_trace(const std::string& path, const std::string& from, const std::string& dir,
              std::ostream& out, std::ostream& err) {
  Loaded l = load_model(path, err);
  if (l.failure) print_validation(err, path, *l.failure);
  if (!l.model) return l.status;
  if (!Identifier::is_valid(from)) {
    err << "error: '" << from << "' is not a valid identifier\n";
    return kUsageOrIo;
  }
  const Direction direction = dir == "up" ? Direction::Upstream : Direction::Downstream;
  auto chain = trace_chain(*l.model, Identifier(from), direction);
  if (!chain) {
    err << "error: " << chain.error().message() << "\n";
    return kUsageOrIo;
  }
  out << "trace " << direction_name(direction) << " from " << from << " ("
      << category_name(chain->origin_category) << "): " << chain->paths.size() << " path"
      << (chain->paths.size() == 1 ? "" : "s") << "\n";
  for (const auto& p : chain->paths) {
    out << "  " << join(p.ids, " -> ") << (p.truncated ? "  (truncated)" : "") << "\n";
  }
  return kOk;
}

int cmd_report(const std::string& path, const std::string& out_dir, const std::string& format,
               const std::string& waiver_path, std::ostream& out, std::ostream& err) {
  Loaded l = load_model(path, err);
  if (l.failure) print_validation(err, path, *l.failure);
  if (!l.model) return l.status;
  std::vector<Waiver> waivers;
  if (!waiver_path.empty()) {
    int status = kOk;
    auto w = load_waivers(waiver_path, err, status);
    if (!w) return status;
    waivers = std::move(*w);
  }
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    err << "error: cannot create output directory '" << out_dir << "'\n";
    return kUsageOrIo;
  }
  const std::string stem = fs::path(path).stem().string();
  const ReportBundle bundle = make_bundle(std::move(*l.model), waivers);

  std::vector<std::pair<fs::path, std::string>> files;
  if (format == "tables" || format == "all") {
    files.emplace_back(fs::path(out_dir) / (stem + ".report.md"), render_tables(bundle));
  }
  if (format == "structured" || format == "all") {
    files.emplace_back(fs::path(out_dir) / (stem + ".report.json"), export_structured(bundle));
  }
  if (format == "graph" || format == "all") {
    files.emplace_back(fs::path(out_dir) / (stem + ".dot"), export_graph(bundle.model));
  }
  for (const auto& [file, text] : files) {
    if (!write_file(file, text)) {
      err << "error: cannot write '" << file.string() << "'\n";
      return kUsageOrIo;
    }
    out << "wrote " << file.string() << "\n";
  }
  return kOk;
}

int cmd_simulate(const std::string& path, const std::string& trace_path,
                 const std::string& policy_path, const std::string& log_path, std::ostream& out,
                 std::ostream& err) {
  Loaded l = load_model(path, err);
  if (l.failure) print_validation(err, path, *l.failure);
  if (!l.model) return l.status;

  auto trace_text = read_file(trace_path);
  if (!trace_text) {
    err << "error: cannot read '" << trace_path << "'\n";
    return kUsageOrIo;
  }
  guard::GuardPolicy policy;
  if (!policy_path.empty()) {
    auto policy_text = read_file(policy_path);
    if (!policy_text) {
      err << "error: cannot read '" << policy_path << "'\n";
      return kUsageOrIo;
    }
    auto parsed = guard::parse_policy(*policy_text);
    if (!parsed) {
      print_diagnostics(err, policy_path, parsed.error());
      return kInvalidInput;
    }
    policy = *parsed;
  }
  auto readings = guard::parse_trace(*trace_text);
  if (!readings) {
    print_diagnostics(err, trace_path, readings.error());
    return kInvalidInput;
  }
  auto decisions = guard::simulate_trace(*readings, policy);
  if (!decisions) {
    err << trace_path << ": error: " << decisions.error().message() << "\n";
    return kInvalidInput;
  }
  out << guard::render_decision_log(*decisions);
  if (!log_path.empty() && !write_file(log_path, guard::export_decision_log(*decisions))) {
    err << "error: cannot write '" << log_path << "'\n";
    return kUsageOrIo;
  }
  return kOk;
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lifecycle STPA analysis toolkit", std::string(kToolName)};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolVersion));

  std::string model_path, waiver_path, from, dir = "down", out_dir, format = "all";
  std::string trace_path, policy_path, log_path;
  bool strict = false;

  auto* check = app.add_subcommand("check", "Parse and validate a model");
  check->add_option("model", model_path, "Model file")->required();

  auto* ucas = app.add_subcommand("ucas", "Print the UCA worksheet and its gaps");
  ucas->add_option("model", model_path, "Model file")->required();
  ucas->add_option("--waivers", waiver_path, "Waiver file");
  ucas->add_flag("--strict", strict, "Exit 1 when unwaived gaps remain");

  auto* audit = app.add_subcommand("audit", "Traceability audit");
  audit->add_option("model", model_path, "Model file")->required();
  audit->add_flag("--strict", strict, "Exit 1 on warnings too");

  auto* coverage = app.add_subcommand("coverage", "Coverage metrics");
  coverage->add_option("model", model_path, "Model file")->required();
  coverage->add_option("--waivers", waiver_path, "Waiver file");

  auto* trace = app.add_subcommand("trace", "Follow the traceability chain from one element");
  trace->add_option("model", model_path, "Model file")->required();
  trace->add_option("--from", from, "Origin id")->required();
  trace->add_option("--dir", dir, "up or down")->check(CLI::IsMember({"up", "down"}));

  auto* report = app.add_subcommand("report", "Write report files");
  report->add_option("model", model_path, "Model file")->required();
  report->add_option("--out", out_dir, "Output directory")->required();
  report->add_option("--format", format, "tables, structured, graph or all")
      ->check(CLI::IsMember({"tables", "structured", "graph", "all"}));
  report->add_option("--waivers", waiver_path, "Waiver file");

  auto* simulate = app.add_subcommand("simulate", "Replay a monitor trace through the runtime guard");
  simulate->add_option("model", model_path, "Model file")->required();
  simulate->add_option("--trace", trace_path, "Trace file")->required();
  simulate->add_option("--policy", policy_path, "Policy file");
  simulate->add_option("--log", log_path, "Write the decision log as JSON");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    err << app.help();
    return kUsageOrIo;
  }

  if (check->parsed()) return cmd_check(model_path, out, err);
  if (ucas->parsed()) return cmd_ucas(model_path, waiver_path, strict, out, err);
  if (audit->parsed()) return cmd_audit(model_path, strict, out, err);
  if (coverage->parsed()) return cmd_coverage(model_path, waiver_path, out, err);
  if (trace->parsed()) return cmd_trace(model_path, from, dir, out, err);
  if (report->parsed()) return cmd_report(model_path, out_dir, format, waiver_path, out, err);
  if (simulate->parsed()) {
    return cmd_simulate(model_path, trace_path, policy_path, log_path, out, err);
  }
  err << app.help();
  return kUsageOrIo;
}

}  // namespace unistpa::cli
