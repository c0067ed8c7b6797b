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

// Shared helpers for the test binaries: fixture access, id-set conversion,
// a random valid-model generator and a span bounds check.

#ifndef UNISTPA_TESTS_SUPPORT_HPP
#define UNISTPA_TESTS_SUPPORT_HPP

#include <algorithm>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "unistpa/model.hpp"
#include "unistpa/parser.hpp"

#ifndef UNISTPA_FIXTURE_DIR
#error "UNISTPA_FIXTURE_DIR must point at the examples directory"
#endif

namespace unistpa::testing {

inline std::string fixture(const std::string& relative) {
  return std::string(UNISTPA_FIXTURE_DIR) + "/" + relative;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline std::string bundled_text() { return read_text(fixture("noa_highway.ustpa")); }

inline SafetyModel bundled_model() {
  ModelDocument doc = parse_document(bundled_text());
  if (!doc.ok()) throw std::runtime_error("bundled model does not parse");
  auto built = build_model(doc.declarations);
  if (!built) throw std::runtime_error("bundled model does not build");
  return std::move(built).value();
}

inline SafetyModel must_build(const std::vector<RawDeclaration>& decls) {
  auto built = build_model(decls);
  if (!built) {
    std::string all;
    for (const auto& e : built.error().errors) all += e.message() + "\n";
    throw std::runtime_error("model does not build:\n" + all);
  }
  return std::move(built).value();
}

inline std::set<std::string> id_set(const IdList& ids) {
  std::set<std::string> out;
  for (const auto& id : ids) out.insert(id.str());
  return out;
}

inline std::vector<std::string> id_strings(const IdList& ids) {
  std::vector<std::string> out;
  for (const auto& id : ids) out.push_back(id.str());
  return out;
}

/// True when the span's byte range lies inside `text`.
inline bool span_within(const SourceSpan& span, std::string_view text) {
  if (span.line < 1 || span.column < 1 || span.length < 1) return false;
  std::size_t line_start = 0;
  for (std::size_t l = 1; l < span.line; ++l) {
    const auto nl = text.find('\n', line_start);
    if (nl == std::string_view::npos) return false;
    line_start = nl + 1;
  }
  const auto line_end = std::min(text.find('\n', line_start), text.size());
  const std::size_t offset = line_start + span.column - 1;
  return offset <= line_end && offset < text.size() && offset + span.length <= text.size();
}

/// Random models that satisfy every build invariant by construction.
class ModelGenerator {
 public:
  explicit ModelGenerator(std::uint64_t seed) : rng_(seed) {}

  struct Limits {
    int losses = 6;
    int hazards = 8;
    int nodes = 10;
    int edges = 14;
    int actions = 8;
    int ucas = 14;
    int scenarios = 16;
    int requirements = 14;
  };

  std::vector<RawDeclaration> declarations(const Limits& lim) {
    std::vector<RawDeclaration> out;
    out.push_back({ModelHeader{text(0, 16)}});

    std::vector<Identifier> losses, hazards, nodes, actions, ucas, scenarios;
    std::vector<Stage> node_stage, action_stage, uca_stage;

    const int n_loss = upto(lim.losses);
    for (int i = 0; i < n_loss; ++i) {
      losses.push_back(fresh_id("L", i));
      out.push_back({Loss{losses.back(), text(1, 40), coin()}});
    }
    const int n_haz = losses.empty() ? 0 : upto(lim.hazards);
    for (int i = 0; i < n_haz; ++i) {
      hazards.push_back(fresh_id("H", i));
      out.push_back({Hazard{hazards.back(), text(0, 40), subset(losses)}});
    }
    const int n_node = upto(lim.nodes);
    for (int i = 0; i < n_node; ++i) {
      nodes.push_back(fresh_id("n", i));
      node_stage.push_back(kAllStages[pick(kAllStages.size())]);
      out.push_back({Node{nodes.back(), node_stage.back(),
                          coin() ? NodeKind::Technical : NodeKind::Human, text(0, 20)}});
    }
    if (nodes.size() >= 2) {
      std::set<std::tuple<std::size_t, std::size_t, int>> used;
      const int n_edge = upto(lim.edges);
      for (int i = 0; i < n_edge; ++i) {
        const std::size_t a = pick(nodes.size());
        std::size_t b = pick(nodes.size() - 1);
        if (b >= a) ++b;
        const int kind = coin() ? 0 : 1;
        if (!used.insert({a, b, kind}).second) continue;
        out.push_back({Edge{nodes[a], nodes[b], kind == 0 ? EdgeKind::Control : EdgeKind::Feedback,
                            coin() ? std::string() : text(1, 12)}});
      }
    }
    const int n_act = nodes.empty() ? 0 : upto(lim.actions);
    for (int i = 0; i < n_act; ++i) {
      const std::size_t c = pick(nodes.size());
      actions.push_back(fresh_id("CA", i));
      action_stage.push_back(node_stage[c]);
      out.push_back({ControlAction{actions.back(), nodes[c], text(0, 30)}});
    }
    const int n_uca = (actions.empty() || hazards.empty()) ? 0 : upto(lim.ucas);
    for (int i = 0; i < n_uca; ++i) {
      const std::size_t a = pick(actions.size());
      ucas.push_back(fresh_id("UCA", i));
      uca_stage.push_back(action_stage[a]);
      // Index suffix keeps (action, mode, description) triples distinct.
      out.push_back({Uca{ucas.back(), actions[a], kAllFailureModes[pick(4)], subset(hazards),
                         text(0, 30) + " #" + std::to_string(i)}});
    }
    const int n_cs = ucas.empty() ? 0 : upto(lim.scenarios);
    for (int i = 0; i < n_cs; ++i) {
      const std::size_t u = pick(ucas.size());
      scenarios.push_back(fresh_id("CS", i));
      out.push_back({CausalScenario{scenarios.back(), ucas[u], uca_stage[u], text(0, 30)}});
    }
    const int n_req = scenarios.empty() ? 0 : upto(lim.requirements);
    for (int i = 0; i < n_req; ++i) {
      out.push_back({SafetyRequirement{fresh_id("SR", i), subset(scenarios), text(0, 30)}});
    }
    interleave(out);
    return out;
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  int upto(int n) { return static_cast<int>(pick(static_cast<std::size_t>(n) + 1)); }
  bool coin() { return pick(2) == 0; }
  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  /// Ids mix separators, case and keyword spellings to stress the lexer.
  Identifier fresh_id(const std::string& prefix, int i) {
    static const std::vector<std::string> decorations = {
        "", "-", "_", ".", "-x.", "_Q", "a-b_c.", "-0"};
    static const std::vector<std::string> keyword_ids = {
        "model", "loss", "hazard", "node", "edge", "action", "uca", "scenario",
        "requirement", "losses", "critical", "stage", "kind", "controller", "mode",
        "hazards", "scenarios", "control", "feedback"};
    if (i == 0 && pick(4) == 0) {
      // One keyword-spelled id per category at most; categories are separate namespaces.
      return Identifier(keyword_ids[pick(keyword_ids.size())]);
    }
    return Identifier(prefix + decorations[pick(decorations.size())] + std::to_string(i));
  }

  std::string text(std::size_t min_len, std::size_t max_len) {
    static const std::vector<std::string> atoms = {
        "a", "b", "Z", " ", "  ", "-", "|", "\"", "\\", "#", "[", "]", "=", "->", "\\n",
        "\n", "\r", "\t", "é", "–", "√", "𝄞", "loss", "model", "x=y", "0", "42", "'"};
    const std::size_t len = min_len + pick(max_len - min_len + 1);
    std::string out;
    while (out.size() < len) out += atoms[pick(atoms.size())];
    if (min_len > 0 && out.empty()) out = "x";
    return out;
  }

  IdList subset(const std::vector<Identifier>& from) {
    IdList out;
    for (const auto& id : from) {
      if (pick(3) == 0) out.push_back(id);
    }
    if (out.empty()) out.push_back(from[pick(from.size())]);
    std::shuffle(out.begin(), out.end(), rng_);
    return out;
  }

  /// Interleaves categories half of the time to exercise forward references.
  void interleave(std::vector<RawDeclaration>& decls) {
    if (decls.size() <= 2 || coin()) return;
    std::shuffle(decls.begin() + 1, decls.end(), rng_);
  }

  std::mt19937_64 rng_;
};

}  // namespace unistpa::testing

#endif  // UNISTPA_TESTS_SUPPORT_HPP
