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

#include <gtest/gtest.h>

#include "json.hpp"
#include "support.hpp"
#include "unistpa/reports.hpp"

#ifndef UNISTPA_GOLDEN_DIR
#error "UNISTPA_GOLDEN_DIR must point at tests/golden"
#endif

namespace unistpa {
namespace {

using json = nlohmann::json;
using testing::bundled_model;
using testing::must_build;
using testing::read_text;

std::string golden(const std::string& name) {
  return read_text(std::string(UNISTPA_GOLDEN_DIR) + "/" + name);
}

std::size_t count_of(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Structured, BundledRegistries) {
  const json doc = json::parse(export_structured(make_bundle(bundled_model())));
  EXPECT_EQ(doc["losses"].size(), 4u);
  EXPECT_EQ(doc["hazards"].size(), 6u);
  EXPECT_EQ(doc["ucas"].size(), 14u);
  EXPECT_EQ(doc["scenarios"].size(), 20u);
  EXPECT_EQ(doc["requirements"].size(), 17u);
  EXPECT_EQ(doc["metadata"]["input_digest"]["algorithm"], "sha256");
  EXPECT_EQ(doc["metadata"]["input_digest"]["value"],
            sha256_hex(render_canonical(bundled_model())));
  EXPECT_EQ(doc["analysis"]["coverage"]["hazard_mitigation_ratio"]["numerator"], 5);
}

TEST(Structured, EmptyModelHasEmptyArrays) {
  const json doc = json::parse(export_structured(make_bundle(must_build({}))));
  for (const char* key : {"losses", "hazards", "nodes", "edges", "actions", "ucas", "scenarios",
                          "requirements"}) {
    ASSERT_TRUE(doc[key].is_array()) << key;
    EXPECT_TRUE(doc[key].empty()) << key;
  }
}

TEST(Structured, DeterministicAndNewlineTerminated) {
  const std::string a = export_structured(make_bundle(bundled_model()));
  const std::string b = export_structured(make_bundle(bundled_model()));
  EXPECT_EQ(a, b);
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a.back(), '\n');
}

TEST(Structured, ImportRoundTripBundled) {
  const SafetyModel m = bundled_model();
  auto back = import_structured(export_structured(make_bundle(m)));
  ASSERT_TRUE(back);
  EXPECT_EQ(*back, m);
}

TEST(Structured, ImportRejectsGarbage) {
  EXPECT_FALSE(import_structured("{not json"));
  EXPECT_FALSE(import_structured(R"({"losses": 3})"));
  // Valid JSON, but the hazard points at a loss that does not exist.
  auto dangling = import_structured(
      R"({"name":"m","losses":[],"hazards":[{"id":"H1","description":"x","losses":["L9"]}]})");
  EXPECT_FALSE(dangling);
}

TEST(StructuredProperty, RandomModelsRoundTrip) {
  testing::ModelGenerator gen(77);
  for (int i = 0; i < 300; ++i) {
    const SafetyModel m = must_build(gen.declarations({}));
    const std::string text = export_structured(make_bundle(m));
    EXPECT_TRUE(json::accept(text)) << "model " << i;
    auto back = import_structured(text);
    ASSERT_TRUE(back) << "model " << i;
    ASSERT_EQ(*back, m) << "model " << i;
  }
}

TEST(Tables, HazardRowListsLosses) {
  const std::string md = render_tables(make_bundle(bundled_model()));
  EXPECT_NE(md.find("| H2 | Vehicle does not keep a safe distance to other road users | L1, L2, L4 |"),
            std::string::npos);
  EXPECT_NE(md.find("- unmitigated hazards: H5"), std::string::npos);
}

TEST(Tables, EmptyModelKeepsHeaders) {
  const std::string md = render_tables(make_bundle(must_build({})));
  EXPECT_NE(md.find("| Loss ID | Description | Safety-Critical |\n|---|---|---|\n"),
            std::string::npos);
  EXPECT_EQ(count_of(md, "\n|---"), 5u);
}

TEST(Tables, EscapesPipes) {
  const SafetyModel m = must_build({{ModelHeader{"p"}}, {Loss{Identifier("L1"), "a|b", false}}});
  const std::string md = render_tables(make_bundle(m));
  EXPECT_NE(md.find("| L1 | a\\|b | no |"), std::string::npos);
}

TEST(Tables, RowCountsMatchRegistries) {
  testing::ModelGenerator gen(5);
  for (int i = 0; i < 100; ++i) {
    const SafetyModel m = must_build(gen.declarations({}));
    const std::string md = render_tables(make_bundle(m));
    for (const auto& l : m.losses()) {
      EXPECT_NE(md.find("| " + l.id.str() + " |"), std::string::npos);
    }
    for (const auto& r : m.requirements()) {
      EXPECT_NE(md.find("| " + r.id.str() + " |"), std::string::npos);
    }
  }
}

TEST(Graph, BundledHasFiveStageClusters) {
  const std::string dot = export_graph(bundled_model());
  const DotCheck check = check_dot(dot);
  ASSERT_TRUE(check.valid) << check.error;
  EXPECT_EQ(check.cluster_ids, (std::vector<std::string>{"cluster_IG", "cluster_DP", "cluster_LT",
                                                         "cluster_VF", "cluster_DT"}));
  EXPECT_NE(dot.find("\"world_model\" -> \"perception\" [style=dashed"), std::string::npos);
}

TEST(Graph, EmptyModelStillHasClusters) {
  const DotCheck check = check_dot(export_graph(must_build({})));
  ASSERT_TRUE(check.valid) << check.error;
  EXPECT_EQ(check.cluster_ids.size(), 5u);
}

TEST(GraphProperty, RandomModelsAreValidDot) {
  testing::ModelGenerator gen(31);
  for (int i = 0; i < 300; ++i) {
    const SafetyModel m = must_build(gen.declarations({}));
    const std::string dot = export_graph(m);
    const DotCheck check = check_dot(dot);
    ASSERT_TRUE(check.valid) << "model " << i << ": " << check.error << "\n" << dot;
    EXPECT_EQ(check.cluster_ids.size(), 5u);
    for (const auto& e : m.edges()) {
      EXPECT_NE(dot.find("\"" + e.from.str() + "\" -> \"" + e.to.str() + "\""), std::string::npos);
    }
  }
}

TEST(Graph, CheckerRejectsMalformed) {
  for (const char* bad : {"", "digraph {", "digraph g { a -> }", "digraph g { \"a }",
                          "digraph g { a [x=] }", "graph g { } trailing", "digraph g { a -> b [",
                          "digraph g { subgraph { }"}) {
    EXPECT_FALSE(check_dot(bad).valid) << bad;
  }
  for (const char* good : {"digraph {}", "strict digraph g { a -> b -> c; }",
                           "graph g { a -- b [label=<x <b>y</b>>]; }",
                           "digraph { node [shape=box]; subgraph cluster_x { a:n } }",
                           "digraph { /* c */ a // d\n # e\n b -> { c d } }"}) {
    const DotCheck check = check_dot(good);
    EXPECT_TRUE(check.valid) << good << ": " << check.error;
  }
}

TEST(Golden, BundledArtifactsAreStable) {
  const ReportBundle bundle = make_bundle(bundled_model());
  EXPECT_EQ(render_tables(bundle), golden("noa_highway.report.md"));
  EXPECT_EQ(export_structured(bundle), golden("noa_highway.report.json"));
  EXPECT_EQ(export_graph(bundle.model), golden("noa_highway.dot"));
}

}  // namespace
}  // namespace unistpa
