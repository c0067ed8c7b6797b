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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "support.hpp"
#include "unistpa/cli.hpp"

namespace unistpa::cli {
namespace {

namespace fs = std::filesystem;
using testing::fixture;
using testing::read_text;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string golden(const std::string& name) {
  return read_text(std::string(UNISTPA_GOLDEN_DIR) + "/" + name);
}

const std::string kModel = fixture("noa_highway.ustpa");

class Scratch : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / "unistpa_cli_test" / info->name();
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }

  fs::path dir_;
};

constexpr const char* kDangling =
    "model \"d\"\n"
    "loss L1 \"l\"\n"
    "hazard H1 \"h\" losses=[L1]\n"
    "node c stage=IG kind=human \"c\"\n"
    "action A1 controller=c \"a\"\n"
    "uca U1 action=A1 mode=not_provided hazards=[H1] \"u\"\n"
    "scenario S1 uca=U1 stage=IG \"s\"\n"
    "requirement R1 scenarios=[S1 S9] \"r\"\n";

constexpr const char* kClean =
    "model \"c\"\n"
    "loss L1 \"l\"\n"
    "hazard H1 \"h\" losses=[L1]\n"
    "node c stage=IG kind=human \"c\"\n"
    "action A1 controller=c \"a\"\n"
    "uca U1 action=A1 mode=not_provided hazards=[H1] \"u\"\n"
    "scenario S1 uca=U1 stage=IG \"s\"\n"
    "requirement R1 scenarios=[S1] \"r\"\n";

TEST(Check, BundledModel) {
  const Outcome o = run_cli({"check", kModel});
  EXPECT_EQ(o.code, kOk);
  EXPECT_EQ(o.out, "ok: 4 losses, 6 hazards, 14 ucas, 20 scenarios, 17 requirements\n");
  EXPECT_EQ(o.out, golden("check.txt"));
  EXPECT_TRUE(o.err.empty());
}

TEST(Check, MissingFileIsIoError) {
  const Outcome o = run_cli({"check", "missing.ustpa"});
  EXPECT_EQ(o.code, kUsageOrIo);
  EXPECT_EQ(o.err, "error: cannot read 'missing.ustpa'\n");
}

TEST_F(Scratch, CheckSyntaxAndValidationFailures) {
  const Outcome syntax = run_cli({"check", write("bad.ustpa", "model \"m\"\nloss L1\n")});
  EXPECT_EQ(syntax.code, kInvalidInput);
  EXPECT_NE(syntax.err.find("bad.ustpa:2:"), std::string::npos) << syntax.err;

  const Outcome dangling = run_cli({"check", write("d.ustpa", kDangling)});
  EXPECT_EQ(dangling.code, kInvalidInput);
  EXPECT_NE(dangling.err.find("S9"), std::string::npos) << dangling.err;
}

TEST(Usage, Errors) {
  EXPECT_EQ(run_cli({}).code, kUsageOrIo);
  const Outcome unknown = run_cli({"frobnicate"});
  EXPECT_EQ(unknown.code, kUsageOrIo);
  EXPECT_TRUE(unknown.out.empty());
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run_cli({"check", kModel, "--bogus"}).code, kUsageOrIo);
  EXPECT_EQ(run_cli({"trace", kModel}).code, kUsageOrIo);
  EXPECT_EQ(run_cli({"trace", kModel, "--from", "H1", "--dir", "sideways"}).code, kUsageOrIo);
  EXPECT_EQ(run_cli({"report", kModel, "--out", "x", "--format", "pdf"}).code, kUsageOrIo);
}

TEST(Usage, HelpAndVersion) {
  const Outcome help = run_cli({"--help"});
  EXPECT_EQ(help.code, kOk);
  EXPECT_NE(help.out.find("simulate"), std::string::npos);
  const Outcome sub = run_cli({"coverage", "--help"});
  EXPECT_EQ(sub.code, kOk);
  EXPECT_NE(sub.out.find("--waivers"), std::string::npos);
  EXPECT_EQ(run_cli({"--version"}).out, "0.1.0\n");
}

TEST(Coverage, BundledModel) {
  const Outcome o = run_cli({"coverage", kModel});
  EXPECT_EQ(o.code, kOk);
  EXPECT_NE(o.out.find("hazard mitigation: 5/6 (0.8333)\n"), std::string::npos);
  EXPECT_NE(o.out.find("unmitigated: H5\n"), std::string::npos);
  EXPECT_EQ(o.out, golden("coverage.txt"));
}

TEST_F(Scratch, WaiversRaiseCoverage) {
  const std::string w = write("w.txt", "# waive one\nCA-DT3 inappropriate_duration \"bounded by design\"\n");
  const Outcome o = run_cli({"coverage", kModel, "--waivers", w});
  EXPECT_EQ(o.code, kOk);
  EXPECT_NE(o.out.find("uca mode coverage: 15/56 (0.2679)\n"), std::string::npos) << o.out;
  EXPECT_EQ(run_cli({"coverage", kModel, "--waivers", write("bad.txt", "CA-DT3 sideways \"x\"\n")}).code,
            kInvalidInput);
  EXPECT_EQ(run_cli({"coverage", kModel, "--waivers", (dir_ / "none.txt").string()}).code,
            kUsageOrIo);
}

TEST_F(Scratch, UcasStrictOnlyTightens) {
  const Outcome lax = run_cli({"ucas", kModel});
  EXPECT_EQ(lax.code, kOk);
  EXPECT_EQ(lax.out, golden("ucas.txt"));
  EXPECT_EQ(run_cli({"ucas", kModel, "--strict"}).code, kFindings);

  // A model whose only action documents every mode has no gaps either way.
  std::string full = "model \"f\"\nloss L1 \"l\"\nhazard H1 \"h\" losses=[L1]\n"
                     "node c stage=DT kind=technical \"c\"\naction A1 controller=c \"a\"\n";
  for (const char* mode : {"not_provided", "provided_improperly", "mistimed", "inappropriate_duration"}) {
    full += std::string("uca U-") + mode + " action=A1 mode=" + mode + " hazards=[H1] \"u\"\n";
  }
  const std::string path = write("full.ustpa", full);
  EXPECT_EQ(run_cli({"ucas", path}).code, kOk);
  EXPECT_EQ(run_cli({"ucas", path, "--strict"}).code, kOk);
}

TEST(Audit, BundledWarningsOnly) {
  const Outcome o = run_cli({"audit", kModel});
  EXPECT_EQ(o.code, kOk);
  EXPECT_EQ(o.out, golden("audit.txt"));
  EXPECT_EQ(run_cli({"audit", kModel, "--strict"}).code, kFindings);
}

TEST_F(Scratch, AuditDanglingAndClean) {
  const std::string dangling = write("d.ustpa", kDangling);
  const Outcome o = run_cli({"audit", dangling});
  EXPECT_EQ(o.code, kFindings);
  EXPECT_NE(o.out.find("dangling references: 1\n"), std::string::npos) << o.out;
  EXPECT_EQ(run_cli({"audit", dangling, "--strict"}).code, kFindings);

  const std::string clean = write("c.ustpa", kClean);
  EXPECT_EQ(run_cli({"audit", clean}).code, kOk);
  EXPECT_EQ(run_cli({"audit", clean, "--strict"}).code, kOk);

  // Non-dangling validation failures are not survivable.
  const std::string dup = write("dup.ustpa", "model \"x\"\nloss L1 \"a\"\nloss L1 \"b\"\n");
  EXPECT_EQ(run_cli({"audit", dup}).code, kInvalidInput);
}

TEST(Trace, Paths) {
  const Outcome down = run_cli({"trace", kModel, "--from", "SR-DT3-1", "--dir", "down"});
  EXPECT_EQ(down.code, kOk);
  EXPECT_EQ(down.out, golden("trace_sr_dt3_1.txt"));
  EXPECT_EQ(run_cli({"trace", kModel, "--from", "SR-DT3-1"}).out, down.out);

  const Outcome up = run_cli({"trace", kModel, "--from", "H5", "--dir", "up"});
  EXPECT_EQ(up.code, kOk);
  EXPECT_NE(up.out.find("(truncated)"), std::string::npos) << up.out;

  EXPECT_EQ(run_cli({"trace", kModel, "--from", "NOPE"}).code, kUsageOrIo);
  EXPECT_EQ(run_cli({"trace", kModel, "--from", "bad id!"}).code, kUsageOrIo);
}

TEST_F(Scratch, ReportWritesGoldenFiles) {
  const Outcome o = run_cli({"report", kModel, "--out", dir_.string(), "--format", "all"});
  ASSERT_EQ(o.code, kOk) << o.err;
  for (const char* name : {"noa_highway.report.md", "noa_highway.report.json", "noa_highway.dot"}) {
    EXPECT_EQ(read_text((dir_ / name).string()), golden(name)) << name;
    EXPECT_NE(o.out.find(name), std::string::npos);
  }
  fs::remove_all(dir_ / "graph");
  const Outcome graph =
      run_cli({"report", kModel, "--out", (dir_ / "graph").string(), "--format", "graph"});
  ASSERT_EQ(graph.code, kOk);
  EXPECT_TRUE(fs::exists(dir_ / "graph" / "noa_highway.dot"));
  EXPECT_FALSE(fs::exists(dir_ / "graph" / "noa_highway.report.md"));
}

TEST_F(Scratch, ReportIntoUnwritablePath) {
  const std::string file = write("occupied", "x");
  EXPECT_EQ(run_cli({"report", kModel, "--out", file}).code, kUsageOrIo);
}

TEST_F(Scratch, SimulateWithLog) {
  const std::string log = (dir_ / "log.json").string();
  const Outcome o = run_cli({"simulate", kModel, "--trace", fixture("traces/takeover_recovery.trace"),
                             "--policy", fixture("policies/default.policy"), "--log", log});
  ASSERT_EQ(o.code, kOk) << o.err;
  EXPECT_EQ(o.out, golden("takeover_recovery.log"));
  const auto doc = nlohmann::json::parse(read_text(log));
  ASSERT_EQ(doc.size(), 19u);
  EXPECT_EQ(doc[0]["response"], "takeover_request");
  EXPECT_EQ(doc[0]["tickets"][0]["target_stage"], "VF");
}

TEST_F(Scratch, SimulateErrors) {
  const std::string trace = fixture("traces/nominal_100.trace");
  EXPECT_EQ(run_cli({"simulate", kModel, "--trace", (dir_ / "none").string()}).code, kUsageOrIo);
  EXPECT_EQ(run_cli({"simulate", kModel, "--trace", write("t", "1 lidar nominal\n")}).code,
            kInvalidInput);
  const Outcome order =
      run_cli({"simulate", kModel, "--trace", write("o", "2 trajectory nominal\n1 trajectory nominal\n")});
  EXPECT_EQ(order.code, kInvalidInput);
  EXPECT_NE(order.err.find("step 1 is before step 2"), std::string::npos) << order.err;
  EXPECT_EQ(run_cli({"simulate", kModel, "--trace", trace, "--policy",
                     write("p", "policy { hold=0 }\n")})
                .code,
            kInvalidInput);
  EXPECT_EQ(run_cli({"simulate", write("bad.ustpa", "loss\n"), "--trace", trace}).code,
            kInvalidInput);
}

TEST(Determinism, ConsoleOutputIsByteStable) {
  const std::vector<std::vector<std::string>> commands = {
      {"check", kModel},
      {"ucas", kModel},
      {"audit", kModel},
      {"coverage", kModel},
      {"trace", kModel, "--from", "L1", "--dir", "up"},
      {"simulate", kModel, "--trace", fixture("traces/perception_blip.trace")}};
  for (const auto& cmd : commands) {
    const Outcome a = run_cli(cmd);
    const Outcome b = run_cli(cmd);
    EXPECT_EQ(a.code, b.code) << cmd[0];
    EXPECT_EQ(a.out, b.out) << cmd[0];
    EXPECT_EQ(a.err, b.err) << cmd[0];
  }
}

}  // namespace
}  // namespace unistpa::cli
