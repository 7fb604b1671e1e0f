// Copyright 2026 The Pickleward Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "json.hpp"
#include "support/corpus.h"

namespace pickleward::cli {
namespace {

namespace fs = std::filesystem;
using pickleward::testing::CorpusDir;
using pickleward::testing::LoadCorpus;
using pickleward::testing::ReadText;
using pickleward::testing::SourceDir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result RunArgs(std::vector<std::string> args) {
  args.insert(args.begin(), "pickleward");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  int code = Run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string Pickle(const std::string& id) { return LoadCorpus().Get(id).pickle_path.string(); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("pickleward_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string GenPolicy(const std::string& library) {
    const auto& lib = LoadCorpus().Library(library);
    std::string out = (dir_ / (library + ".json")).string();
    Result r = RunArgs({"gen-policy", "--library", lib.path.string(), "--package", lib.package, "--class",
                        lib.root_class, "--cache", (SourceDir() / "cache").string(), "-o", out});
    EXPECT_EQ(r.code, kOk) << r.err;
    return out;
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(RunArgs({"--help"}).code, kOk);
  EXPECT_EQ(RunArgs({}).code, kUsage);
  EXPECT_EQ(RunArgs({"frobnicate"}).code, kUsage);
  EXPECT_EQ(RunArgs({"trace", "--format", "xml", Pickle("benign_primitives_p0")}).code, kUsage);
  EXPECT_EQ(RunArgs({"trace", (dir_ / "missing.pkl").string()}).code, kUsage);
}

TEST_F(CliTest, DisassembleListsOpcodes) {
  Result r = RunArgs({"disassemble", Pickle("benign_primitives_p0")});
  EXPECT_EQ(r.code, kOk);
  EXPECT_NE(r.out.find("STOP"), std::string::npos);
}

TEST_F(CliTest, TraceStructuredManyFilesKeepsOrder) {
  std::vector<std::string> files = {Pickle("malicious_os_system"), Pickle("benign_primitives_p1"), Pickle("benign_toylib_model")};
  Result r = RunArgs({"trace", "--format", "structured", files[0], files[1], files[2]});
  ASSERT_EQ(r.code, kOk) << r.err;
  auto doc = nlohmann::json::parse(r.out);
  ASSERT_TRUE(doc.is_array());
  ASSERT_EQ(doc.size(), 3u);
  for (std::size_t i = 0; i < files.size(); ++i) EXPECT_EQ(doc[i]["source"], files[i]);
}

TEST_F(CliTest, TraceTextHeadersForManyFiles) {
  Result r = RunArgs({"trace", Pickle("benign_primitives_p0"), Pickle("malicious_os_system")});
  ASSERT_EQ(r.code, kOk);
  EXPECT_LT(r.out.find("== " + Pickle("benign_primitives_p0")), r.out.find("== " + Pickle("malicious_os_system")));
}

TEST_F(CliTest, TraceReportsUnparseableFile) {
  fs::path junk = dir_ / "junk.pkl";
  std::ofstream(junk) << "not a pickle";
  Result r = RunArgs({"trace", junk.string()});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_NE(r.err.find("junk.pkl"), std::string::npos);
}

TEST_F(CliTest, ScanExitCodes) {
  Result clean = RunArgs({"scan", Pickle("benign_primitives_p0")});
  EXPECT_EQ(clean.code, kOk);
  EXPECT_NE(clean.out.find(": clean"), std::string::npos);

  Result flagged = RunArgs({"scan", Pickle("benign_primitives_p0"), Pickle("malicious_os_system")});
  EXPECT_EQ(flagged.code, kFlagged);
  EXPECT_NE(flagged.out.find("flagged: os.system"), std::string::npos);

  fs::path junk = dir_ / "junk.pkl";
  std::ofstream(junk) << "garbage";
  EXPECT_EQ(RunArgs({"scan", junk.string()}).code, kUsage);
  EXPECT_EQ(RunArgs({"scan", junk.string(), Pickle("malicious_os_system")}).code, kFlagged);
}

TEST_F(CliTest, ScanUsesDenylistFile) {
  fs::path list = dir_ / "deny.json";
  std::ofstream(list) << R"({"schema": "pickleward-denylist/1", "match_mode": "exact", "denied": ["nothing"]})";
  Result r = RunArgs({"scan", "--denylist", list.string(), Pickle("malicious_os_system")});
  EXPECT_EQ(r.code, kOk) << r.err;
}

TEST_F(CliTest, GenPolicyThenLoadMatchesOracle) {
  std::string policy = GenPolicy("toylib");
  fs::path dump = dir_ / "model.dump";
  const auto& entry = LoadCorpus().Get("benign_toylib_model");
  Result r = RunArgs({"load", entry.pickle_path.string(), "--policy", policy, "--dump", dump.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(ReadText(dump), ReadText(*entry.oracle_dump));
}

TEST_F(CliTest, GenPolicyToStdoutIsDeterministic) {
  const auto& lib = LoadCorpus().Library("toyseq");
  std::vector<std::string> args = {"gen-policy", "--library", lib.path.string(), "--package", lib.package,
                                   "--class", lib.root_class, "--cache", (SourceDir() / "cache").string(),
                                   "-o", "-"};
  Result a = RunArgs(args);
  Result b = RunArgs(args);
  ASSERT_EQ(a.code, kOk) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(nlohmann::json::parse(a.out)["schema"], "pickleward-policy/1");
}

TEST_F(CliTest, GenPolicyUnknownRoot) {
  const auto& lib = LoadCorpus().Library("toylib");
  Result r = RunArgs({"gen-policy", "--library", lib.path.string(), "--package", lib.package, "--class",
                      lib.package + ".NoSuchClass", "-o", (dir_ / "p.json").string()});
  EXPECT_EQ(r.code, kUsage);
  EXPECT_FALSE(fs::exists(dir_ / "p.json"));
}

TEST_F(CliTest, LoadBlocksMaliciousWithSubjectAndOffset) {
  std::string policy = GenPolicy("toylib");
  Result r = RunArgs({"load", Pickle("malicious_os_system"), "--policy", policy, "--dump", (dir_ / "x").string()});
  EXPECT_EQ(r.code, kSecurityViolation);
  EXPECT_NE(r.err.find("os.system"), std::string::npos);
  EXPECT_NE(r.err.find("offset"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "x"));
}

TEST_F(CliTest, LoadWithoutDumpWritesNothing) {
  std::string policy = GenPolicy("toylib");
  auto before = std::distance(fs::directory_iterator(dir_), fs::directory_iterator());
  Result r = RunArgs({"load", Pickle("benign_toylib_model"), "--policy", policy});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(std::distance(fs::directory_iterator(dir_), fs::directory_iterator()), before);
}

TEST_F(CliTest, FlairStubsAndStrictMode) {
  std::string policy = GenPolicy("toyflair");
  const auto& entry = LoadCorpus().Get("benign_flair_tagger");
  fs::path dump = dir_ / "flair.dump";
  Result r = RunArgs({"load", entry.pickle_path.string(), "--policy", policy, "--dump", dump.string()});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("1 stub(s)"), std::string::npos);
  EXPECT_EQ(ReadText(dump), ReadText(*entry.oracle_restricted_dump));

  fs::path strict_dump = dir_ / "strict.dump";
  Result s = RunArgs({"load", entry.pickle_path.string(), "--policy", policy, "--strict", "--dump",
                      strict_dump.string()});
  EXPECT_EQ(s.code, kStubsPresent);
  EXPECT_FALSE(fs::exists(strict_dump));
}

TEST_F(CliTest, LoadStructuredOutput) {
  std::string policy = GenPolicy("toylib");
  Result ok = RunArgs({"load", Pickle("benign_toylib_model"), "--policy", policy, "--format", "structured"});
  ASSERT_EQ(ok.code, kOk) << ok.err;
  auto doc = nlohmann::json::parse(ok.out);
  EXPECT_EQ(doc["schema"], "pickleward-load/1");
  EXPECT_EQ(doc["status"], "loaded");
  EXPECT_FALSE(doc["trace"]["imports"].empty());

  Result bad = RunArgs({"load", Pickle("malicious_os_system"), "--policy", policy, "--format", "structured"});
  EXPECT_EQ(bad.code, kSecurityViolation);
  auto blocked = nlohmann::json::parse(bad.out);
  EXPECT_EQ(blocked["status"], "blocked");
  EXPECT_EQ(blocked["error"]["subject"], "os.system");
  EXPECT_TRUE(blocked["error"].contains("offset"));
}

TEST_F(CliTest, ExplainChainAndMissingName) {
  std::string policy = GenPolicy("toylib");
  const auto& lib = LoadCorpus().Library("toylib");
  Result r = RunArgs({"explain", "--policy", policy, "--name", lib.root_class});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_EQ(r.out.rfind(lib.root_class, 0), 0u);
  EXPECT_EQ(RunArgs({"explain", "--policy", policy, "--name", "os.system"}).code, kUsage);
}

TEST_F(CliTest, BenchReportsMedians) {
  std::string policy = GenPolicy("toylib");
  Result r = RunArgs({"bench", Pickle("benign_toylib_model"), "--policy", policy, "--iterations", "3"});
  ASSERT_EQ(r.code, kOk) << r.err;
  EXPECT_NE(r.out.find("unrestricted_median_ms: "), std::string::npos);
  EXPECT_NE(r.out.find("restricted_median_ms: "), std::string::npos);
  EXPECT_NE(r.out.find("overhead_percent: "), std::string::npos);
  EXPECT_EQ(RunArgs({"bench", Pickle("malicious_os_system"), "--policy", policy}).code, kSecurityViolation);
}

}  // namespace
}  // namespace pickleward::cli
