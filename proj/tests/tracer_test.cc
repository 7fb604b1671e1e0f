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

#include "pickleward/tracer.h"

#include <gtest/gtest.h>

#include "pickleward/error.h"
#include "pickleward/vm.h"
#include "support/corpus.h"

namespace pickleward {
namespace {

using testing::LoadCorpus;

template <std::size_t N>
std::string B(const char (&s)[N]) {
  return std::string(s, N - 1);
}

std::set<std::string> Names(const std::vector<TraceEvent>& events) {
  std::set<std::string> out;
  for (const auto& e : events) out.insert(e.name);
  return out;
}

TEST(Trace, TensorFixture) {
  auto r = Trace(testing::EntryStream(LoadCorpus().Get("benign_tensor")));
  EXPECT_EQ(r.imports, (std::set<std::string>{"toylib.Tensor", "toylib.read_weights_to_tensor"}));
  EXPECT_EQ(r.invocations, (std::set<std::string>{"toylib.read_weights_to_tensor"}));
  EXPECT_TRUE(r.allocations.empty());
  EXPECT_FALSE(r.has_trailing_programs);
}

TEST(Trace, NonePickle) {
  auto r = Trace(Parse(B("N.")));
  EXPECT_EQ(r, TraceReport{});
  EXPECT_EQ(FormatTraceText(r),
            "imports: (none)\ninvocations: (none)\nallocations: (none)\n"
            "has_trailing_programs: false\nforbidden_opcodes: (none)\ndynamic: (none)\n");
}

TEST(Trace, MultiStop) {
  auto r = Trace(testing::EntryStream(LoadCorpus().Get("bypass_multi_stop")));
  EXPECT_TRUE(r.has_trailing_programs);
  EXPECT_TRUE(r.imports.count("os.system"));
  EXPECT_TRUE(r.invocations.count("os.system"));
}

TEST(Trace, DynamicCallee) {
  auto r = Trace(testing::EntryStream(LoadCorpus().Get("malicious_getattr_dynamic")));
  ASSERT_EQ(r.dynamic.size(), 1u);
  EXPECT_EQ(r.dynamic[0].mnemonic, "REDUCE");
  EXPECT_EQ(r.dynamic[0].offset, 97u);
  EXPECT_EQ(r.invocations, (std::set<std::string>{"builtins.__import__", "builtins.getattr"}));
}

TEST(Trace, ResolvesThroughMemo) {
  // STACK_GLOBAL operands fetched from the memo.
  auto r = Trace(Parse(B("\x80\x04\x8c\x02os\x94\x8c\x06system\x94h\x00h\x01\x93)R.")));
  EXPECT_EQ(r.invocations, (std::set<std::string>{"os.system"}));
  EXPECT_TRUE(r.dynamic.empty());
}

TEST(Trace, ForbiddenOpcodesListed) {
  auto r = Trace(testing::EntryStream(LoadCorpus().Get("malicious_inst")));
  ASSERT_EQ(r.forbidden_opcodes.size(), 1u);
  EXPECT_EQ(r.forbidden_opcodes[0].mnemonic, "INST");
}

TEST(Trace, SubsetInvariantOnCorpus) {
  for (const auto& e : LoadCorpus().entries) {
    auto r = Trace(testing::EntryStream(e));
    for (const auto* s : {&r.invocations, &r.allocations}) {
      for (const auto& n : *s) EXPECT_TRUE(r.imports.count(n)) << e.id << " " << n;
    }
  }
}

// Without dynamic callees, the static trace names exactly what an
// unrestricted run resolves and calls.
TEST(Trace, AgreesWithExecution) {
  int compared = 0;
  for (const auto& e : LoadCorpus().entries) {
    SCOPED_TRACE(e.id);
    auto stream = testing::EntryStream(e);
    auto r = Trace(stream);
    if (!r.dynamic.empty()) continue;
    Vm vm(VmConfig::Unrestricted());
    try {
      vm.Run(stream);
    } catch (const Error& err) {
      // Only forbidden opcodes stop an unrestricted run on this corpus.
      EXPECT_EQ(err.code(), ErrorCode::kForbiddenOpcode);
      EXPECT_FALSE(r.forbidden_opcodes.empty());
      continue;
    }
    EXPECT_EQ(r.imports, Names(vm.trace().imports));
    EXPECT_EQ(r.invocations, Names(vm.trace().invocations));
    EXPECT_EQ(r.allocations, Names(vm.trace().allocations));
    ++compared;
  }
  EXPECT_GE(compared, 20);
}

TEST(Denylist, Matching) {
  Denylist exact({"os.system"}, MatchMode::kExact);
  EXPECT_TRUE(exact.Matches("os.system"));
  EXPECT_FALSE(exact.Matches("torch.serialization.os.system"));
  Denylist prefix({"os", "subprocess"}, MatchMode::kModulePrefix);
  EXPECT_TRUE(prefix.Matches("os.system"));
  EXPECT_TRUE(prefix.Matches("os.path.join"));
  EXPECT_FALSE(prefix.Matches("oss.x"));
  EXPECT_FALSE(prefix.Matches("torch.serialization.os.system"));
  EXPECT_THROW(Denylist({}, MatchMode::kExact), Error);
}

TEST(Denylist, VendoredFileIsTheDefault) {
  auto file = ReadDenylist(testing::SourceDir() / "denylists" / "default.json");
  EXPECT_EQ(file.denied(), Denylist::Default().denied());
  EXPECT_EQ(file.mode(), MatchMode::kExact);
  EXPECT_THROW(DenylistFromJson(R"({"schema":"pickleward-denylist/1","denied":[]})"), Error);
  EXPECT_THROW(DenylistFromJson(R"({"schema":"x","denied":["a.b"]})"), Error);
}

TEST(Scan, Examples) {
  Denylist d({"os.system"}, MatchMode::kExact);
  auto os = Scan(testing::EntryStream(LoadCorpus().Get("malicious_os_system")), d);
  EXPECT_TRUE(os.flagged);
  EXPECT_EQ(os.names, (std::vector<std::string>{"os.system"}));
  auto pathlib = Scan(testing::EntryStream(LoadCorpus().Get("bypass_pathlib")),
                      Denylist::Default());
  EXPECT_FALSE(pathlib.flagged);
  Denylist outer({"os", "subprocess", "builtins"}, MatchMode::kModulePrefix);
  auto smuggle = Scan(testing::EntryStream(LoadCorpus().Get("bypass_dotted_smuggle")), outer);
  EXPECT_FALSE(smuggle.flagged);
  EXPECT_TRUE(Scan(testing::EntryStream(LoadCorpus().Get("bypass_multi_stop")),
                   Denylist::Default()).flagged);
}

// Whatever the scanner flags, the VM blocks under any policy that keeps the
// denied names out.
TEST(Scan, SubsumedByVm) {
  for (auto mode : {MatchMode::kExact, MatchMode::kModulePrefix}) {
    Denylist d = mode == MatchMode::kExact
                     ? Denylist::Default()
                     : Denylist({"os", "posix", "subprocess", "builtins"}, mode);
    for (const auto& e : LoadCorpus().entries) {
      auto stream = testing::EntryStream(e);
      auto report = Trace(stream);
      if (!Scan(report, d).flagged) continue;
      SCOPED_TRACE(e.id);
      // The most permissive such policy: everything traced except denied names.
      PolicyData p;
      for (const auto& n : report.imports) {
        if (!d.Matches(n)) p.allowed_imports.insert(n);
      }
      for (const auto& n : report.invocations) {
        if (!d.Matches(n)) p.allowed_invocations.insert(n);
      }
      if (!p.allowed_imports.empty()) p.root_class = *p.allowed_imports.begin();
      for (const auto& policy : {Policy::From(p), Policy::Empty()}) {
        Vm vm(VmConfig::Restricted(policy));
        try {
          vm.Run(stream);
          ADD_FAILURE() << "loaded";
        } catch (const Error& err) {
          EXPECT_TRUE(IsSecurityViolation(err.code())) << err.what();
        }
        for (const auto& inv : vm.trace().invocations) EXPECT_FALSE(d.Matches(inv.name));
      }
    }
  }
}

}  // namespace
}  // namespace pickleward
