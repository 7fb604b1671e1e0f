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

#include "pickleward/opcodes.h"

#include <gtest/gtest.h>

#include <random>
#include <set>

#include "pickleward/error.h"
#include "support/corpus.h"
#include "support/oracles.h"

namespace pickleward {
namespace {

template <std::size_t N>
std::string B(const char (&s)[N]) {
  return std::string(s, N - 1);
}

ErrorCode ParseError(const std::string& bytes) {
  try {
    Parse(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "parsed";
  return ErrorCode::kIo;
}

std::vector<Op> Ops(const Program& p) {
  std::vector<Op> out;
  for (const auto& op : p) out.push_back(op.op);
  return out;
}

void ExpectTiled(const OpcodeStream& s, std::size_t total) {
  std::uint64_t at = 0;
  auto walk = [&](const Program& p) {
    for (const auto& op : p) {
      ASSERT_EQ(op.offset, at);
      at += op.length;
    }
  };
  walk(s.opcodes);
  for (const auto& p : s.trailing_programs) walk(p);
  if (!s.trailing_raw.empty()) {
    ASSERT_EQ(s.trailing_raw_offset, at);
    at += s.trailing_raw.size();
  }
  EXPECT_EQ(at, total);
}

TEST(Parse, NonePickle) {
  auto s = Parse(B("N."));
  EXPECT_EQ(Ops(s.opcodes), (std::vector<Op>{Op::kNone, Op::kStop}));
  EXPECT_EQ(s.protocol, 0);
  EXPECT_EQ(Disassemble(s), "0: NONE\n1: STOP\n");
}

TEST(Parse, Protocol4None) {
  auto s = Parse(B("\x80\x04N."));
  EXPECT_EQ(Ops(s.opcodes), (std::vector<Op>{Op::kProto, Op::kNone, Op::kStop}));
  EXPECT_EQ(s.protocol, 4);
  EXPECT_EQ(s.opcodes[0].int_arg(), 4);
}

TEST(Parse, ProtocolInferredWithoutProto) {
  EXPECT_EQ(Parse(B("K\x01.")).protocol, 1);
  EXPECT_EQ(Parse(B("I1\n.")).protocol, 0);
}

TEST(Parse, Errors) {
  EXPECT_EQ(ParseError(B("N")), ErrorCode::kMissingStop);
  EXPECT_EQ(ParseError(B("")), ErrorCode::kMissingStop);
  EXPECT_EQ(ParseError(B("J\x01\x00")), ErrorCode::kTruncatedInput);
  EXPECT_EQ(ParseError(B("I12")), ErrorCode::kTruncatedInput);
  EXPECT_EQ(ParseError(B("\xffN.")), ErrorCode::kUnknownOpcode);
  EXPECT_EQ(ParseError(B("\x80\x06N.")), ErrorCode::kUnsupportedProtocol);
  EXPECT_EQ(ParseError(B("T\xff\xff\xff\xff.")), ErrorCode::kBadArgument);
  // Frame longer than the input.
  EXPECT_EQ(ParseError(B("\x80\x04\x95\x09\x00\x00\x00\x00\x00\x00\x00N.")), ErrorCode::kBadFrame);
  // Opcode straddling the frame end.
  EXPECT_EQ(ParseError(B("\x80\x04\x95\x02\x00\x00\x00\x00\x00\x00\x00J\x01\x00\x00\x00.")),
            ErrorCode::kBadFrame);
}

TEST(Parse, FramedProgram) {
  auto s = Parse(B("\x80\x04\x95\x02\x00\x00\x00\x00\x00\x00\x00N."));
  EXPECT_EQ(Ops(s.opcodes), (std::vector<Op>{Op::kProto, Op::kFrame, Op::kNone, Op::kStop}));
  EXPECT_EQ(s.opcodes[1].int_arg(), 2);
}

TEST(Parse, TrailingContentIsKept) {
  auto s = Parse(B("N.K\x01."));
  EXPECT_TRUE(s.has_trailing());
  ASSERT_EQ(s.trailing_programs.size(), 1u);
  EXPECT_EQ(Ops(s.trailing_programs[0]), (std::vector<Op>{Op::kBinInt1, Op::kStop}));
  auto raw = Parse(B("N.\xff\xfe"));
  EXPECT_EQ(raw.trailing_raw, B("\xff\xfe"));
  EXPECT_EQ(raw.trailing_raw_offset, 2u);
  EXPECT_EQ(Serialize(raw), B("N.\xff\xfe"));
  EXPECT_NE(Disassemble(raw).find("-- trailing bytes: 2 at offset 2 --"), std::string::npos);
}

TEST(Parse, DecodedArguments) {
  auto s = Parse(B("\x80\x02\x8a\x02\xff\x7fG@\t!\xfbTD-\x18X\x02\x00\x00\x00hi."));
  EXPECT_EQ(s.opcodes[1].text_arg(), B("\xff\x7f"));
  EXPECT_DOUBLE_EQ(s.opcodes[2].float_arg(), 3.141592653589793);
  EXPECT_EQ(s.opcodes[3].text_arg(), "hi");
}

TEST(Disassemble, GlobalAndEscapedText) {
  auto s = Parse(B("\x80\x04\x8c\x05" "a'\n\xc3\xa9" "\x94" "cos\nsystem\n."));
  std::string text = Disassemble(s);
  EXPECT_NE(text.find("GLOBAL 'os system'"), std::string::npos);
  EXPECT_NE(text.find(R"(2: SHORT_BINUNICODE 'a\'\n\xe9')"), std::string::npos) << text;
}

TEST(Disassemble, MaliciousFixture) {
  const auto& e = testing::LoadCorpus().Get("malicious_os_system");
  std::string text = Disassemble(testing::EntryStream(e));
  EXPECT_EQ(text.substr(0, 21), "0: GLOBAL 'os system'");
}

TEST(Opcodes, ClassificationIsTotal) {
  std::set<int> bytes;
  for (const auto& info : AllOpcodes()) {
    EXPECT_TRUE(bytes.insert(static_cast<int>(info.op)).second);
    EXPECT_EQ(LookupOpcode(static_cast<std::uint8_t>(info.op))->mnemonic, info.mnemonic);
  }
  EXPECT_EQ(bytes.size(), 68u);
  EXPECT_EQ(ClassOf(Op::kGlobal), OpcodeClass::kImporting);
  EXPECT_EQ(ClassOf(Op::kStackGlobal), OpcodeClass::kImporting);
  EXPECT_EQ(ClassOf(Op::kNewObj), OpcodeClass::kAllocating);
  EXPECT_EQ(ClassOf(Op::kNewObjEx), OpcodeClass::kAllocating);
  EXPECT_EQ(ClassOf(Op::kReduce), OpcodeClass::kInvoking);
  EXPECT_EQ(ClassOf(Op::kBuild), OpcodeClass::kBuilding);
  for (Op op : {Op::kObj, Op::kInst, Op::kExt1, Op::kExt2, Op::kExt4}) {
    EXPECT_EQ(ClassOf(op), OpcodeClass::kForbidden);
  }
}

TEST(RoundTrip, WholeCorpus) {
  for (const auto& e : testing::LoadCorpus().entries) {
    SCOPED_TRACE(e.id);
    std::string bytes = testing::EntryBytes(e);
    auto s = Parse(bytes);
    EXPECT_EQ(Serialize(s), bytes);
    ExpectTiled(s, bytes.size());
    EXPECT_EQ(s.source_digest.size(), 64u);
  }
}


TEST(RoundTrip, RandomizedMutations) {
  std::vector<std::string> seeds;
  for (const auto& e : testing::LoadCorpus().entries) {
    std::string b = testing::EntryBytes(e);
    if (b.size() < 64 * 1024) seeds.push_back(std::move(b));
  }
  std::mt19937_64 rng(20240611);
  int accepted = 0;
  int attempts = 0;
  while (accepted < 1000 && attempts < 200000) {
    ++attempts;
    std::string m = testing::MutatePickle(seeds[rng() % seeds.size()], rng);
    OpcodeStream s;
    try {
      s = Parse(m);
    } catch (const Error&) {
      continue;
    }
    ++accepted;
    ASSERT_EQ(Serialize(s), m);
    ExpectTiled(s, m.size());
  }
  EXPECT_EQ(accepted, 1000);
}

}  // namespace
}  // namespace pickleward
