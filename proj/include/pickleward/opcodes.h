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

#ifndef PICKLEWARD_OPCODES_H_
#define PICKLEWARD_OPCODES_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace pickleward {

// Pickle opcodes, protocols 0 through 5. The enumerator value is the
// opcode byte.
enum class Op : std::uint8_t {
  kMark = '(',
  kStop = '.',
  kPop = '0',
  kPopMark = '1',
  kDup = '2',
  kFloat = 'F',
  kInt = 'I',
  kBinInt = 'J',
  kBinInt1 = 'K',
  kLong = 'L',
  kBinInt2 = 'M',
  kNone = 'N',
  kPersId = 'P',
  kBinPersId = 'Q',
  kReduce = 'R',
  kString = 'S',
  kBinString = 'T',
  kShortBinString = 'U',
  kUnicode = 'V',
  kBinUnicode = 'X',
  kAppend = 'a',
  kBuild = 'b',
  kGlobal = 'c',
  kDict = 'd',
  kEmptyDict = '}',
  kAppends = 'e',
  kGet = 'g',
  kBinGet = 'h',
  kInst = 'i',
  kLongBinGet = 'j',
  kList = 'l',
  kEmptyList = ']',
  kObj = 'o',
  kPut = 'p',
  kBinPut = 'q',
  kLongBinPut = 'r',
  kSetItem = 's',
  kTuple = 't',
  kEmptyTuple = ')',
  kSetItems = 'u',
  kBinFloat = 'G',
  kProto = 0x80,
  kNewObj = 0x81,
  kExt1 = 0x82,
  kExt2 = 0x83,
  kExt4 = 0x84,
  kTuple1 = 0x85,
  kTuple2 = 0x86,
  kTuple3 = 0x87,
  kNewTrue = 0x88,
  kNewFalse = 0x89,
  kLong1 = 0x8a,
  kLong4 = 0x8b,
  kBinBytes = 'B',
  kShortBinBytes = 'C',
  kShortBinUnicode = 0x8c,
  kBinUnicode8 = 0x8d,
  kBinBytes8 = 0x8e,
  kEmptySet = 0x8f,
  kAddItems = 0x90,
  kFrozenSet = 0x91,
  kNewObjEx = 0x92,
  kStackGlobal = 0x93,
  kMemoize = 0x94,
  kFrame = 0x95,
  kByteArray8 = 0x96,
  kNextBuffer = 0x97,
  kReadOnlyBuffer = 0x98,
};

enum class OpcodeClass {
  kImporting,
  kAllocating,
  kInvoking,
  kBuilding,
  kMemoRead,
  kMemoWrite,
  kData,
  kControl,
  kForbidden,
};

// Encoding of the inline argument that follows the opcode byte.
enum class ArgKind {
  kNone,
  kUint1,
  kUint2,
  kInt4,
  kUint4,
  kUint8,
  kFloat8,
  kLine,       // text up to and including '\n'
  kLinePair,   // two such lines
  kBytes1,     // 1-byte length prefix
  kBytes4,     // 4-byte little-endian length
  kBytes8,     // 8-byte little-endian length
  kLong1,      // 1-byte length, two's-complement little-endian payload
  kLong4,      // signed 4-byte length, same payload
};

struct OpcodeInfo {
  Op op;
  std::string_view mnemonic;
  ArgKind arg_kind;
  int protocol;  // protocol that introduced the opcode
  OpcodeClass op_class;
};

// Table lookup by opcode byte; nullptr when the byte is not an opcode.
const OpcodeInfo* LookupOpcode(std::uint8_t byte);
const OpcodeInfo& Info(Op op);
std::string_view Mnemonic(Op op);
OpcodeClass ClassOf(Op op);
std::string_view OpcodeClassName(OpcodeClass c);
// All opcodes in table order.
std::span<const OpcodeInfo> AllOpcodes();

// Decoded argument. Integers hold kUint*/kInt4 values, doubles hold
// BINFLOAT, strings hold everything textual or byte-valued verbatim:
// the line content without its terminator (for kLinePair the two lines
// joined by '\n'), or the raw payload for length-prefixed kinds.
using OpcodeArg = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Opcode {
  Op op;
  OpcodeArg arg;
  std::uint64_t offset = 0;
  std::uint64_t length = 0;

  std::int64_t int_arg() const { return std::get<std::int64_t>(arg); }
  double float_arg() const { return std::get<double>(arg); }
  const std::string& text_arg() const { return std::get<std::string>(arg); }
};

// A pickle program: opcodes up to and including a STOP.
using Program = std::vector<Opcode>;

struct OpcodeStream {
  int protocol = 0;
  std::string source_digest;  // lowercase hex SHA-256 of the raw input
  Program opcodes;            // the first program
  // Complete programs found after the first STOP.
  std::vector<Program> trailing_programs;
  // Bytes after the last complete program that do not decode as one.
  std::string trailing_raw;
  std::uint64_t trailing_raw_offset = 0;

  bool has_trailing() const {
    return !trailing_programs.empty() || !trailing_raw.empty();
  }
};

OpcodeStream Parse(std::span<const std::uint8_t> raw);
OpcodeStream Parse(std::string_view raw);

std::string Serialize(const OpcodeStream& stream);
// Encodes a single opcode. Does not validate that the argument fits.
void AppendEncoded(const Opcode& opcode, std::string& out);

std::string Disassemble(const OpcodeStream& stream);
std::string RenderArg(const Opcode& opcode);

std::string Sha256Hex(std::string_view data);

}  // namespace pickleward

#endif  // PICKLEWARD_OPCODES_H_
