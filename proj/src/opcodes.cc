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

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstring>

#include "pickle_text.h"
#include "pickleward/error.h"

namespace pickleward {
namespace {

using C = OpcodeClass;
using A = ArgKind;

constexpr OpcodeInfo kTable[] = {
    {Op::kMark, "MARK", A::kNone, 0, C::kControl},
    {Op::kStop, "STOP", A::kNone, 0, C::kControl},
    {Op::kPop, "POP", A::kNone, 0, C::kControl},
    {Op::kPopMark, "POP_MARK", A::kNone, 1, C::kControl},
    {Op::kDup, "DUP", A::kNone, 0, C::kControl},
    {Op::kFloat, "FLOAT", A::kLine, 0, C::kData},
    {Op::kInt, "INT", A::kLine, 0, C::kData},
    {Op::kBinInt, "BININT", A::kInt4, 1, C::kData},
    {Op::kBinInt1, "BININT1", A::kUint1, 1, C::kData},
    {Op::kLong, "LONG", A::kLine, 0, C::kData},
    {Op::kBinInt2, "BININT2", A::kUint2, 1, C::kData},
    {Op::kNone, "NONE", A::kNone, 0, C::kData},
    {Op::kPersId, "PERSID", A::kLine, 0, C::kData},
    {Op::kBinPersId, "BINPERSID", A::kNone, 1, C::kData},
    {Op::kReduce, "REDUCE", A::kNone, 0, C::kInvoking},
    {Op::kString, "STRING", A::kLine, 0, C::kData},
    {Op::kBinString, "BINSTRING", A::kBytes4, 1, C::kData},
    {Op::kShortBinString, "SHORT_BINSTRING", A::kBytes1, 1, C::kData},
    {Op::kUnicode, "UNICODE", A::kLine, 0, C::kData},
    {Op::kBinUnicode, "BINUNICODE", A::kBytes4, 1, C::kData},
    {Op::kAppend, "APPEND", A::kNone, 0, C::kData},
    {Op::kBuild, "BUILD", A::kNone, 0, C::kBuilding},
    {Op::kGlobal, "GLOBAL", A::kLinePair, 0, C::kImporting},
    {Op::kDict, "DICT", A::kNone, 0, C::kData},
    {Op::kEmptyDict, "EMPTY_DICT", A::kNone, 1, C::kData},
    {Op::kAppends, "APPENDS", A::kNone, 1, C::kData},
    {Op::kGet, "GET", A::kLine, 0, C::kMemoRead},
    {Op::kBinGet, "BINGET", A::kUint1, 1, C::kMemoRead},
    {Op::kInst, "INST", A::kLinePair, 0, C::kForbidden},
    {Op::kLongBinGet, "LONG_BINGET", A::kUint4, 1, C::kMemoRead},
    {Op::kList, "LIST", A::kNone, 0, C::kData},
    {Op::kEmptyList, "EMPTY_LIST", A::kNone, 1, C::kData},
    {Op::kObj, "OBJ", A::kNone, 1, C::kForbidden},
    {Op::kPut, "PUT", A::kLine, 0, C::kMemoWrite},
    {Op::kBinPut, "BINPUT", A::kUint1, 1, C::kMemoWrite},
    {Op::kLongBinPut, "LONG_BINPUT", A::kUint4, 1, C::kMemoWrite},
    {Op::kSetItem, "SETITEM", A::kNone, 0, C::kData},
    {Op::kTuple, "TUPLE", A::kNone, 0, C::kData},
    {Op::kEmptyTuple, "EMPTY_TUPLE", A::kNone, 1, C::kData},
    {Op::kSetItems, "SETITEMS", A::kNone, 1, C::kData},
    {Op::kBinFloat, "BINFLOAT", A::kFloat8, 1, C::kData},
    {Op::kProto, "PROTO", A::kUint1, 2, C::kControl},
    {Op::kNewObj, "NEWOBJ", A::kNone, 2, C::kAllocating},
    {Op::kExt1, "EXT1", A::kUint1, 2, C::kForbidden},
    {Op::kExt2, "EXT2", A::kUint2, 2, C::kForbidden},
    {Op::kExt4, "EXT4", A::kInt4, 2, C::kForbidden},
    {Op::kTuple1, "TUPLE1", A::kNone, 2, C::kData},
    {Op::kTuple2, "TUPLE2", A::kNone, 2, C::kData},
    {Op::kTuple3, "TUPLE3", A::kNone, 2, C::kData},
    {Op::kNewTrue, "NEWTRUE", A::kNone, 2, C::kData},
    {Op::kNewFalse, "NEWFALSE", A::kNone, 2, C::kData},
    {Op::kLong1, "LONG1", A::kLong1, 2, C::kData},
    {Op::kLong4, "LONG4", A::kLong4, 2, C::kData},
    {Op::kBinBytes, "BINBYTES", A::kBytes4, 3, C::kData},
    {Op::kShortBinBytes, "SHORT_BINBYTES", A::kBytes1, 3, C::kData},
    {Op::kShortBinUnicode, "SHORT_BINUNICODE", A::kBytes1, 4, C::kData},
    {Op::kBinUnicode8, "BINUNICODE8", A::kBytes8, 4, C::kData},
    {Op::kBinBytes8, "BINBYTES8", A::kBytes8, 4, C::kData},
    {Op::kEmptySet, "EMPTY_SET", A::kNone, 4, C::kData},
    {Op::kAddItems, "ADDITEMS", A::kNone, 4, C::kData},
    {Op::kFrozenSet, "FROZENSET", A::kNone, 4, C::kData},
    {Op::kNewObjEx, "NEWOBJ_EX", A::kNone, 4, C::kAllocating},
    {Op::kStackGlobal, "STACK_GLOBAL", A::kNone, 4, C::kImporting},
    {Op::kMemoize, "MEMOIZE", A::kNone, 4, C::kMemoWrite},
    {Op::kFrame, "FRAME", A::kUint8, 4, C::kControl},
    {Op::kByteArray8, "BYTEARRAY8", A::kBytes8, 5, C::kData},
    {Op::kNextBuffer, "NEXT_BUFFER", A::kNone, 5, C::kData},
    {Op::kReadOnlyBuffer, "READONLY_BUFFER", A::kNone, 5, C::kData},
};

constexpr int kHighestProtocol = 5;

const std::array<const OpcodeInfo*, 256>& ByteIndex() {
  static const auto index = [] {
    std::array<const OpcodeInfo*, 256> a{};
    for (const auto& info : kTable) a[static_cast<std::uint8_t>(info.op)] = &info;
    return a;
  }();
  return index;
}

std::uint64_t ReadLe(const std::uint8_t* p, int n) {
  std::uint64_t v = 0;
  for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

void WriteLe(std::uint64_t v, int n, std::string& out) {
  for (int i = 0; i < n; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ProgramParser {
 public:
  ProgramParser(std::span<const std::uint8_t> data, std::uint64_t pos)
      : data_(data), pos_(pos) {}

  Program Run() {
    Program program;
    for (;;) {
      if (frame_end_ && pos_ == *frame_end_) frame_end_.reset();
      if (pos_ >= data_.size()) {
        throw Error(ErrorCode::kMissingStop, "program ends without STOP", pos_);
      }
      const OpcodeInfo* info = LookupOpcode(data_[pos_]);
      if (info == nullptr) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "unknown opcode byte 0x%02x", data_[pos_]);
        throw Error(ErrorCode::kUnknownOpcode, buf, pos_);
      }
      Opcode op{info->op, {}, pos_, 0};
      std::uint64_t cursor = pos_ + 1;
      DecodeArg(*info, cursor, op);
      op.length = cursor - pos_;
      if (frame_end_ && cursor > *frame_end_) {
        throw Error(ErrorCode::kBadFrame, "opcode crosses the end of its frame",
                    pos_, std::string(info->mnemonic));
      }
      if (info->op == Op::kFrame) OpenFrame(op, cursor);
      if (info->op == Op::kProto && op.int_arg() > kHighestProtocol) {
        throw Error(ErrorCode::kUnsupportedProtocol,
                    "unsupported pickle protocol " + std::to_string(op.int_arg()),
                    pos_);
      }
      pos_ = cursor;
      bool stop = info->op == Op::kStop;
      program.push_back(std::move(op));
      if (stop) return program;
    }
  }

  std::uint64_t pos() const { return pos_; }

 private:
  const std::uint8_t* Need(std::uint64_t at, std::uint64_t n) {
    if (at > data_.size() || data_.size() - at < n) {
      throw Error(ErrorCode::kTruncatedInput, "input ends inside an opcode", pos_);
    }
    return data_.data() + at;
  }

  std::string Line(std::uint64_t& cursor) {
    const std::uint8_t* begin = data_.data() + std::min<std::uint64_t>(cursor, data_.size());
    const std::uint8_t* end = data_.data() + data_.size();
    const void* nl = std::memchr(begin, '\n', end - begin);
    if (nl == nullptr) {
      throw Error(ErrorCode::kTruncatedInput, "line argument without newline", pos_);
    }
    auto* stop = static_cast<const std::uint8_t*>(nl);
    std::string s(reinterpret_cast<const char*>(begin), stop - begin);
    cursor += (stop - begin) + 1;
    return s;
  }

  std::string Payload(std::uint64_t& cursor, std::uint64_t n) {
    const std::uint8_t* p = Need(cursor, n);
    cursor += n;
    return std::string(reinterpret_cast<const char*>(p), n);
  }

  void DecodeArg(const OpcodeInfo& info, std::uint64_t& cursor, Opcode& op) {
    switch (info.arg_kind) {
      case A::kNone:
        return;
      case A::kUint1:
        op.arg = static_cast<std::int64_t>(*Need(cursor, 1));
        cursor += 1;
        return;
      case A::kUint2:
        op.arg = static_cast<std::int64_t>(ReadLe(Need(cursor, 2), 2));
        cursor += 2;
        return;
      case A::kInt4:
        op.arg = static_cast<std::int64_t>(
            static_cast<std::int32_t>(ReadLe(Need(cursor, 4), 4)));
        cursor += 4;
        return;
      case A::kUint4:
        op.arg = static_cast<std::int64_t>(ReadLe(Need(cursor, 4), 4));
        cursor += 4;
        return;
      case A::kUint8: {
        std::uint64_t v = ReadLe(Need(cursor, 8), 8);
        if (v > static_cast<std::uint64_t>(INT64_MAX)) {
          throw Error(ErrorCode::kBadFrame, "frame length out of range", pos_);
        }
        op.arg = static_cast<std::int64_t>(v);
        cursor += 8;
        return;
      }
      case A::kFloat8: {
        const std::uint8_t* p = Need(cursor, 8);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits = (bits << 8) | p[i];
        op.arg = std::bit_cast<double>(bits);
        cursor += 8;
        return;
      }
      case A::kLine:
        op.arg = Line(cursor);
        return;
      case A::kLinePair: {
        std::string first = Line(cursor);
        std::string second = Line(cursor);
        op.arg = first + "\n" + second;
        return;
      }
      case A::kBytes1:
      case A::kLong1: {
        std::uint64_t n = *Need(cursor, 1);
        cursor += 1;
        op.arg = Payload(cursor, n);
        return;
      }
      case A::kBytes4:
      case A::kLong4: {
        std::uint64_t n = ReadLe(Need(cursor, 4), 4);
        bool is_signed = info.arg_kind == A::kLong4 || info.op == Op::kBinString;
        if (is_signed && n > 0x7FFFFFFFu) {
          throw Error(ErrorCode::kBadArgument, "negative byte count", pos_,
                      std::string(info.mnemonic));
        }
        cursor += 4;
        op.arg = Payload(cursor, n);
        return;
      }
      case A::kBytes8: {
        std::uint64_t n = ReadLe(Need(cursor, 8), 8);
        cursor += 8;
        op.arg = Payload(cursor, n);
        return;
      }
    }
  }

  void OpenFrame(const Opcode& op, std::uint64_t cursor) {
    auto len = static_cast<std::uint64_t>(op.int_arg());
    if (frame_end_) {
      throw Error(ErrorCode::kBadFrame, "frame starts before the previous one ends",
                  op.offset);
    }
    if (len > data_.size() - cursor) {
      throw Error(ErrorCode::kBadFrame,
                  "frame length " + std::to_string(len) + " exceeds the input",
                  op.offset);
    }
    frame_end_ = cursor + len;
  }

  std::span<const std::uint8_t> data_;
  std::uint64_t pos_;
  std::optional<std::uint64_t> frame_end_;
};

std::string RenderLine(const Opcode& op) {
  const std::string& s = op.text_arg();
  switch (op.op) {
    case Op::kUnicode: {
      auto decoded = text::DecodeRawUnicodeEscape(s);
      return decoded ? text::ReprText(*decoded) : text::ReprBytes(s);
    }
    case Op::kPersId:
      return text::IsUtf8SurrogatePass(s) ? text::ReprText(s) : text::ReprBytes(s);
    default:
      return s;
  }
}

}  // namespace

const OpcodeInfo* LookupOpcode(std::uint8_t byte) { return ByteIndex()[byte]; }

const OpcodeInfo& Info(Op op) { return *ByteIndex()[static_cast<std::uint8_t>(op)]; }

std::string_view Mnemonic(Op op) { return Info(op).mnemonic; }

OpcodeClass ClassOf(Op op) { return Info(op).op_class; }

std::string_view OpcodeClassName(OpcodeClass c) {
  switch (c) {
    case C::kImporting: return "Importing";
    case C::kAllocating: return "Allocating";
    case C::kInvoking: return "Invoking";
    case C::kBuilding: return "Building";
    case C::kMemoRead: return "MemoRead";
    case C::kMemoWrite: return "MemoWrite";
    case C::kData: return "Data";
    case C::kControl: return "Control";
    case C::kForbidden: return "Forbidden";
  }
  return "";
}

std::span<const OpcodeInfo> AllOpcodes() { return kTable; }

OpcodeStream Parse(std::span<const std::uint8_t> raw) {
  OpcodeStream stream;
  ProgramParser first(raw, 0);
  stream.opcodes = first.Run();
  std::uint64_t pos = first.pos();
  while (pos < raw.size()) {
    ProgramParser next(raw, pos);
    try {
      stream.trailing_programs.push_back(next.Run());
      pos = next.pos();
    } catch (const Error&) {
      stream.trailing_raw.assign(reinterpret_cast<const char*>(raw.data()) + pos,
                                 raw.size() - pos);
      stream.trailing_raw_offset = pos;
      break;
    }
  }
  const Opcode& head = stream.opcodes.front();
  if (head.op == Op::kProto) {
    stream.protocol = static_cast<int>(head.int_arg());
  } else {
    for (const auto& op : stream.opcodes) {
      if (Info(op.op).protocol > 0) {
        stream.protocol = 1;
        break;
      }
    }
  }
  stream.source_digest = Sha256Hex(std::string_view(
      reinterpret_cast<const char*>(raw.data()), raw.size()));
  return stream;
}

OpcodeStream Parse(std::string_view raw) {
  return Parse(std::span<const std::uint8_t>(
      reinterpret_cast<const std::uint8_t*>(raw.data()), raw.size()));
}

void AppendEncoded(const Opcode& op, std::string& out) {
  const OpcodeInfo& info = Info(op.op);
  out.push_back(static_cast<char>(op.op));
  switch (info.arg_kind) {
    case A::kNone:
      return;
    case A::kUint1:
      WriteLe(static_cast<std::uint64_t>(op.int_arg()), 1, out);
      return;
    case A::kUint2:
      WriteLe(static_cast<std::uint64_t>(op.int_arg()), 2, out);
      return;
    case A::kInt4:
    case A::kUint4:
      WriteLe(static_cast<std::uint64_t>(op.int_arg()), 4, out);
      return;
    case A::kUint8:
      WriteLe(static_cast<std::uint64_t>(op.int_arg()), 8, out);
      return;
    case A::kFloat8: {
      auto bits = std::bit_cast<std::uint64_t>(op.float_arg());
      for (int i = 7; i >= 0; --i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
      return;
    }
    case A::kLine:
    case A::kLinePair:
      out += op.text_arg();
      out.push_back('\n');
      return;
    case A::kBytes1:
    case A::kLong1:
      WriteLe(op.text_arg().size(), 1, out);
      out += op.text_arg();
      return;
    case A::kBytes4:
    case A::kLong4:
      WriteLe(op.text_arg().size(), 4, out);
      out += op.text_arg();
      return;
    case A::kBytes8:
      WriteLe(op.text_arg().size(), 8, out);
      out += op.text_arg();
      return;
  }
}

std::string Serialize(const OpcodeStream& stream) {
  std::string out;
  for (const auto& op : stream.opcodes) AppendEncoded(op, out);
  for (const auto& program : stream.trailing_programs) {
    for (const auto& op : program) AppendEncoded(op, out);
  }
  out += stream.trailing_raw;
  return out;
}

std::string RenderArg(const Opcode& op) {
  const OpcodeInfo& info = Info(op.op);
  switch (info.arg_kind) {
    case A::kNone:
      return "";
    case A::kUint1:
    case A::kUint2:
    case A::kInt4:
    case A::kUint4:
    case A::kUint8:
      return std::to_string(op.int_arg());
    case A::kFloat8:
      return text::FloatRepr(op.float_arg());
    case A::kLine:
      return RenderLine(op);
    case A::kLinePair: {
      std::string joined = op.text_arg();
      joined[joined.find('\n')] = ' ';
      return text::IsUtf8SurrogatePass(joined) ? text::ReprText(joined)
                                               : text::ReprBytes(joined);
    }
    case A::kLong1:
    case A::kLong4:
      return text::LongFromBytes(op.text_arg()).ToDecimal();
    case A::kBytes1:
    case A::kBytes4:
    case A::kBytes8: {
      const std::string& s = op.text_arg();
      bool unicode = op.op == Op::kBinUnicode || op.op == Op::kShortBinUnicode ||
                     op.op == Op::kBinUnicode8;
      if (unicode && text::IsUtf8SurrogatePass(s)) return text::ReprText(s);
      return text::ReprBytes(s);
    }
  }
  return "";
}

std::string Disassemble(const OpcodeStream& stream) {
  std::string out;
  auto emit = [&out](const Program& program) {
    for (const auto& op : program) {
      out += std::to_string(op.offset);
      out += ": ";
      out += Mnemonic(op.op);
      std::string arg = RenderArg(op);
      if (!arg.empty()) {
        out.push_back(' ');
        out += arg;
      }
      out.push_back('\n');
    }
  };
  emit(stream.opcodes);
  for (const auto& program : stream.trailing_programs) {
    out += "-- trailing program --\n";
    emit(program);
  }
  if (!stream.trailing_raw.empty()) {
    out += "-- trailing bytes: " + std::to_string(stream.trailing_raw.size()) +
           " at offset " + std::to_string(stream.trailing_raw_offset) + " --\n";
  }
  return out;
}

std::string Sha256Hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  return text::HexLower(
      std::string_view(reinterpret_cast<const char*>(digest), len));
}

}  // namespace pickleward
