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

// Text and number codecs shared by the disassembler, the VM, the tracer
// and the dumper. Behavior follows CPython's unpickler for the same
// inputs.

#ifndef PICKLEWARD_SRC_PICKLE_TEXT_H_
#define PICKLEWARD_SRC_PICKLE_TEXT_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pickleward::text {

// An integer that is either small or carried as a normalized decimal
// string ("-123", never "-0", no leading zeros).
struct IntValue {
  bool big = false;
  std::int64_t small = 0;
  std::string decimal;

  std::string ToDecimal() const;
};

IntValue FromDecimal(std::string decimal);

// Two's-complement little-endian payload of LONG1/LONG4.
IntValue LongFromBytes(std::string_view le);

// int(text, 0) as CPython accepts it, whitespace and underscores included.
std::optional<IntValue> ParseIntLiteral(std::string_view text);
// int(text) in base 10, as used by GET/PUT.
std::optional<std::int64_t> ParseDecimalIndex(std::string_view text);
// float(text).
std::optional<double> ParseFloatLiteral(std::string_view text);

// Exact decimal form of an integral double.
std::string IntegralDoubleToDecimal(double value);

// repr(float).
std::string FloatRepr(double value);

// STRING argument: strips the matching quotes and applies escape decoding.
std::optional<std::string> DecodeQuotedString(std::string_view line);
// UNICODE argument: raw-unicode-escape to UTF-8 (lone surrogates kept).
std::optional<std::string> DecodeRawUnicodeEscape(std::string_view line);

// UTF-8 validity with encoded surrogates accepted, as 'surrogatepass'.
bool IsUtf8SurrogatePass(std::string_view bytes);
bool IsAscii(std::string_view bytes);

// json.dumps(s) with ensure_ascii, for a string valid per IsUtf8SurrogatePass.
void AppendJsonString(std::string_view utf8, std::string& out);
std::string JsonString(std::string_view utf8);

std::string HexLower(std::string_view bytes);

// Python-style quoted rendering used by the disassembler.
std::string ReprText(std::string_view utf8);
std::string ReprBytes(std::string_view bytes);

}  // namespace pickleward::text

#endif  // PICKLEWARD_SRC_PICKLE_TEXT_H_
