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

#include "pickle_text.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <vector>

namespace pickleward::text {
namespace {

// Unsigned magnitude, base 2^32, least significant limb first.
using Magnitude = std::vector<std::uint32_t>;

void MulAdd(Magnitude& m, std::uint32_t mul, std::uint32_t add) {
  std::uint64_t carry = add;
  for (auto& limb : m) {
    std::uint64_t v = static_cast<std::uint64_t>(limb) * mul + carry;
    limb = static_cast<std::uint32_t>(v);
    carry = v >> 32;
  }
  if (carry) m.push_back(static_cast<std::uint32_t>(carry));
}

std::uint32_t DivMod(Magnitude& m, std::uint32_t div) {
  std::uint64_t rem = 0;
  for (std::size_t i = m.size(); i-- > 0;) {
    std::uint64_t cur = (rem << 32) | m[i];
    m[i] = static_cast<std::uint32_t>(cur / div);
    rem = cur % div;
  }
  while (!m.empty() && m.back() == 0) m.pop_back();
  return static_cast<std::uint32_t>(rem);
}

std::string MagnitudeToDecimal(Magnitude m, bool negative) {
  while (!m.empty() && m.back() == 0) m.pop_back();
  if (m.empty()) return "0";
  std::vector<std::uint32_t> chunks;
  while (!m.empty()) chunks.push_back(DivMod(m, 1000000000u));
  std::string out = negative ? "-" : "";
  out += std::to_string(chunks.back());
  for (std::size_t i = chunks.size() - 1; i-- > 0;) {
    std::string part = std::to_string(chunks[i]);
    out.append(9 - part.size(), '0');
    out += part;
  }
  return out;
}

bool IsPySpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string_view StripSpace(std::string_view s) {
  while (!s.empty() && IsPySpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsPySpace(s.back())) s.remove_suffix(1);
  return s;
}

int DigitValue(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'z') return c - 'a' + 10;
  if (c >= 'A' && c <= 'Z') return c - 'A' + 10;
  return 99;
}

// Digits with single underscores between them; a leading underscore is
// allowed only when `leading_ok` (directly after a base prefix).
std::optional<std::string> StripUnderscores(std::string_view digits,
                                            bool leading_ok) {
  std::string out;
  bool prev_digit = leading_ok;
  for (char c : digits) {
    if (c == '_') {
      if (!prev_digit) return std::nullopt;
      prev_digit = false;
      continue;
    }
    out.push_back(c);
    prev_digit = true;
  }
  if (!prev_digit || out.empty()) return std::nullopt;
  return out;
}

void AppendUtf8(std::uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Decodes one code point from valid surrogate-pass UTF-8.
std::uint32_t NextCodePoint(std::string_view s, std::size_t& i) {
  auto b = static_cast<unsigned char>(s[i]);
  if (b < 0x80) {
    ++i;
    return b;
  }
  int extra = b >= 0xF0 ? 3 : b >= 0xE0 ? 2 : 1;
  std::uint32_t cp = b & (0x3F >> extra);
  for (int k = 1; k <= extra && i + k < s.size(); ++k) {
    cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
  }
  i += extra + 1;
  return cp;
}

constexpr char kHex[] = "0123456789abcdef";

void AppendHex4(std::uint32_t v, std::string& out) {
  for (int shift = 12; shift >= 0; shift -= 4) out.push_back(kHex[(v >> shift) & 0xF]);
}

}  // namespace

std::string IntValue::ToDecimal() const {
  return big ? decimal : std::to_string(small);
}

IntValue FromDecimal(std::string decimal) {
  if (decimal == "-0") decimal = "0";
  IntValue v;
  std::int64_t small = 0;
  auto [ptr, ec] =
      std::from_chars(decimal.data(), decimal.data() + decimal.size(), small);
  if (ec == std::errc() && ptr == decimal.data() + decimal.size()) {
    v.small = small;
    return v;
  }
  v.big = true;
  v.decimal = std::move(decimal);
  return v;
}

IntValue LongFromBytes(std::string_view le) {
  if (le.empty()) return IntValue{};
  if (le.size() <= 8) {
    std::uint64_t u = 0;
    for (std::size_t i = 0; i < le.size(); ++i) {
      u |= static_cast<std::uint64_t>(static_cast<unsigned char>(le[i])) << (8 * i);
    }
    if (le.size() < 8 && (static_cast<unsigned char>(le.back()) & 0x80)) {
      u |= ~0ULL << (8 * le.size());
    }
    IntValue v;
    v.small = static_cast<std::int64_t>(u);
    return v;
  }
  std::vector<unsigned char> bytes(le.begin(), le.end());
  bool negative = bytes.back() & 0x80;
  if (negative) {
    for (auto& b : bytes) b = static_cast<unsigned char>(~b);
    for (auto& b : bytes) {
      if (++b != 0) break;
    }
  }
  Magnitude m((bytes.size() + 3) / 4, 0);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    m[i / 4] |= static_cast<std::uint32_t>(bytes[i]) << (8 * (i % 4));
  }
  return FromDecimal(MagnitudeToDecimal(std::move(m), negative));
}

std::optional<IntValue> ParseIntLiteral(std::string_view text) {
  std::string_view s = StripSpace(text);
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  int base = 10;
  bool prefixed = false;
  if (s.size() >= 2 && s[0] == '0') {
    char p = static_cast<char>(s[1] | 0x20);
    if (p == 'x') base = 16;
    if (p == 'o') base = 8;
    if (p == 'b') base = 2;
    if (base != 10) {
      s.remove_prefix(2);
      prefixed = true;
    }
  }
  auto digits = StripUnderscores(s, prefixed);
  if (!digits) return std::nullopt;
  for (char c : *digits) {
    if (DigitValue(c) >= base) return std::nullopt;
  }
  if (base == 10 && digits->size() > 1 && (*digits)[0] == '0' &&
      digits->find_first_not_of('0') != std::string::npos) {
    return std::nullopt;
  }
  Magnitude m;
  for (char c : *digits) MulAdd(m, base, DigitValue(c));
  return FromDecimal(MagnitudeToDecimal(std::move(m), negative));
}

std::optional<std::int64_t> ParseDecimalIndex(std::string_view text) {
  std::string_view s = StripSpace(text);
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  auto digits = StripUnderscores(s, false);
  if (!digits) return std::nullopt;
  std::int64_t v = 0;
  auto [ptr, ec] =
      std::from_chars(digits->data(), digits->data() + digits->size(), v);
  if (ec != std::errc() || ptr != digits->data() + digits->size()) {
    return std::nullopt;
  }
  return negative ? -v : v;
}

std::optional<double> ParseFloatLiteral(std::string_view text) {
  std::string_view s = StripSpace(text);
  bool negative = false;
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "inf" || lower == "infinity") {
    return negative ? -HUGE_VAL : HUGE_VAL;
  }
  if (lower == "nan") return negative ? -std::nan("") : std::nan("");
  std::string clean;
  char prev = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c == '_') {
      bool next_digit = i + 1 < s.size() && s[i + 1] >= '0' && s[i + 1] <= '9';
      if (!(prev >= '0' && prev <= '9') || !next_digit) return std::nullopt;
      prev = c;
      continue;
    }
    bool ok = (c >= '0' && c <= '9') || c == '.' || c == 'e' || c == 'E' ||
              ((c == '+' || c == '-') && (prev == 'e' || prev == 'E'));
    if (!ok) return std::nullopt;
    clean.push_back(c);
    prev = c;
  }
  if (clean.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(clean.data(), clean.data() + clean.size(), v);
  if (ptr != clean.data() + clean.size()) return std::nullopt;
  if (ec == std::errc::result_out_of_range) {
    v = std::strtod(clean.c_str(), nullptr);
  } else if (ec != std::errc()) {
    return std::nullopt;
  }
  return negative ? -v : v;
}

std::string IntegralDoubleToDecimal(double value) {
  if (std::fabs(value) < 9.0e18) {
    return std::to_string(static_cast<std::int64_t>(value));
  }
  int exp = 0;
  double frac = std::frexp(std::fabs(value), &exp);
  auto mantissa = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  Magnitude m{static_cast<std::uint32_t>(mantissa),
              static_cast<std::uint32_t>(mantissa >> 32)};
  for (int i = 0; i < exp - 53; ++i) MulAdd(m, 2, 0);
  return MagnitudeToDecimal(std::move(m), value < 0);
}

std::string FloatRepr(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  if (value == 0) return std::signbit(value) ? "-0.0" : "0.0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value,
                           std::chars_format::scientific);
  std::string_view sci(buf, res.ptr - buf);
  std::string out;
  if (sci.front() == '-') {
    out.push_back('-');
    sci.remove_prefix(1);
  }
  auto epos = sci.find('e');
  std::string digits;
  for (char c : sci.substr(0, epos)) {
    if (c != '.') digits.push_back(c);
  }
  int exp = std::atoi(std::string(sci.substr(epos + 1)).c_str());
  if (exp < -4 || exp >= 16) {
    out.push_back(digits[0]);
    if (digits.size() > 1) {
      out.push_back('.');
      out.append(digits, 1);
    }
    out.push_back('e');
    out.push_back(exp < 0 ? '-' : '+');
    std::string e = std::to_string(std::abs(exp));
    if (e.size() < 2) out.push_back('0');
    out += e;
  } else if (exp >= 0) {
    std::size_t int_len = static_cast<std::size_t>(exp) + 1;
    if (digits.size() <= int_len) {
      out += digits;
      out.append(int_len - digits.size(), '0');
      out += ".0";
    } else {
      out.append(digits, 0, int_len);
      out.push_back('.');
      out.append(digits, int_len);
    }
  } else {
    out += "0.";
    out.append(static_cast<std::size_t>(-exp - 1), '0');
    out += digits;
  }
  return out;
}

std::optional<std::string> DecodeQuotedString(std::string_view line) {
  if (line.size() < 2 || line.front() != line.back() ||
      (line.front() != '\'' && line.front() != '"')) {
    return std::nullopt;
  }
  std::string_view s = line.substr(1, line.size() - 2);
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (++i >= s.size()) return std::nullopt;
    char e = s[i];
    switch (e) {
      case '\n': break;
      case '\\': out.push_back('\\'); break;
      case '\'': out.push_back('\''); break;
      case '"': out.push_back('"'); break;
      case 'b': out.push_back('\b'); break;
      case 'f': out.push_back('\f'); break;
      case 't': out.push_back('\t'); break;
      case 'n': out.push_back('\n'); break;
      case 'r': out.push_back('\r'); break;
      case 'v': out.push_back('\v'); break;
      case 'a': out.push_back('\a'); break;
      case 'x': {
        if (i + 2 >= s.size()) return std::nullopt;
        int hi = DigitValue(s[i + 1]);
        int lo = DigitValue(s[i + 2]);
        if (hi >= 16 || lo >= 16) return std::nullopt;
        out.push_back(static_cast<char>(hi * 16 + lo));
        i += 2;
        break;
      }
      default:
        if (e >= '0' && e <= '7') {
          int v = e - '0';
          for (int k = 0; k < 2 && i + 1 < s.size() && s[i + 1] >= '0' && s[i + 1] <= '7'; ++k) {
            v = v * 8 + (s[++i] - '0');
          }
          out.push_back(static_cast<char>(v & 0xFF));
        } else {
          out.push_back('\\');
          out.push_back(e);
        }
    }
  }
  return out;
}

std::optional<std::string> DecodeRawUnicodeEscape(std::string_view line) {
  std::string out;
  std::size_t i = 0;
  while (i < line.size()) {
    auto ch = static_cast<unsigned char>(line[i]);
    if (ch != '\\') {
      AppendUtf8(ch, out);
      ++i;
      continue;
    }
    std::size_t run = 0;
    while (i < line.size() && line[i] == '\\') {
      out.push_back('\\');
      ++run;
      ++i;
    }
    if (run % 2 == 0 || i >= line.size() || (line[i] != 'u' && line[i] != 'U')) {
      continue;
    }
    out.pop_back();
    int count = line[i] == 'u' ? 4 : 8;
    ++i;
    if (i + count > line.size()) return std::nullopt;
    std::uint32_t cp = 0;
    for (int k = 0; k < count; ++k) {
      int d = DigitValue(line[i + k]);
      if (d >= 16) return std::nullopt;
      cp = cp * 16 + d;
    }
    if (cp > 0x10FFFF) return std::nullopt;
    AppendUtf8(cp, out);
    i += count;
  }
  return out;
}

bool IsUtf8SurrogatePass(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    auto b = static_cast<unsigned char>(s[i]);
    if (b < 0x80) {
      ++i;
      continue;
    }
    int extra;
    std::uint32_t min;
    if (b >= 0xC2 && b <= 0xDF) {
      extra = 1;
      min = 0x80;
    } else if (b >= 0xE0 && b <= 0xEF) {
      extra = 2;
      min = 0x800;
    } else if (b >= 0xF0 && b <= 0xF4) {
      extra = 3;
      min = 0x10000;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    std::uint32_t cp = b & (0x3F >> extra);
    for (int k = 1; k <= extra; ++k) {
      auto c = static_cast<unsigned char>(s[i + k]);
      if ((c & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (c & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF) return false;
    i += extra + 1;
  }
  return true;
}

bool IsAscii(std::string_view bytes) {
  return std::all_of(bytes.begin(), bytes.end(),
                     [](char c) { return static_cast<unsigned char>(c) < 0x80; });
}

void AppendJsonString(std::string_view utf8, std::string& out) {
  out.push_back('"');
  std::size_t i = 0;
  while (i < utf8.size()) {
    std::uint32_t cp = NextCodePoint(utf8, i);
    switch (cp) {
      case '"': out += "\\\""; continue;
      case '\\': out += "\\\\"; continue;
      case '\n': out += "\\n"; continue;
      case '\r': out += "\\r"; continue;
      case '\t': out += "\\t"; continue;
      case '\b': out += "\\b"; continue;
      case '\f': out += "\\f"; continue;
      default: break;
    }
    if (cp >= 0x20 && cp < 0x7F) {
      out.push_back(static_cast<char>(cp));
    } else if (cp >= 0x10000) {
      std::uint32_t v = cp - 0x10000;
      out += "\\u";
      AppendHex4(0xD800 | (v >> 10), out);
      out += "\\u";
      AppendHex4(0xDC00 | (v & 0x3FF), out);
    } else {
      out += "\\u";
      AppendHex4(cp, out);
    }
  }
  out.push_back('"');
}

std::string JsonString(std::string_view utf8) {
  std::string out;
  AppendJsonString(utf8, out);
  return out;
}

std::string HexLower(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size() * 2);
  for (char c : bytes) {
    auto b = static_cast<unsigned char>(c);
    out.push_back(kHex[b >> 4]);
    out.push_back(kHex[b & 0xF]);
  }
  return out;
}

std::string ReprText(std::string_view utf8) {
  std::string out = "'";
  std::size_t i = 0;
  while (i < utf8.size()) {
    std::uint32_t cp = NextCodePoint(utf8, i);
    if (cp == '\\' || cp == '\'') {
      out.push_back('\\');
      out.push_back(static_cast<char>(cp));
    } else if (cp == '\n') {
      out += "\\n";
    } else if (cp == '\r') {
      out += "\\r";
    } else if (cp == '\t') {
      out += "\\t";
    } else if (cp >= 0x20 && cp < 0x7F) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x100) {
      out += "\\x";
      out.push_back(kHex[cp >> 4]);
      out.push_back(kHex[cp & 0xF]);
    } else if (cp < 0x10000) {
      out += "\\u";
      AppendHex4(cp, out);
    } else {
      out += "\\U";
      AppendHex4(cp >> 16, out);
      AppendHex4(cp & 0xFFFF, out);
    }
  }
  out.push_back('\'');
  return out;
}

std::string ReprBytes(std::string_view bytes) {
  std::string out = "b'";
  for (char c : bytes) {
    auto b = static_cast<unsigned char>(c);
    if (b == '\\' || b == '\'') {
      out.push_back('\\');
      out.push_back(c);
    } else if (b == '\n') {
      out += "\\n";
    } else if (b == '\r') {
      out += "\\r";
    } else if (b == '\t') {
      out += "\\t";
    } else if (b >= 0x20 && b < 0x7F) {
      out.push_back(c);
    } else {
      out += "\\x";
      out.push_back(kHex[b >> 4]);
      out.push_back(kHex[b & 0xF]);
    }
  }
  out.push_back('\'');
  return out;
}

}  // namespace pickleward::text
