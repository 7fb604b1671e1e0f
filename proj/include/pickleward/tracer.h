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

#ifndef PICKLEWARD_TRACER_H_
#define PICKLEWARD_TRACER_H_

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pickleward/opcodes.h"

namespace pickleward {

inline constexpr char kTraceSchema[] = "pickleward-trace/1";
inline constexpr char kDenylistSchema[] = "pickleward-denylist/1";

// A callee or import whose name is not a literal in the program, e.g. the
// result of an earlier call.
struct DynamicSite {
  std::string mnemonic;
  std::uint64_t offset = 0;
  std::string reason;
  friend bool operator==(const DynamicSite&, const DynamicSite&) = default;
};

struct ForbiddenSite {
  std::string mnemonic;
  std::uint64_t offset = 0;
  friend bool operator==(const ForbiddenSite&, const ForbiddenSite&) = default;
};

struct TraceReport {
  std::set<std::string> imports;
  std::set<std::string> invocations;
  std::set<std::string> allocations;
  bool has_trailing_programs = false;
  std::vector<ForbiddenSite> forbidden_opcodes;
  std::vector<DynamicSite> dynamic;

  friend bool operator==(const TraceReport&, const TraceReport&) = default;
};

// Static trace of every program in the stream, trailing ones included.
// Never executes anything and never fails on well-parsed input.
TraceReport Trace(const OpcodeStream& stream);

// One section per set, names sorted.
std::string FormatTraceText(const TraceReport& report);
// JSON document with schema pickleward-trace/1.
std::string FormatTraceJson(const TraceReport& report, std::string_view source = {});

enum class MatchMode { kExact, kModulePrefix };

// Names a scanner refuses. In kModulePrefix mode an entry also covers
// every name below it ("os" covers "os.system" and "os.path.join").
class Denylist {
 public:
  // Throws Error(kBadArgument) when `denied` is empty.
  Denylist(std::set<std::string> denied, MatchMode mode);

  // The small documented list: os, posix, nt, subprocess, pty, runpy and
  // the builtins exec/eval family. A foil for experiments, not a defense.
  static Denylist Default();

  const std::set<std::string>& denied() const { return denied_; }
  MatchMode mode() const { return mode_; }
  bool Matches(std::string_view name) const;

 private:
  std::set<std::string> denied_;
  MatchMode mode_;
};

// Schema pickleward-denylist/1: {"schema", "match_mode": "exact" |
// "module-prefix", "denied": [...]}. Throws Error(kParseError | kIo).
Denylist DenylistFromJson(std::string_view json);
Denylist ReadDenylist(const std::filesystem::path& path);

struct ScanVerdict {
  bool flagged = false;
  std::vector<std::string> names;  // sorted matches
};

// Flags when any traced import or invocation matches the denylist.
ScanVerdict Scan(const TraceReport& report, const Denylist& denylist);
ScanVerdict Scan(const OpcodeStream& stream, const Denylist& denylist);

}  // namespace pickleward

#endif  // PICKLEWARD_TRACER_H_
