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

#include <algorithm>
#include <unordered_map>

#include "json.hpp"
#include "pickle_text.h"
#include "pickleward/container.h"
#include "pickleward/error.h"

namespace pickleward {
namespace {

// Abstract values: literal text, an imported callable, or anything else.
struct Value {
  enum Kind : std::uint8_t { kOpaque, kStr, kCallable } kind = kOpaque;
  std::string text;
};

class Tracer {
 public:
  explicit Tracer(TraceReport& report) : report_(report) {}

  void Run(const Program& program) {
    stack_.clear();
    meta_.clear();
    memo_.clear();
    for (const Opcode& op : program) Step(op);
  }

 private:
  Value Pop() {
    if (stack_.empty()) return {};
    Value v = std::move(stack_.back());
    stack_.pop_back();
    return v;
  }

  void PopMark() {
    if (meta_.empty()) {
      stack_.clear();
      return;
    }
    stack_ = std::move(meta_.back());
    meta_.pop_back();
  }

  // The segment above the last MARK, which PopMark then discards.
  std::vector<Value> TakeMark() {
    std::vector<Value> items = std::move(stack_);
    stack_.clear();
    PopMark();
    return items;
  }

  void Push(Value v) { stack_.push_back(std::move(v)); }
  void PushOpaque() { stack_.emplace_back(); }
  void PushText(std::string text, bool ok) {
    if (ok) {
      Push(Value{Value::kStr, std::move(text)});
    } else {
      PushOpaque();
    }
  }

  void Import(std::string name) {
    report_.imports.insert(name);
    Push(Value{Value::kCallable, std::move(name)});
  }

  void Dynamic(const Opcode& op, std::string reason) {
    report_.dynamic.push_back(DynamicSite{std::string(Mnemonic(op.op)), op.offset, std::move(reason)});
  }

  void Call(const Opcode& op, const Value& callee, std::set<std::string>& into) {
    if (callee.kind == Value::kCallable) {
      into.insert(callee.text);
    } else {
      Dynamic(op, "callee is not an imported name");
    }
    PushOpaque();
  }

  void MemoPut(std::int64_t index) {
    memo_[index] = stack_.empty() ? Value{} : stack_.back();
  }

  void MemoGet(std::int64_t index) {
    auto it = memo_.find(index);
    Push(it == memo_.end() ? Value{} : it->second);
  }

  void Step(const Opcode& op) {
    switch (op.op) {
      case Op::kMark:
        meta_.push_back(std::move(stack_));
        stack_.clear();
        return;
      case Op::kStop:
        Pop();
        return;
      case Op::kPop:
        if (stack_.empty()) {
          PopMark();
        } else {
          stack_.pop_back();
        }
        return;
      case Op::kPopMark:
        PopMark();
        return;
      case Op::kDup:
        Push(stack_.empty() ? Value{} : stack_.back());
        return;
      case Op::kString: {
        auto v = text::DecodeQuotedString(op.text_arg());
        bool ok = v && text::IsAscii(*v);
        PushText(ok ? std::move(*v) : std::string(), ok);
        return;
      }
      case Op::kBinString:
      case Op::kShortBinString:
        PushText(op.text_arg(), text::IsAscii(op.text_arg()));
        return;
      case Op::kUnicode: {
        auto v = text::DecodeRawUnicodeEscape(op.text_arg());
        PushText(v ? std::move(*v) : std::string(), v.has_value());
        return;
      }
      case Op::kBinUnicode:
      case Op::kShortBinUnicode:
      case Op::kBinUnicode8:
        PushText(op.text_arg(), text::IsUtf8SurrogatePass(op.text_arg()));
        return;
      case Op::kFloat:
      case Op::kInt:
      case Op::kBinInt:
      case Op::kBinInt1:
      case Op::kBinInt2:
      case Op::kLong:
      case Op::kLong1:
      case Op::kLong4:
      case Op::kBinFloat:
      case Op::kNone:
      case Op::kNewTrue:
      case Op::kNewFalse:
      case Op::kPersId:
      case Op::kBinBytes:
      case Op::kShortBinBytes:
      case Op::kBinBytes8:
      case Op::kByteArray8:
      case Op::kNextBuffer:
      case Op::kEmptyTuple:
      case Op::kEmptyList:
      case Op::kEmptyDict:
      case Op::kEmptySet:
        PushOpaque();
        return;
      case Op::kBinPersId:
      case Op::kTuple1:
        Pop();
        PushOpaque();
        return;
      case Op::kTuple2:
        Pop();
        Pop();
        PushOpaque();
        return;
      case Op::kTuple3:
        Pop();
        Pop();
        Pop();
        PushOpaque();
        return;
      case Op::kTuple:
      case Op::kList:
      case Op::kDict:
      case Op::kFrozenSet:
        TakeMark();
        PushOpaque();
        return;
      case Op::kAppend:
      case Op::kBuild:
        Pop();
        return;
      case Op::kSetItem:
        Pop();
        Pop();
        return;
      case Op::kAppends:
      case Op::kSetItems:
      case Op::kAddItems:
        TakeMark();
        return;
      case Op::kReadOnlyBuffer:
      case Op::kProto:
      case Op::kFrame:
        return;
      case Op::kGlobal: {
        const std::string& s = op.text_arg();
        auto nl = s.find('\n');
        Import(s.substr(0, nl) + "." + s.substr(nl + 1));
        return;
      }
      case Op::kStackGlobal: {
        Value name = Pop();
        Value module = Pop();
        if (module.kind == Value::kStr && name.kind == Value::kStr) {
          Import(module.text + "." + name.text);
        } else {
          Dynamic(op, "operands are not literal strings");
          PushOpaque();
        }
        return;
      }
      case Op::kReduce: {
        Pop();
        Value callee = Pop();
        Call(op, callee, report_.invocations);
        return;
      }
      case Op::kNewObj: {
        Pop();
        Value cls = Pop();
        Call(op, cls, report_.allocations);
        return;
      }
      case Op::kNewObjEx: {
        Pop();
        Pop();
        Value cls = Pop();
        Call(op, cls, report_.allocations);
        return;
      }
      case Op::kInst: {
        Forbidden(op);
        TakeMark();
        const std::string& s = op.text_arg();
        auto nl = s.find('\n');
        std::string name = s.substr(0, nl) + "." + s.substr(nl + 1);
        report_.imports.insert(name);
        report_.invocations.insert(name);
        PushOpaque();
        return;
      }
      case Op::kObj: {
        Forbidden(op);
        std::vector<Value> items = TakeMark();
        Call(op, items.empty() ? Value{} : items.front(), report_.invocations);
        return;
      }
      case Op::kExt1:
      case Op::kExt2:
      case Op::kExt4:
        Forbidden(op);
        Dynamic(op, "extension registry code " + std::to_string(op.int_arg()));
        PushOpaque();
        return;
      case Op::kGet:
      case Op::kPut: {
        auto index = text::ParseDecimalIndex(op.text_arg());
        std::int64_t i = index.value_or(-1);
        op.op == Op::kGet ? MemoGet(i) : MemoPut(i);
        return;
      }
      case Op::kBinGet:
      case Op::kLongBinGet:
        MemoGet(op.int_arg());
        return;
      case Op::kBinPut:
      case Op::kLongBinPut:
        MemoPut(op.int_arg());
        return;
      case Op::kMemoize:
        MemoPut(static_cast<std::int64_t>(memo_.size()));
        return;
    }
  }

  void Forbidden(const Opcode& op) {
    report_.forbidden_opcodes.push_back(ForbiddenSite{std::string(Mnemonic(op.op)), op.offset});
  }

  TraceReport& report_;
  std::vector<Value> stack_;
  std::vector<std::vector<Value>> meta_;
  std::unordered_map<std::int64_t, Value> memo_;
};

void Section(std::string& out, const char* title, const std::set<std::string>& names) {
  out += title;
  out += names.empty() ? ": (none)\n" : ":\n";
  for (const auto& n : names) out += "  " + n + "\n";
}

}  // namespace

TraceReport Trace(const OpcodeStream& stream) {
  TraceReport report;
  Tracer tracer(report);
  tracer.Run(stream.opcodes);
  for (const auto& program : stream.trailing_programs) tracer.Run(program);
  report.has_trailing_programs = stream.has_trailing();
  return report;
}

std::string FormatTraceText(const TraceReport& report) {
  std::string out;
  Section(out, "imports", report.imports);
  Section(out, "invocations", report.invocations);
  Section(out, "allocations", report.allocations);
  out += "has_trailing_programs: ";
  out += report.has_trailing_programs ? "true\n" : "false\n";
  out += report.forbidden_opcodes.empty() ? "forbidden_opcodes: (none)\n" : "forbidden_opcodes:\n";
  for (const auto& f : report.forbidden_opcodes) {
    out += "  " + f.mnemonic + " at " + std::to_string(f.offset) + "\n";
  }
  out += report.dynamic.empty() ? "dynamic: (none)\n" : "dynamic:\n";
  for (const auto& d : report.dynamic) {
    out += "  " + d.mnemonic + " at " + std::to_string(d.offset) + ": " + d.reason + "\n";
  }
  return out;
}

std::string FormatTraceJson(const TraceReport& report, std::string_view source) {
  using nlohmann::json;
  json doc = json::object();
  doc["schema"] = kTraceSchema;
  if (!source.empty()) doc["source"] = std::string(source);
  doc["imports"] = report.imports;
  doc["invocations"] = report.invocations;
  doc["allocations"] = report.allocations;
  doc["has_trailing_programs"] = report.has_trailing_programs;
  json forbidden = json::array();
  for (const auto& f : report.forbidden_opcodes) {
    forbidden.push_back({{"mnemonic", f.mnemonic}, {"offset", f.offset}});
  }
  doc["forbidden_opcodes"] = forbidden;
  json dynamic = json::array();
  for (const auto& d : report.dynamic) {
    dynamic.push_back({{"mnemonic", d.mnemonic}, {"offset", d.offset}, {"reason", d.reason}});
  }
  doc["dynamic"] = dynamic;
  return doc.dump(2) + "\n";
}

Denylist::Denylist(std::set<std::string> denied, MatchMode mode)
    : denied_(std::move(denied)), mode_(mode) {
  if (denied_.empty()) throw Error(ErrorCode::kBadArgument, "denylist is empty");
}

Denylist Denylist::Default() {
  return Denylist(
      {"__builtin__.eval", "__builtin__.exec", "builtins.__import__", "builtins.compile",
       "builtins.eval", "builtins.exec", "builtins.open", "nt.system", "os.execv", "os.execve",
       "os.popen", "os.spawnl", "os.system", "posix.popen", "posix.system", "pty.spawn",
       "runpy._run_code", "subprocess.Popen", "subprocess.call", "subprocess.check_call",
       "subprocess.check_output", "subprocess.run"},
      MatchMode::kExact);
}

bool Denylist::Matches(std::string_view name) const {
  if (denied_.count(std::string(name))) return true;
  if (mode_ != MatchMode::kModulePrefix) return false;
  for (std::size_t dot = name.find('.'); dot != std::string_view::npos;
       dot = name.find('.', dot + 1)) {
    if (denied_.count(std::string(name.substr(0, dot)))) return true;
  }
  return false;
}

Denylist DenylistFromJson(std::string_view text) {
  using nlohmann::json;
  auto fail = [](const std::string& m) -> Error {
    return Error(ErrorCode::kParseError, "denylist: " + m);
  };
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw fail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string()) {
    throw fail("missing schema");
  }
  if (doc["schema"] != kDenylistSchema) {
    throw fail("unsupported schema version '" + doc["schema"].get<std::string>() + "'");
  }
  MatchMode mode = MatchMode::kExact;
  if (doc.contains("match_mode")) {
    if (doc["match_mode"] == "exact") {
      mode = MatchMode::kExact;
    } else if (doc["match_mode"] == "module-prefix") {
      mode = MatchMode::kModulePrefix;
    } else {
      throw fail("match_mode must be \"exact\" or \"module-prefix\"");
    }
  }
  std::set<std::string> denied;
  if (!doc.contains("denied") || !doc["denied"].is_array()) throw fail("denied must be an array");
  for (const auto& v : doc["denied"]) {
    if (!v.is_string()) throw fail("denied must hold strings");
    denied.insert(v.get<std::string>());
  }
  if (denied.empty()) throw fail("denied is empty");
  return Denylist(std::move(denied), mode);
}

Denylist ReadDenylist(const std::filesystem::path& path) {
  return DenylistFromJson(ReadFileBytes(path));
}

ScanVerdict Scan(const TraceReport& report, const Denylist& denylist) {
  std::set<std::string> hits;
  for (const auto* names : {&report.imports, &report.invocations}) {
    for (const auto& n : *names) {
      if (denylist.Matches(n)) hits.insert(n);
    }
  }
  return ScanVerdict{!hits.empty(), {hits.begin(), hits.end()}};
}

ScanVerdict Scan(const OpcodeStream& stream, const Denylist& denylist) {
  return Scan(Trace(stream), denylist);
}

}  // namespace pickleward
