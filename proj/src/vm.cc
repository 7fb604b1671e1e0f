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

#include "pickleward/vm.h"

#include <chrono>

#include "pickle_text.h"

namespace pickleward {

VmConfig VmConfig::Restricted(Policy policy) {
  return Restricted(std::make_shared<const Policy>(std::move(policy)));
}

VmConfig VmConfig::Restricted(std::shared_ptr<const Policy> policy) {
  VmConfig c;
  c.mode = VmMode::kRestricted;
  c.policy = std::move(policy);
  return c;
}

VmConfig VmConfig::Unrestricted() {
  VmConfig c;
  c.mode = VmMode::kUnrestricted;
  return c;
}

class Vm::Impl {
 public:
  explicit Impl(VmConfig config) : config_(std::move(config)) {
    restricted_ = config_.mode == VmMode::kRestricted;
    if (restricted_ && !config_.policy) {
      throw Error(ErrorCode::kBadArgument, "restricted mode requires a policy");
    }
  }

  VmOutcome Run(const OpcodeStream& stream) {
    auto start = std::chrono::steady_clock::now();
    VmOutcome outcome;
    outcome.root = RunProgram(stream.opcodes);
    for (const auto& program : stream.trailing_programs) RunProgram(program);
    outcome.graph = std::move(g_);
    outcome.trace = trace_;
    outcome.stats.opcodes = opcodes_;
    outcome.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return outcome;
  }

  const ExecutionTrace& trace() const { return trace_; }

 private:
  [[noreturn]] void Fail(ErrorCode code, const std::string& message,
                         std::string subject = {}) {
    if (subject.empty()) subject = std::string(Mnemonic(op_->op));
    throw Error(code, std::string(Mnemonic(op_->op)) + " at offset " +
                          std::to_string(op_->offset) + ": " + message,
                op_->offset, std::move(subject));
  }

  NodeId Pop() {
    if (stack_.empty()) Fail(ErrorCode::kStackUnderflow, "stack is empty");
    NodeId v = stack_.back();
    stack_.pop_back();
    return v;
  }

  NodeId Top() {
    if (stack_.empty()) Fail(ErrorCode::kStackUnderflow, "stack is empty");
    return stack_.back();
  }

  std::vector<NodeId> PopMark() {
    if (meta_.empty()) Fail(ErrorCode::kStackUnderflow, "no MARK to pop");
    std::vector<NodeId> items = std::move(stack_);
    stack_ = std::move(meta_.back());
    meta_.pop_back();
    return items;
  }

  void Push(NodeId id) { stack_.push_back(id); }

  std::uint32_t KeyClass(NodeId key) {
    auto cls = g_.HashClass(key);
    if (!cls) {
      Fail(ErrorCode::kUnhashableKey,
           "unhashable " + std::string(NodeKindName(g_.kind(key))) + " used as a key");
    }
    return *cls;
  }

  void DictSet(NodeId dict, NodeId key, NodeId value) {
    std::uint32_t cls = KeyClass(key);
    DictData& d = g_.dict(dict);
    auto [it, inserted] = d.index.emplace(cls, static_cast<std::uint32_t>(d.entries.size()));
    if (inserted) {
      d.entries.emplace_back(key, value);
    } else {
      d.entries[it->second].second = value;
    }
  }

  void SetAdd(NodeId set, NodeId item) {
    std::uint32_t cls = KeyClass(item);
    SetData& s = g_.set(set);
    if (s.index.emplace(cls, static_cast<std::uint32_t>(s.items.size())).second) {
      s.items.push_back(item);
    }
  }

  [[noreturn]] void StubUsed(NodeId stub, const char* how) {
    StubData& s = g_.stub(stub);
    s.touched = true;
    Fail(ErrorCode::kStubInvocation,
         std::string(how) + " disallowed callable '" + s.requested_name +
             "' imported at offset " + std::to_string(s.origin_offset),
         s.requested_name);
  }

  [[noreturn]] void BadTarget(NodeId target, const char* what) {
    Fail(ErrorCode::kInvalidTarget,
         std::string(what) + " on " + std::string(NodeKindName(g_.kind(target))));
  }

  std::string Text(NodeId id) {
    if (g_.kind(id) != NodeKind::kString || g_.at(id).flag) {
      Fail(ErrorCode::kBadArgument, "STACK_GLOBAL requires str operands");
    }
    return g_.text(id);
  }

  void Import(std::string name) {
    trace_.imports.push_back(TraceEvent{name, op_->offset});
    if (restricted_ && !config_.policy->AllowsImport(name)) {
      trace_.stubs.push_back(TraceEvent{name, op_->offset});
      Push(g_.AddStub(std::move(name), op_->offset));
    } else {
      Push(g_.AddCallable(std::move(name), op_->offset));
    }
  }

  // The callee of REDUCE or NEWOBJ after the policy checks.
  const std::string& CheckCallee(NodeId callee, bool invoke) {
    switch (g_.kind(callee)) {
      case NodeKind::kStub:
        StubUsed(callee, invoke ? "invocation of" : "allocation of");
      case NodeKind::kCallableRef: {
        const std::string& name = g_.callable(callee).name;
        if (restricted_) {
          bool ok = invoke ? config_.policy->AllowsInvocation(name)
                           : config_.policy->AllowsImport(name);
          if (!ok) {
            Fail(ErrorCode::kInvocationDenied,
                 "policy does not allow " + std::string(invoke ? "invoking" : "allocating") +
                     " '" + name + "'",
                 name);
          }
        }
        return name;
      }
      default: {
        std::string kind(NodeKindName(g_.kind(callee)));
        if (restricted_) {
          Fail(ErrorCode::kInvocationDenied, "callee is a computed " + kind + ", not an import",
               "<" + kind + ">");
        }
        Fail(ErrorCode::kNotCallable, kind + " is not callable", "<" + kind + ">");
      }
    }
  }

  void Construct(NodeId callee, NodeId args, NodeId kwargs, bool invoke) {
    const std::string& name = CheckCallee(callee, invoke);
    if (g_.kind(args) != NodeKind::kTuple) {
      Fail(ErrorCode::kBadArgument, "arguments must be a tuple", name);
    }
    if (kwargs != kNoNode && g_.kind(kwargs) != NodeKind::kDict) {
      Fail(ErrorCode::kBadArgument, "keyword arguments must be a dict", name);
    }
    auto inst = std::make_unique<InstanceData>();
    inst->class_name = name;
    inst->construction = invoke ? Construction::kReduced : Construction::kAllocated;
    inst->args = args;
    inst->kwargs = kwargs;
    inst->origin_offset = op_->offset;
    (invoke ? trace_.invocations : trace_.allocations).push_back(TraceEvent{name, op_->offset});
    Push(g_.AddInstance(std::move(inst)));
  }

  void BuildCallable(NodeId target, NodeId state) {
    std::vector<NodeId> parts{state};
    if (g_.kind(state) == NodeKind::kTuple && g_.items(state).size() == 2) {
      parts = g_.items(state);
    }
    for (NodeId part : parts) {
      if (g_.kind(part) == NodeKind::kNone) continue;
      if (g_.kind(part) != NodeKind::kDict) {
        Fail(ErrorCode::kBadArgument, "state for a callable must be a dict");
      }
      if (g_.callable(target).attrs == kNoNode) {
        NodeId attrs = g_.AddDict();
        g_.callable(target).attrs = attrs;
      }
      std::vector<std::pair<NodeId, NodeId>> entries = g_.dict(part).entries;
      for (const auto& [k, v] : entries) {
        if (restricted_ && g_.kind(k) == NodeKind::kString) {
          const std::string& key = g_.text(k);
          if (key == "__name__" || key == "__module__") {
            CallableData& c = g_.callable(target);
            c.tainted_names.push_back(key);
            trace_.tainted_builds.push_back(TaintedBuild{c.name, key, op_->offset});
            continue;
          }
        }
        DictSet(g_.callable(target).attrs, k, v);
      }
    }
  }

  void Build() {
    NodeId state = Pop();
    NodeId target = Top();
    switch (g_.kind(target)) {
      case NodeKind::kStub:
        StubUsed(target, "BUILD on");
      case NodeKind::kOpaqueInstance: {
        InstanceData& inst = g_.instance(target);
        if (g_.kind(state) != NodeKind::kDict) {
          inst.state = state;
          inst.state_owned = false;
          return;
        }
        if (inst.state == kNoNode || !inst.state_owned) {
          NodeId copy = g_.AddDict();
          DictData& dst = g_.dict(copy);
          const DictData& src = g_.dict(state);
          dst.entries = src.entries;
          dst.index = src.index;
          InstanceData& again = g_.instance(target);
          again.state = copy;
          again.state_owned = true;
          return;
        }
        NodeId own = inst.state;
        std::vector<std::pair<NodeId, NodeId>> entries = g_.dict(state).entries;
        for (const auto& [k, v] : entries) DictSet(own, k, v);
        return;
      }
      case NodeKind::kCallableRef:
        BuildCallable(target, state);
        return;
      default:
        BadTarget(target, "BUILD");
    }
  }

  void Append(NodeId target, const std::vector<NodeId>& values) {
    switch (g_.kind(target)) {
      case NodeKind::kList: {
        auto& items = g_.mutable_items(target);
        items.insert(items.end(), values.begin(), values.end());
        return;
      }
      case NodeKind::kOpaqueInstance: {
        auto& items = g_.instance(target).items;
        items.insert(items.end(), values.begin(), values.end());
        return;
      }
      case NodeKind::kStub:
        StubUsed(target, "APPEND to");
      default:
        BadTarget(target, "APPEND");
    }
  }

  void SetItems(NodeId target, const std::vector<NodeId>& kv) {
    if (kv.size() % 2 != 0) Fail(ErrorCode::kBadArgument, "odd number of items");
    switch (g_.kind(target)) {
      case NodeKind::kDict:
        for (std::size_t i = 0; i < kv.size(); i += 2) DictSet(target, kv[i], kv[i + 1]);
        return;
      case NodeKind::kOpaqueInstance: {
        auto& setitems = g_.instance(target).setitems;
        for (std::size_t i = 0; i < kv.size(); i += 2) setitems.emplace_back(kv[i], kv[i + 1]);
        return;
      }
      case NodeKind::kStub:
        StubUsed(target, "SETITEM on");
      default:
        BadTarget(target, "SETITEM");
    }
  }

  void AddItems(NodeId target, const std::vector<NodeId>& items) {
    switch (g_.kind(target)) {
      case NodeKind::kSet:
        for (NodeId item : items) SetAdd(target, item);
        return;
      case NodeKind::kOpaqueInstance: {
        auto& dst = g_.instance(target).items;
        dst.insert(dst.end(), items.begin(), items.end());
        return;
      }
      case NodeKind::kStub:
        StubUsed(target, "ADDITEMS on");
      default:
        BadTarget(target, "ADDITEMS");
    }
  }

  void MemoPut(std::int64_t index) {
    if (index < 0) Fail(ErrorCode::kBadArgument, "negative memo index");
    NodeId top = Top();
    auto [it, inserted] = memo_.insert_or_assign(index, top);
    if (inserted && memo_.size() > config_.max_memo) {
      Fail(ErrorCode::kMemoExceeded,
           "memo holds more than " + std::to_string(config_.max_memo) + " entries");
    }
  }

  void MemoGet(std::int64_t index) {
    auto it = memo_.find(index);
    if (it == memo_.end()) {
      Fail(ErrorCode::kMemoMiss, "memo has no entry " + std::to_string(index));
    }
    Push(it->second);
  }

  NodeId PushInt(const text::IntValue& v) {
    NodeId id = v.big ? g_.AddBigInt(v.decimal) : g_.AddInt(v.small);
    Push(id);
    return id;
  }

  void PushText(const std::string& bytes, bool ascii_only) {
    bool ok = ascii_only ? text::IsAscii(bytes) : text::IsUtf8SurrogatePass(bytes);
    Push(g_.AddString(bytes, !ok));
  }

  NodeId RunProgram(const Program& program) {
    stack_.clear();
    meta_.clear();
    memo_.clear();
    for (const Opcode& op : program) {
      op_ = &op;
      ++opcodes_;
      Step(op);
      if (op.op == Op::kStop) return stop_value_;
    }
    return stop_value_;
  }

  void Step(const Opcode& op) {
    switch (op.op) {
      case Op::kMark:
        if (meta_.size() >= config_.max_depth) {
          Fail(ErrorCode::kDepthExceeded,
               "more than " + std::to_string(config_.max_depth) + " nested MARKs");
        }
        meta_.push_back(std::move(stack_));
        stack_.clear();
        return;
      case Op::kStop:
        stop_value_ = Pop();
        return;
      case Op::kPop:
        if (!stack_.empty()) {
          stack_.pop_back();
        } else {
          PopMark();
        }
        return;
      case Op::kPopMark:
        PopMark();
        return;
      case Op::kDup:
        Push(Top());
        return;
      case Op::kFloat: {
        auto v = text::ParseFloatLiteral(op.text_arg());
        if (!v) Fail(ErrorCode::kBadArgument, "malformed float literal");
        Push(g_.AddFloat(*v));
        return;
      }
      case Op::kInt: {
        const std::string& s = op.text_arg();
        if (s == "00" || s == "01") {
          Push(g_.AddBool(s == "01"));
          return;
        }
        auto v = text::ParseIntLiteral(s);
        if (!v) Fail(ErrorCode::kBadArgument, "malformed int literal");
        PushInt(*v);
        return;
      }
      case Op::kLong: {
        std::string_view s = op.text_arg();
        if (!s.empty() && s.back() == 'L') s.remove_suffix(1);
        auto v = text::ParseIntLiteral(s);
        if (!v) Fail(ErrorCode::kBadArgument, "malformed long literal");
        PushInt(*v);
        return;
      }
      case Op::kBinInt:
      case Op::kBinInt1:
      case Op::kBinInt2:
        Push(g_.AddInt(op.int_arg()));
        return;
      case Op::kLong1:
      case Op::kLong4:
        PushInt(text::LongFromBytes(op.text_arg()));
        return;
      case Op::kBinFloat:
        Push(g_.AddFloat(op.float_arg()));
        return;
      case Op::kNone:
        Push(g_.AddNone());
        return;
      case Op::kNewTrue:
      case Op::kNewFalse:
        Push(g_.AddBool(op.op == Op::kNewTrue));
        return;
      case Op::kPersId: {
        if (!text::IsAscii(op.text_arg())) {
          Fail(ErrorCode::kBadArgument, "persistent id is not ASCII");
        }
        NodeId pid = g_.AddString(op.text_arg());
        Push(g_.AddPersistent(pid, op.offset));
        return;
      }
      case Op::kBinPersId: {
        NodeId pid = Pop();
        Push(g_.AddPersistent(pid, op.offset));
        return;
      }
      case Op::kString: {
        auto v = text::DecodeQuotedString(op.text_arg());
        if (!v) Fail(ErrorCode::kBadArgument, "malformed STRING argument");
        PushText(*v, true);
        return;
      }
      case Op::kBinString:
      case Op::kShortBinString:
        PushText(op.text_arg(), true);
        return;
      case Op::kUnicode: {
        auto v = text::DecodeRawUnicodeEscape(op.text_arg());
        if (!v) Fail(ErrorCode::kBadArgument, "malformed UNICODE argument");
        Push(g_.AddString(std::move(*v)));
        return;
      }
      case Op::kBinUnicode:
      case Op::kShortBinUnicode:
      case Op::kBinUnicode8:
        PushText(op.text_arg(), false);
        return;
      case Op::kBinBytes:
      case Op::kShortBinBytes:
      case Op::kBinBytes8:
        Push(g_.AddBytes(op.text_arg()));
        return;
      case Op::kByteArray8:
        Push(g_.AddBytes(op.text_arg(), true));
        return;
      case Op::kNextBuffer:
        Fail(ErrorCode::kBadArgument, "out-of-band buffers are not supported");
      case Op::kReadOnlyBuffer:
        Top();
        return;
      case Op::kEmptyTuple:
        Push(g_.AddTuple({}));
        return;
      case Op::kTuple1: {
        NodeId a = Pop();
        Push(g_.AddTuple({a}));
        return;
      }
      case Op::kTuple2: {
        NodeId b = Pop();
        NodeId a = Pop();
        Push(g_.AddTuple({a, b}));
        return;
      }
      case Op::kTuple3: {
        NodeId c = Pop();
        NodeId b = Pop();
        NodeId a = Pop();
        Push(g_.AddTuple({a, b, c}));
        return;
      }
      case Op::kTuple:
        Push(g_.AddTuple(PopMark()));
        return;
      case Op::kEmptyList:
        Push(g_.AddList({}));
        return;
      case Op::kList:
        Push(g_.AddList(PopMark()));
        return;
      case Op::kEmptyDict:
        Push(g_.AddDict());
        return;
      case Op::kDict: {
        std::vector<NodeId> kv = PopMark();
        if (kv.size() % 2 != 0) Fail(ErrorCode::kBadArgument, "odd number of items");
        NodeId d = g_.AddDict();
        for (std::size_t i = 0; i < kv.size(); i += 2) DictSet(d, kv[i], kv[i + 1]);
        Push(d);
        return;
      }
      case Op::kEmptySet:
        Push(g_.AddSet());
        return;
      case Op::kFrozenSet: {
        std::vector<NodeId> items = PopMark();
        std::vector<NodeId> unique;
        std::unordered_map<std::uint32_t, bool> seen;
        for (NodeId item : items) {
          if (seen.emplace(KeyClass(item), true).second) unique.push_back(item);
        }
        Push(g_.AddFrozenSet(std::move(unique)));
        return;
      }
      case Op::kAppend: {
        NodeId value = Pop();
        Append(Top(), {value});
        return;
      }
      case Op::kAppends: {
        std::vector<NodeId> values = PopMark();
        Append(Top(), values);
        return;
      }
      case Op::kSetItem: {
        NodeId value = Pop();
        NodeId key = Pop();
        SetItems(Top(), {key, value});
        return;
      }
      case Op::kSetItems: {
        std::vector<NodeId> kv = PopMark();
        SetItems(Top(), kv);
        return;
      }
      case Op::kAddItems: {
        std::vector<NodeId> items = PopMark();
        AddItems(Top(), items);
        return;
      }
      case Op::kBuild:
        Build();
        return;
      case Op::kGlobal: {
        const std::string& s = op.text_arg();
        auto nl = s.find('\n');
        Import(s.substr(0, nl) + "." + s.substr(nl + 1));
        return;
      }
      case Op::kStackGlobal: {
        NodeId name = Pop();
        NodeId module = Pop();
        std::string m = Text(module);
        Import(m + "." + Text(name));
        return;
      }
      case Op::kReduce: {
        NodeId args = Pop();
        NodeId callee = Pop();
        Construct(callee, args, kNoNode, true);
        return;
      }
      case Op::kNewObj: {
        NodeId args = Pop();
        NodeId cls = Pop();
        Construct(cls, args, kNoNode, false);
        return;
      }
      case Op::kNewObjEx: {
        NodeId kwargs = Pop();
        NodeId args = Pop();
        NodeId cls = Pop();
        Construct(cls, args, kwargs, false);
        return;
      }
      case Op::kGet:
      case Op::kPut: {
        auto index = text::ParseDecimalIndex(op.text_arg());
        if (!index) Fail(ErrorCode::kBadArgument, "malformed memo index");
        op.op == Op::kGet ? MemoGet(*index) : MemoPut(*index);
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
      case Op::kProto:
      case Op::kFrame:
        return;
      case Op::kInst:
      case Op::kObj:
      case Op::kExt1:
      case Op::kExt2:
      case Op::kExt4:
        Fail(ErrorCode::kForbiddenOpcode, "opcode is not supported by this loader");
    }
    Fail(ErrorCode::kUnknownOpcode, "unhandled opcode");
  }

  VmConfig config_;
  bool restricted_ = true;
  ValueGraph g_;
  ExecutionTrace trace_;
  std::vector<NodeId> stack_;
  std::vector<std::vector<NodeId>> meta_;
  std::unordered_map<std::int64_t, NodeId> memo_;
  const Opcode* op_ = nullptr;
  NodeId stop_value_ = kNoNode;
  std::uint64_t opcodes_ = 0;
};

Vm::Vm(VmConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}
Vm::~Vm() = default;

VmOutcome Vm::Run(const OpcodeStream& stream) { return impl_->Run(stream); }

const ExecutionTrace& Vm::trace() const { return impl_->trace(); }

VmOutcome Execute(const OpcodeStream& stream, const VmConfig& config) {
  return Vm(config).Run(stream);
}

namespace {

std::string DescribeStubs(const std::vector<StubEntry>& stubs) {
  std::string msg = std::to_string(stubs.size()) + " stub(s) in the loaded graph:";
  for (const auto& s : stubs) {
    msg += " " + s.name + " at " + (s.path.empty() ? "<root>" : s.path) + ";";
  }
  return msg;
}

}  // namespace

StubsPresentError::StubsPresentError(std::vector<StubEntry> stubs)
    : Error(ErrorCode::kStubsPresent, DescribeStubs(stubs), std::nullopt,
            stubs.empty() ? "" : stubs.front().name),
      stubs_(std::move(stubs)) {}

void AssertNoStubs(const VmOutcome& outcome) {
  auto stubs = ListStubs(outcome.graph, outcome.root);
  if (!stubs.empty()) throw StubsPresentError(std::move(stubs));
}

}  // namespace pickleward
