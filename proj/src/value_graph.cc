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

#include "pickleward/value_graph.h"

#include <algorithm>
#include <cmath>

#include "pickle_text.h"

namespace pickleward {

std::string_view NodeKindName(NodeKind kind) {
  switch (kind) {
    case NodeKind::kNone: return "None";
    case NodeKind::kBool: return "Bool";
    case NodeKind::kInt: return "Int";
    case NodeKind::kFloat: return "Float";
    case NodeKind::kBytes: return "Bytes";
    case NodeKind::kString: return "String";
    case NodeKind::kTuple: return "Tuple";
    case NodeKind::kList: return "List";
    case NodeKind::kDict: return "Dict";
    case NodeKind::kSet: return "Set";
    case NodeKind::kFrozenSet: return "FrozenSet";
    case NodeKind::kCallableRef: return "CallableRef";
    case NodeKind::kOpaqueInstance: return "OpaqueInstance";
    case NodeKind::kPersistentRef: return "PersistentRef";
    case NodeKind::kStub: return "Stub";
  }
  return "";
}

NodeId ValueGraph::Push(Node node) {
  nodes_.push_back(std::move(node));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId ValueGraph::AddNone() { return Push(Node{NodeKind::kNone}); }

NodeId ValueGraph::AddBool(bool value) {
  Node n{NodeKind::kBool};
  n.flag = value;
  return Push(std::move(n));
}

NodeId ValueGraph::AddInt(std::int64_t value) {
  Node n{NodeKind::kInt};
  n.data = value;
  return Push(std::move(n));
}

NodeId ValueGraph::AddBigInt(std::string decimal) {
  Node n{NodeKind::kInt};
  n.flag = true;
  n.data = std::move(decimal);
  return Push(std::move(n));
}

NodeId ValueGraph::AddFloat(double value) {
  Node n{NodeKind::kFloat};
  n.data = value;
  return Push(std::move(n));
}

NodeId ValueGraph::AddBytes(std::string bytes, bool bytearray) {
  Node n{NodeKind::kBytes};
  n.flag = bytearray;
  n.data = std::move(bytes);
  return Push(std::move(n));
}

NodeId ValueGraph::AddString(std::string utf8, bool raw) {
  Node n{NodeKind::kString};
  n.flag = raw;
  n.data = std::move(utf8);
  return Push(std::move(n));
}

NodeId ValueGraph::AddTuple(std::vector<NodeId> items) {
  Node n{NodeKind::kTuple};
  n.data = std::move(items);
  return Push(std::move(n));
}

NodeId ValueGraph::AddList(std::vector<NodeId> items) {
  Node n{NodeKind::kList};
  n.data = std::move(items);
  return Push(std::move(n));
}

NodeId ValueGraph::AddDict() {
  Node n{NodeKind::kDict};
  n.data = std::make_unique<DictData>();
  return Push(std::move(n));
}

NodeId ValueGraph::AddSet() {
  Node n{NodeKind::kSet};
  n.data = std::make_unique<SetData>();
  return Push(std::move(n));
}

NodeId ValueGraph::AddFrozenSet(std::vector<NodeId> items) {
  Node n{NodeKind::kFrozenSet};
  n.data = std::move(items);
  return Push(std::move(n));
}

NodeId ValueGraph::AddCallable(std::string name, std::uint64_t offset) {
  Node n{NodeKind::kCallableRef};
  auto data = std::make_unique<CallableData>();
  data->name = std::move(name);
  data->origin_offset = offset;
  n.data = std::move(data);
  return Push(std::move(n));
}

NodeId ValueGraph::AddInstance(std::unique_ptr<InstanceData> data) {
  Node n{NodeKind::kOpaqueInstance};
  n.seq = next_seq_++;
  n.data = std::move(data);
  return Push(std::move(n));
}

NodeId ValueGraph::AddPersistent(NodeId pid, std::uint64_t offset) {
  Node n{NodeKind::kPersistentRef};
  n.seq = next_seq_++;
  n.data = std::make_unique<PersistentData>(PersistentData{pid, offset});
  return Push(std::move(n));
}

NodeId ValueGraph::AddStub(std::string name, std::uint64_t offset) {
  Node n{NodeKind::kStub};
  n.seq = next_seq_++;
  auto data = std::make_unique<StubData>();
  data->requested_name = std::move(name);
  data->origin_offset = offset;
  n.data = std::move(data);
  return Push(std::move(n));
}

std::int64_t ValueGraph::int_value(NodeId id) const {
  return std::get<std::int64_t>(nodes_[id].data);
}

std::string ValueGraph::int_decimal(NodeId id) const {
  const Node& n = nodes_[id];
  if (n.kind == NodeKind::kBool) return n.flag ? "1" : "0";
  if (n.flag) return std::get<std::string>(n.data);
  return std::to_string(std::get<std::int64_t>(n.data));
}

double ValueGraph::float_value(NodeId id) const { return std::get<double>(nodes_[id].data); }

const std::string& ValueGraph::text(NodeId id) const {
  return std::get<std::string>(nodes_[id].data);
}

const std::vector<NodeId>& ValueGraph::items(NodeId id) const {
  return std::get<std::vector<NodeId>>(nodes_[id].data);
}

std::vector<NodeId>& ValueGraph::mutable_items(NodeId id) {
  return std::get<std::vector<NodeId>>(nodes_[id].data);
}

DictData& ValueGraph::dict(NodeId id) {
  return *std::get<std::unique_ptr<DictData>>(nodes_[id].data);
}
const DictData& ValueGraph::dict(NodeId id) const {
  return *std::get<std::unique_ptr<DictData>>(nodes_[id].data);
}
SetData& ValueGraph::set(NodeId id) {
  return *std::get<std::unique_ptr<SetData>>(nodes_[id].data);
}
const SetData& ValueGraph::set(NodeId id) const {
  return *std::get<std::unique_ptr<SetData>>(nodes_[id].data);
}
InstanceData& ValueGraph::instance(NodeId id) {
  return *std::get<std::unique_ptr<InstanceData>>(nodes_[id].data);
}
const InstanceData& ValueGraph::instance(NodeId id) const {
  return *std::get<std::unique_ptr<InstanceData>>(nodes_[id].data);
}
CallableData& ValueGraph::callable(NodeId id) {
  return *std::get<std::unique_ptr<CallableData>>(nodes_[id].data);
}
const CallableData& ValueGraph::callable(NodeId id) const {
  return *std::get<std::unique_ptr<CallableData>>(nodes_[id].data);
}
StubData& ValueGraph::stub(NodeId id) {
  return *std::get<std::unique_ptr<StubData>>(nodes_[id].data);
}
const StubData& ValueGraph::stub(NodeId id) const {
  return *std::get<std::unique_ptr<StubData>>(nodes_[id].data);
}
const PersistentData& ValueGraph::persistent(NodeId id) const {
  return *std::get<std::unique_ptr<PersistentData>>(nodes_[id].data);
}

std::uint32_t ValueGraph::Intern(std::string key) {
  auto [it, inserted] =
      interned_.emplace(std::move(key), static_cast<std::uint32_t>(interned_.size() + 1));
  return it->second;
}

std::optional<std::uint32_t> ValueGraph::HashClass(NodeId root) {
  if (hash_class_.size() < nodes_.size()) hash_class_.resize(nodes_.size(), 0);
  if (hash_class_[root] != 0) return hash_class_[root];
  std::vector<std::pair<NodeId, bool>> work{{root, false}};
  while (!work.empty()) {
    auto [id, expanded] = work.back();
    work.pop_back();
    if (hash_class_[id] != 0) continue;
    const Node& n = nodes_[id];
    std::string key;
    switch (n.kind) {
      case NodeKind::kNone:
        key = "N";
        break;
      case NodeKind::kBool:
      case NodeKind::kInt:
        key = "I" + int_decimal(id);
        break;
      case NodeKind::kFloat: {
        double v = float_value(id);
        if (std::isnan(v)) {
          key = "#" + std::to_string(id);
        } else if (std::isfinite(v) && v == std::trunc(v)) {
          key = "I" + text::IntegralDoubleToDecimal(v);
        } else {
          key = "F" + text::FloatRepr(v);
        }
        break;
      }
      case NodeKind::kBytes:
        if (n.flag) return std::nullopt;
        key = "B" + text(id);
        break;
      case NodeKind::kString:
        key = (n.flag ? "R" : "S") + text(id);
        break;
      case NodeKind::kTuple:
      case NodeKind::kFrozenSet: {
        const auto& children = items(id);
        if (!expanded) {
          work.emplace_back(id, true);
          for (auto it = children.rbegin(); it != children.rend(); ++it) {
            if (hash_class_[*it] == 0) work.emplace_back(*it, false);
          }
          continue;
        }
        std::vector<std::uint32_t> classes;
        classes.reserve(children.size());
        for (NodeId c : children) {
          if (hash_class_[c] == 0) return std::nullopt;
          classes.push_back(hash_class_[c]);
        }
        if (n.kind == NodeKind::kFrozenSet) {
          std::sort(classes.begin(), classes.end());
          classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
        }
        key = n.kind == NodeKind::kTuple ? "T" : "Z";
        for (auto c : classes) {
          key += std::to_string(c);
          key.push_back(',');
        }
        break;
      }
      case NodeKind::kCallableRef:
        key = "C" + callable(id).name;
        break;
      case NodeKind::kOpaqueInstance:
      case NodeKind::kPersistentRef:
      case NodeKind::kStub:
        key = "#" + std::to_string(id);
        break;
      case NodeKind::kList:
      case NodeKind::kDict:
      case NodeKind::kSet:
        return std::nullopt;
    }
    hash_class_[id] = Intern(std::move(key));
  }
  return hash_class_[root];
}

void ValueGraph::Children(NodeId id, std::vector<NodeId>& out) const {
  const Node& n = nodes_[id];
  switch (n.kind) {
    case NodeKind::kTuple:
    case NodeKind::kList:
    case NodeKind::kFrozenSet: {
      const auto& v = items(id);
      out.insert(out.end(), v.begin(), v.end());
      return;
    }
    case NodeKind::kDict:
      for (const auto& [k, v] : dict(id).entries) {
        out.push_back(k);
        out.push_back(v);
      }
      return;
    case NodeKind::kSet: {
      const auto& v = set(id).items;
      out.insert(out.end(), v.begin(), v.end());
      return;
    }
    case NodeKind::kCallableRef:
      if (callable(id).attrs != kNoNode) out.push_back(callable(id).attrs);
      return;
    case NodeKind::kOpaqueInstance: {
      const auto& inst = instance(id);
      out.push_back(inst.args);
      if (inst.kwargs != kNoNode) out.push_back(inst.kwargs);
      if (inst.state != kNoNode) out.push_back(inst.state);
      out.insert(out.end(), inst.items.begin(), inst.items.end());
      for (const auto& [k, v] : inst.setitems) {
        out.push_back(k);
        out.push_back(v);
      }
      return;
    }
    case NodeKind::kPersistentRef:
      out.push_back(persistent(id).pid);
      return;
    default:
      return;
  }
}

}  // namespace pickleward
