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

#ifndef PICKLEWARD_VALUE_GRAPH_H_
#define PICKLEWARD_VALUE_GRAPH_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

namespace pickleward {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xFFFFFFFFu;

enum class NodeKind : std::uint8_t {
  kNone,
  kBool,
  kInt,
  kFloat,
  kBytes,
  kString,
  kTuple,
  kList,
  kDict,
  kSet,
  kFrozenSet,
  kCallableRef,
  kOpaqueInstance,
  kPersistentRef,
  kStub,
};

std::string_view NodeKindName(NodeKind kind);

enum class Construction : std::uint8_t { kAllocated, kReduced };

struct DictData {
  std::vector<std::pair<NodeId, NodeId>> entries;  // insertion order
  std::unordered_map<std::uint32_t, std::uint32_t> index;  // key class -> entry
};

struct SetData {
  std::vector<NodeId> items;  // insertion order
  std::unordered_map<std::uint32_t, std::uint32_t> index;
};

struct InstanceData {
  std::string class_name;
  Construction construction = Construction::kAllocated;
  NodeId args = kNoNode;    // always a tuple
  NodeId kwargs = kNoNode;  // NEWOBJ_EX only
  NodeId state = kNoNode;
  bool state_owned = false;  // state is a dict this instance created
  std::vector<NodeId> items;
  std::vector<std::pair<NodeId, NodeId>> setitems;
  std::uint64_t origin_offset = 0;
};

struct CallableData {
  std::string name;
  NodeId attrs = kNoNode;  // dict installed by BUILD
  std::vector<std::string> tainted_names;
  std::uint64_t origin_offset = 0;
};

struct StubData {
  std::string requested_name;
  std::uint64_t origin_offset = 0;
  bool touched = false;
};

struct PersistentData {
  NodeId pid = kNoNode;
  std::uint64_t origin_offset = 0;
};

struct Node {
  NodeKind kind = NodeKind::kNone;
  // kBool: the value. kBytes: bytearray. kString: bytes that are not valid
  // UTF-8, kept raw. kInt: value lives in the decimal string.
  bool flag = false;
  // Creation order among instances, persistent refs and stubs.
  std::uint32_t seq = 0;
  std::variant<std::monostate, std::int64_t, double, std::string,
               std::vector<NodeId>, std::unique_ptr<DictData>,
               std::unique_ptr<SetData>, std::unique_ptr<InstanceData>,
               std::unique_ptr<CallableData>, std::unique_ptr<StubData>,
               std::unique_ptr<PersistentData>>
      data;
};

// Arena of nodes. Ids are indexes; nodes are never removed.
class ValueGraph {
 public:
  ValueGraph() = default;
  ValueGraph(ValueGraph&&) = default;
  ValueGraph& operator=(ValueGraph&&) = default;

  std::size_t size() const { return nodes_.size(); }
  const Node& at(NodeId id) const { return nodes_[id]; }
  Node& at(NodeId id) { return nodes_[id]; }
  NodeKind kind(NodeId id) const { return nodes_[id].kind; }

  NodeId AddNone();
  NodeId AddBool(bool value);
  NodeId AddInt(std::int64_t value);
  NodeId AddBigInt(std::string decimal);
  NodeId AddFloat(double value);
  NodeId AddBytes(std::string bytes, bool bytearray = false);
  NodeId AddString(std::string utf8, bool raw = false);
  NodeId AddTuple(std::vector<NodeId> items);
  NodeId AddList(std::vector<NodeId> items);
  NodeId AddDict();
  NodeId AddSet();
  // Elements must already be deduplicated by the caller.
  NodeId AddFrozenSet(std::vector<NodeId> items);
  NodeId AddCallable(std::string name, std::uint64_t offset);
  NodeId AddInstance(std::unique_ptr<InstanceData> data);
  NodeId AddPersistent(NodeId pid, std::uint64_t offset);
  NodeId AddStub(std::string name, std::uint64_t offset);

  // Typed views. Callers check kind() first.
  std::int64_t int_value(NodeId id) const;
  // Decimal text of an Int or Bool node.
  std::string int_decimal(NodeId id) const;
  double float_value(NodeId id) const;
  const std::string& text(NodeId id) const;  // Bytes, String
  const std::vector<NodeId>& items(NodeId id) const;  // Tuple, List, FrozenSet
  std::vector<NodeId>& mutable_items(NodeId id);
  DictData& dict(NodeId id);
  const DictData& dict(NodeId id) const;
  SetData& set(NodeId id);
  const SetData& set(NodeId id) const;
  InstanceData& instance(NodeId id);
  const InstanceData& instance(NodeId id) const;
  CallableData& callable(NodeId id);
  const CallableData& callable(NodeId id) const;
  StubData& stub(NodeId id);
  const StubData& stub(NodeId id) const;
  const PersistentData& persistent(NodeId id) const;

  // Equivalence class under Python hash equality (1 == 1.0 == True,
  // tuples by value, identity for instances). Classes are interned per
  // graph. nullopt for unhashable values (list, dict, set, bytearray, or a
  // tuple holding one).
  std::optional<std::uint32_t> HashClass(NodeId id);

  // Direct children in the order the canonical dump visits them, except
  // that set members are in insertion order.
  void Children(NodeId id, std::vector<NodeId>& out) const;

 private:
  NodeId Push(Node node);
  std::uint32_t Intern(std::string key);

  std::vector<Node> nodes_;
  std::uint32_t next_seq_ = 0;
  std::vector<std::uint32_t> hash_class_;  // 0 = not computed
  std::unordered_map<std::string, std::uint32_t> interned_;
};

}  // namespace pickleward

#endif  // PICKLEWARD_VALUE_GRAPH_H_
