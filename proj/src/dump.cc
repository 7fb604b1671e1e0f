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

#include "pickleward/dump.h"

#include <algorithm>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include "pickle_text.h"

namespace pickleward {
namespace {

bool Labelable(const ValueGraph& g, NodeId id) {
  switch (g.kind(id)) {
    case NodeKind::kList:
    case NodeKind::kDict:
    case NodeKind::kSet:
    case NodeKind::kOpaqueInstance:
    case NodeKind::kPersistentRef:
    case NodeKind::kStub:
      return true;
    case NodeKind::kBytes:
      return g.at(id).flag;
    default:
      return false;
  }
}

// Appends the rendering of a scalar; false when `id` is not a scalar.
bool AppendScalar(const ValueGraph& g, NodeId id, std::string& out) {
  const Node& n = g.at(id);
  switch (n.kind) {
    case NodeKind::kNone:
      out += "null";
      return true;
    case NodeKind::kBool:
      out += n.flag ? "true" : "false";
      return true;
    case NodeKind::kInt:
      out += g.int_decimal(id);
      return true;
    case NodeKind::kFloat:
      out += text::FloatRepr(g.float_value(id));
      return true;
    case NodeKind::kString:
      if (n.flag) {
        out += "[\"str-raw\",\"" + text::HexLower(g.text(id)) + "\"]";
      } else {
        text::AppendJsonString(g.text(id), out);
      }
      return true;
    case NodeKind::kBytes:
      if (n.flag) return false;
      out += "[\"bytes\",\"" + text::HexLower(g.text(id)) + "\"]";
      return true;
    default:
      return false;
  }
}

class SortKeys {
 public:
  explicit SortKeys(const ValueGraph& g) : g_(g) {}

  const std::string& Get(NodeId root) {
    if (auto it = done_.find(root); it != done_.end()) return it->second;
    std::vector<std::pair<NodeId, bool>> work{{root, false}};
    std::vector<NodeId> kids;
    while (!work.empty()) {
      auto [id, expanded] = work.back();
      work.pop_back();
      if (done_.count(id)) continue;
      if (!expanded) {
        std::string leaf;
        if (Leaf(id, leaf)) {
          done_.emplace(id, std::move(leaf));
          continue;
        }
        if (!active_.insert(id).second) continue;
        work.emplace_back(id, true);
        kids.clear();
        g_.Children(id, kids);
        for (NodeId k : kids) {
          if (!done_.count(k) && !active_.count(k)) work.emplace_back(k, false);
        }
        continue;
      }
      done_.emplace(id, Assemble(id));
      active_.erase(id);
    }
    return done_.at(root);
  }

 private:
  bool Leaf(NodeId id, std::string& out) {
    if (AppendScalar(g_, id, out)) return true;
    const Node& n = g_.at(id);
    switch (n.kind) {
      case NodeKind::kOpaqueInstance:
        out = "[\"object\"," + std::to_string(n.seq) + "]";
        return true;
      case NodeKind::kPersistentRef:
        out = "[\"persid\"," + std::to_string(n.seq) + "]";
        return true;
      case NodeKind::kStub:
        out = "[\"stub\"," + std::to_string(n.seq) + "]";
        return true;
      case NodeKind::kBytes:
        out = "[\"bytearray\",\"" + text::HexLower(g_.text(id)) + "\"]";
        return true;
      case NodeKind::kCallableRef:
        if (g_.callable(id).attrs == kNoNode) {
          out = "[\"callable\",";
          text::AppendJsonString(g_.callable(id).name, out);
          out += "]";
          return true;
        }
        return false;
      default:
        return false;
    }
  }

  const std::string& Child(NodeId id) {
    static const std::string kCycle = "[\"cycle\"]";
    auto it = done_.find(id);
    return it == done_.end() ? kCycle : it->second;
  }

  std::string Joined(const std::vector<NodeId>& ids, bool sorted) {
    std::vector<const std::string*> keys;
    for (NodeId c : ids) keys.push_back(&Child(c));
    if (sorted) {
      std::stable_sort(keys.begin(), keys.end(),
                       [](const std::string* a, const std::string* b) { return *a < *b; });
    }
    std::string out;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      if (i) out.push_back(',');
      out += *keys[i];
    }
    return out;
  }

  std::string Entries(const std::vector<std::pair<NodeId, NodeId>>& entries) {
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i) out.push_back(',');
      out += "[" + Child(entries[i].first) + "," + Child(entries[i].second) + "]";
    }
    return out;
  }

  std::string Assemble(NodeId id) {
    switch (g_.kind(id)) {
      case NodeKind::kTuple:
        return "[\"tuple\",[" + Joined(g_.items(id), false) + "]]";
      case NodeKind::kList:
        return "[\"list\",[" + Joined(g_.items(id), false) + "]]";
      case NodeKind::kFrozenSet:
        return "[\"frozenset\",[" + Joined(g_.items(id), true) + "]]";
      case NodeKind::kSet:
        return "[\"set\",[" + Joined(g_.set(id).items, true) + "]]";
      case NodeKind::kDict:
        return "[\"dict\",[" + Entries(g_.dict(id).entries) + "]]";
      case NodeKind::kCallableRef: {
        std::string out = "[\"callable\",";
        text::AppendJsonString(g_.callable(id).name, out);
        return out + "," + Child(g_.callable(id).attrs) + "]";
      }
      default:
        return "null";
    }
  }

  const ValueGraph& g_;
  std::unordered_map<NodeId, std::string> done_;
  std::unordered_set<NodeId> active_;
};

std::vector<NodeId> SortedMembers(const ValueGraph& g, NodeId id, SortKeys& keys) {
  std::vector<NodeId> members =
      g.kind(id) == NodeKind::kSet ? g.set(id).items : g.items(id);
  std::stable_sort(members.begin(), members.end(),
                   [&keys](NodeId a, NodeId b) { return keys.Get(a) < keys.Get(b); });
  return members;
}

class Dumper {
 public:
  explicit Dumper(const ValueGraph& g)
      : g_(g), count_(g.size(), 0), revisits_(g.size(), 0), keys_(g) {}

  std::string Run(NodeId root) {
    CountReferences(root);
    out_ = kDumpHeader;
    out_.push_back('\n');
    tasks_.push_back(Task{root, {}});
    while (!tasks_.empty()) {
      Task t = tasks_.back();
      tasks_.pop_back();
      if (t.node == kNoNode) {
        out_ += t.literal;
      } else {
        Render(t.node);
      }
    }
    out_.push_back('\n');
    return std::move(out_);
  }

 private:
  struct Task {
    NodeId node;  // kNoNode for a literal
    std::string_view literal;
  };

  // A labelable node is expanded once; any other node is expanded at most
  // twice, which is enough to push every labelable node it reaches past a
  // count of one.
  void CountReferences(NodeId root) {
    std::vector<NodeId> stack{root};
    std::vector<NodeId> kids;
    while (!stack.empty()) {
      NodeId id = stack.back();
      stack.pop_back();
      if (Labelable(g_, id)) {
        if (++count_[id] > 1) continue;
      } else if (++revisits_[id] > 2) {
        continue;
      }
      kids.clear();
      g_.Children(id, kids);
      stack.insert(stack.end(), kids.begin(), kids.end());
    }
  }

  void Lit(std::string_view s) { tasks_.push_back(Task{kNoNode, s}); }
  void Node_(NodeId id) { tasks_.push_back(Task{id, {}}); }

  // Schedules c0 "," c1 "," ... in execution order.
  void Sequence(const std::vector<NodeId>& ids) {
    for (std::size_t i = ids.size(); i-- > 0;) {
      Node_(ids[i]);
      if (i) Lit(",");
    }
  }

  void Pairs(const std::vector<std::pair<NodeId, NodeId>>& pairs) {
    for (std::size_t i = pairs.size(); i-- > 0;) {
      Lit("]");
      Node_(pairs[i].second);
      Lit(",");
      Node_(pairs[i].first);
      Lit("[");
      if (i) Lit(",");
    }
  }

  void OpenTagged(NodeId id, std::string_view kind) {
    out_ += "[\"";
    out_ += kind;
    if (count_[id] > 1) {
      auto label = static_cast<std::uint32_t>(labels_.size());
      labels_.emplace(id, label);
      out_ += "@" + std::to_string(label);
    }
    out_ += "\"";
  }

  void Render(NodeId id) {
    if (AppendScalar(g_, id, out_)) return;
    if (auto it = labels_.find(id); it != labels_.end()) {
      out_ += "[\"ref\"," + std::to_string(it->second) + "]";
      return;
    }
    switch (g_.kind(id)) {
      case NodeKind::kBytes:
        OpenTagged(id, "bytearray");
        out_ += ",\"" + text::HexLower(g_.text(id)) + "\"]";
        return;
      case NodeKind::kTuple:
        out_ += "[\"tuple\",[";
        Lit("]]");
        Sequence(g_.items(id));
        return;
      case NodeKind::kList:
        OpenTagged(id, "list");
        out_ += ",[";
        Lit("]]");
        Sequence(g_.items(id));
        return;
      case NodeKind::kDict:
        OpenTagged(id, "dict");
        out_ += ",[";
        Lit("]]");
        Pairs(g_.dict(id).entries);
        return;
      case NodeKind::kSet:
        OpenTagged(id, "set");
        out_ += ",[";
        Lit("]]");
        Sequence(SortedMembers(g_, id, keys_));
        return;
      case NodeKind::kFrozenSet:
        out_ += "[\"frozenset\",[";
        Lit("]]");
        Sequence(SortedMembers(g_, id, keys_));
        return;
      case NodeKind::kCallableRef: {
        const auto& c = g_.callable(id);
        out_ += "[\"callable\",";
        text::AppendJsonString(c.name, out_);
        Lit("]");
        if (c.attrs != kNoNode) {
          Node_(c.attrs);
          Lit(",");
        }
        return;
      }
      case NodeKind::kStub:
        OpenTagged(id, "stub");
        out_ += ",";
        text::AppendJsonString(g_.stub(id).requested_name, out_);
        out_ += "]";
        return;
      case NodeKind::kPersistentRef:
        OpenTagged(id, "persid");
        out_ += ",";
        Lit("]");
        Node_(g_.persistent(id).pid);
        return;
      case NodeKind::kOpaqueInstance: {
        const auto& inst = g_.instance(id);
        OpenTagged(id, "object");
        out_ += ",";
        text::AppendJsonString(inst.class_name, out_);
        out_ += inst.construction == Construction::kReduced ? ",\"reduce\"," : ",\"new\",";
        Lit("]]");
        Pairs(inst.setitems);
        Lit("],[");
        Sequence(inst.items);
        Lit(",[");
        if (inst.state == kNoNode) {
          Lit("null");
        } else {
          Node_(inst.state);
        }
        Lit(",");
        if (inst.kwargs == kNoNode) {
          Lit("null");
        } else {
          Node_(inst.kwargs);
        }
        Lit(",");
        Node_(inst.args);
        return;
      }
      default:
        out_ += "null";
        return;
    }
  }

  const ValueGraph& g_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint8_t> revisits_;
  std::unordered_map<NodeId, std::uint32_t> labels_;
  SortKeys keys_;
  std::vector<Task> tasks_;
  std::string out_;
};

std::string KeySegment(const ValueGraph& g, NodeId key) {
  switch (g.kind(key)) {
    case NodeKind::kString:
      return g.at(key).flag ? text::ReprBytes(g.text(key)) : text::ReprText(g.text(key));
    case NodeKind::kInt:
    case NodeKind::kBool:
    case NodeKind::kFloat:
    case NodeKind::kNone:
    case NodeKind::kBytes: {
      std::string s;
      AppendScalar(g, key, s);
      return s;
    }
    default:
      return SortKey(g, key);
  }
}

}  // namespace

std::string CanonicalDump(const ValueGraph& graph, NodeId root) {
  return Dumper(graph).Run(root);
}

std::string SortKey(const ValueGraph& graph, NodeId id) {
  SortKeys keys(graph);
  return keys.Get(id);
}

std::vector<StubEntry> ListStubs(const ValueGraph& graph, NodeId root) {
  std::vector<StubEntry> found;
  std::vector<bool> visited(graph.size(), false);
  std::vector<std::pair<NodeId, std::string>> stack{{root, ""}};
  SortKeys keys(graph);
  while (!stack.empty()) {
    auto [id, path] = std::move(stack.back());
    stack.pop_back();
    if (visited[id]) continue;
    visited[id] = true;
    std::vector<std::pair<NodeId, std::string>> next;
    auto indexed = [&next, &path](const std::vector<NodeId>& ids, std::string_view prefix,
                                  char open, char close) {
      for (std::size_t i = 0; i < ids.size(); ++i) {
        next.emplace_back(ids[i], path + std::string(prefix) + open + std::to_string(i) + close);
      }
    };
    auto entries = [&next, &path, &graph](const std::vector<std::pair<NodeId, NodeId>>& kv,
                                          std::string_view prefix) {
      for (std::size_t i = 0; i < kv.size(); ++i) {
        next.emplace_back(kv[i].first,
                          path + std::string(prefix) + ".keys[" + std::to_string(i) + "]");
        next.emplace_back(kv[i].second,
                          path + std::string(prefix) + "[" + KeySegment(graph, kv[i].first) + "]");
      }
    };
    switch (graph.kind(id)) {
      case NodeKind::kStub:
        found.push_back(StubEntry{path, graph.stub(id).requested_name, id});
        break;
      case NodeKind::kTuple:
      case NodeKind::kList:
        indexed(graph.items(id), "", '[', ']');
        break;
      case NodeKind::kSet:
      case NodeKind::kFrozenSet:
        indexed(SortedMembers(graph, id, keys), "", '{', '}');
        break;
      case NodeKind::kDict:
        entries(graph.dict(id).entries, "");
        break;
      case NodeKind::kCallableRef:
        if (graph.callable(id).attrs != kNoNode) {
          next.emplace_back(graph.callable(id).attrs, path + ".attrs");
        }
        break;
      case NodeKind::kPersistentRef:
        next.emplace_back(graph.persistent(id).pid, path + ".pid");
        break;
      case NodeKind::kOpaqueInstance: {
        const auto& inst = graph.instance(id);
        next.emplace_back(inst.args, path + ".args");
        if (inst.kwargs != kNoNode) next.emplace_back(inst.kwargs, path + ".kwargs");
        if (inst.state != kNoNode) next.emplace_back(inst.state, path + ".state");
        indexed(inst.items, ".items", '[', ']');
        entries(inst.setitems, ".setitems");
        break;
      }
      default:
        break;
    }
    for (auto it = next.rbegin(); it != next.rend(); ++it) {
      if (!visited[it->first]) stack.push_back(std::move(*it));
    }
  }
  return found;
}

}  // namespace pickleward
