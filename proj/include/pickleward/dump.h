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

#ifndef PICKLEWARD_DUMP_H_
#define PICKLEWARD_DUMP_H_

#include <string>
#include <vector>

#include "pickleward/value_graph.h"

namespace pickleward {

inline constexpr char kDumpHeader[] = "pickleward-dump v1";

// Renders the graph reachable from `root` in the pickleward-dump v1
// grammar: the header line followed by one value line. Shared mutable
// nodes are labelled ("list@0") at first render and later appear as
// ["ref",0]. Set members are sorted by their label-free rendering.
std::string CanonicalDump(const ValueGraph& graph, NodeId root);

// The label-free rendering used to order set members. Instances,
// persistent refs and stubs render by creation order.
std::string SortKey(const ValueGraph& graph, NodeId id);

struct StubEntry {
  std::string path;  // e.g. .state['model_card']['optimizer']; empty for the root
  std::string name;
  NodeId node = kNoNode;
};

// One entry per distinct reachable stub node, in depth-first dump order,
// each with the first path that reaches it.
std::vector<StubEntry> ListStubs(const ValueGraph& graph, NodeId root);

}  // namespace pickleward

#endif  // PICKLEWARD_DUMP_H_
