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

#ifndef PICKLEWARD_VM_H_
#define PICKLEWARD_VM_H_

#include <cstdint>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "pickleward/dump.h"
#include "pickleward/error.h"
#include "pickleward/opcodes.h"
#include "pickleward/policy.h"
#include "pickleward/value_graph.h"

namespace pickleward {

enum class VmMode { kRestricted, kUnrestricted };

struct VmConfig {
  VmMode mode = VmMode::kRestricted;
  std::shared_ptr<const Policy> policy;  // required in restricted mode
  std::size_t max_depth = 4096;          // open MARKs
  std::size_t max_memo = 1000000;

  static VmConfig Restricted(Policy policy);
  static VmConfig Restricted(std::shared_ptr<const Policy> policy);
  static VmConfig Unrestricted();
};

struct TraceEvent {
  std::string name;
  std::uint64_t offset = 0;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

struct TaintedBuild {
  std::string callable;
  std::string attribute;
  std::uint64_t offset = 0;
  friend bool operator==(const TaintedBuild&, const TaintedBuild&) = default;
};

struct ExecutionTrace {
  std::vector<TraceEvent> imports;      // every importing opcode, resolved or stubbed
  std::vector<TraceEvent> invocations;  // REDUCE calls performed
  std::vector<TraceEvent> allocations;  // NEWOBJ / NEWOBJ_EX performed
  std::vector<TraceEvent> stubs;        // stubs created
  std::vector<TaintedBuild> tainted_builds;
  friend bool operator==(const ExecutionTrace&, const ExecutionTrace&) = default;
};

struct VmStats {
  std::uint64_t opcodes = 0;
  double wall_seconds = 0;
};

struct VmOutcome {
  ValueGraph graph;
  NodeId root = kNoNode;
  ExecutionTrace trace;
  VmStats stats;
};

// One execution. After Run throws, trace() still shows what happened up to
// the failing opcode.
class Vm {
 public:
  explicit Vm(VmConfig config);
  ~Vm();

  // Runs the first program and then every trailing program (fresh stack
  // and memo each); the root is the first program's result. Can be called
  // once.
  VmOutcome Run(const OpcodeStream& stream);

  const ExecutionTrace& trace() const;

 private:
  class Impl;
  std::unique_ptr<Impl> impl_;
};

VmOutcome Execute(const OpcodeStream& stream, const VmConfig& config);

class StubsPresentError : public Error {
 public:
  explicit StubsPresentError(std::vector<StubEntry> stubs);
  const std::vector<StubEntry>& stubs() const { return stubs_; }

 private:
  std::vector<StubEntry> stubs_;
};

// Throws StubsPresentError when any stub is reachable from the root.
void AssertNoStubs(const VmOutcome& outcome);

}  // namespace pickleward

#endif  // PICKLEWARD_VM_H_
