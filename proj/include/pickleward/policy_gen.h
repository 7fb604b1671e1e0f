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

#ifndef PICKLEWARD_POLICY_GEN_H_
#define PICKLEWARD_POLICY_GEN_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pickleward/policy.h"
#include "pickleward/source_index.h"

namespace pickleward {

struct GenerateOptions {
  // Label stored in the policy; defaults to the index package.
  std::string library;
  // Pops candidates in a seeded random order instead of FIFO. The output
  // sets do not depend on it.
  std::optional<std::uint64_t> shuffle_seed;
};

// Builtins the Pickle Machine builds from data opcodes; never enqueued.
bool IsDataBuiltin(std::string_view name);

// The candidate-queue fixpoint. Throws Error(kRootUnresolvable) when the
// root is neither in the index nor in the cache.
Policy Generate(const ModuleIndex& index, const ClassCache& cache, const std::string& root_class,
                const GenerateOptions& options = {});

struct ChainLink {
  std::string name;
  std::string rule;
};

// Root first. Throws Error(kNameNotInPolicy).
std::vector<ChainLink> Explain(const Policy& policy, const std::string& name);
std::string FormatChain(const std::vector<ChainLink>& chain);

}  // namespace pickleward

#endif  // PICKLEWARD_POLICY_GEN_H_
