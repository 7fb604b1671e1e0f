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

#ifndef PICKLEWARD_TESTS_SUPPORT_ORACLES_H_
#define PICKLEWARD_TESTS_SUPPORT_ORACLES_H_

#include <random>
#include <string>

#include "pickleward/opcodes.h"
#include "pickleward/policy.h"
#include "pickleward/source_index.h"

namespace pickleward::testing {

// Builtin entries plus the vendored cache/ directory.
ClassCache VendoredCache();

// The index of a corpus library, by manifest name.
ModuleIndex LibraryIndex(const std::string& name);

struct ClosureSets {
  NameSet imports;
  NameSet invocations;
};

// Closure by direct recursion over the index records, no queue.
ClosureSets BruteForceClosure(const ModuleIndex& index, const ClassCache& cache, const std::string& root);

// Exactly the names an unrestricted run of `stream` resolves and calls.
Policy AllowAll(const OpcodeStream& stream);

// One random edit: byte flip, insert, delete, spliced opcode or appended program.
std::string MutatePickle(std::string bytes, std::mt19937_64& rng);

}  // namespace pickleward::testing

#endif  // PICKLEWARD_TESTS_SUPPORT_ORACLES_H_
