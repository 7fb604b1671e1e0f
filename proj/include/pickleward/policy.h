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

#ifndef PICKLEWARD_POLICY_H_
#define PICKLEWARD_POLICY_H_

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace pickleward {

inline constexpr char kPolicySchema[] = "pickleward-policy/1";
inline constexpr char kGeneratorVersion[] = "pickleward-gen 1.0";

// Canonical dotted identifier of a Python callable.
struct QualifiedName {
  std::string module;
  std::string attr;

  // Accepts "module:attr" or dotted text, which splits at the last dot.
  static std::optional<QualifiedName> Parse(std::string_view text);
  std::string text() const { return module + "." + attr; }
  friend bool operator==(const QualifiedName&, const QualifiedName&) = default;
};

bool IsValidQualifiedName(std::string_view text);

using NameSet = std::set<std::string, std::less<>>;

// How a name entered a generated policy: the candidate that led to it and
// the rule that fired.
struct Derivation {
  std::string parent;  // empty for the root
  std::string rule;
  friend bool operator==(const Derivation&, const Derivation&) = default;
};

struct PolicyData {
  NameSet allowed_imports;
  NameSet allowed_invocations;
  std::string library;
  // Absent only for a policy with no imports.
  std::optional<std::string> root_class;
  std::string generator_version = kGeneratorVersion;
  std::set<std::string> warnings;
  std::map<std::string, Derivation> provenance;

  friend bool operator==(const PolicyData&, const PolicyData&) = default;
};

// Throws Error(kSubsetViolation | kMissingRootClass | kInvalidName).
void Validate(const PolicyData& data);

// A validated policy. Every constructor validates, so holding a Policy
// means its invariants hold.
class Policy {
 public:
  static Policy From(PolicyData data);
  // Allows nothing.
  static Policy Empty();

  const PolicyData& data() const { return data_; }
  const NameSet& allowed_imports() const { return data_.allowed_imports; }
  const NameSet& allowed_invocations() const { return data_.allowed_invocations; }
  bool AllowsImport(std::string_view name) const {
    return data_.allowed_imports.find(name) != data_.allowed_imports.end();
  }
  bool AllowsInvocation(std::string_view name) const {
    return data_.allowed_invocations.find(name) != data_.allowed_invocations.end();
  }

  friend bool operator==(const Policy& a, const Policy& b) { return a.data_ == b.data_; }

 private:
  explicit Policy(PolicyData data) : data_(std::move(data)) {}
  PolicyData data_;
};

// Set unions. Deterministic and commutative: the root is the smaller of
// the two roots, library labels join sorted with '+', and conflicting
// provenance keeps the smaller derivation.
Policy Merge(const Policy& a, const Policy& b);

std::string ToJson(const Policy& policy);
// Throws Error(kParseError) for malformed documents or an unknown schema,
// and the Validate errors for documents that break an invariant.
Policy PolicyFromJson(std::string_view json);
Policy ReadPolicy(const std::filesystem::path& path);
void WritePolicy(const Policy& policy, const std::filesystem::path& path);

enum class CacheOrigin { kBuiltin, kVendored, kUserSupplied };
std::string_view CacheOriginName(CacheOrigin origin);

struct ClassCacheEntry {
  std::string class_name;
  NameSet imports;
  NameSet invocations;
  CacheOrigin origin = CacheOrigin::kBuiltin;
};

// Precomputed policy fragments keyed by class name. Lookup prefers
// UserSupplied, then Vendored, then Builtin.
class ClassCache {
 public:
  // Only the compiled-in entries.
  static ClassCache WithBuiltins();

  // Loads every `<module>.<attr>.json` file in `dir` (policy schema, the
  // root class names the entry). Throws Error(kIo | kParseError | ...).
  void LoadDirectory(const std::filesystem::path& dir, CacheOrigin origin);
  // Throws Error(kSubsetViolation) when invocations are not imports.
  void Add(ClassCacheEntry entry);

  const ClassCacheEntry* Lookup(std::string_view name) const;
  std::vector<std::string> Names() const;

 private:
  std::array<std::map<std::string, ClassCacheEntry, std::less<>>, 3> layers_;
};

}  // namespace pickleward

#endif  // PICKLEWARD_POLICY_H_
