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

#ifndef PICKLEWARD_SOURCE_INDEX_H_
#define PICKLEWARD_SOURCE_INDEX_H_

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pickleward/policy.h"

namespace pickleward {

// Static type of an attribute or a `__reduce__` component.
struct TypeExpr {
  enum class Kind { kNamed, kReference, kOptional, kUnion, kSequence, kMapping, kTuple, kUnknown };

  Kind kind = Kind::kUnknown;
  // Named/Reference: qualified name. Sequence/Mapping: the concrete
  // container class when it is not a plain builtin (e.g.
  // collections.OrderedDict), otherwise empty. Unknown: the reason.
  std::string text;
  std::vector<TypeExpr> args;

  static TypeExpr Named(std::string name);
  // The class object itself rather than an instance (`Type[X]`, or a class
  // passed by name).
  static TypeExpr Reference(std::string name);
  static TypeExpr Optional(TypeExpr inner);
  // Flattens nested unions and drops duplicates; one member collapses.
  static TypeExpr Union(std::vector<TypeExpr> members);
  static TypeExpr Sequence(TypeExpr element, std::string origin = {});
  static TypeExpr Mapping(TypeExpr key, TypeExpr value, std::string origin = {});
  static TypeExpr Tuple(std::vector<TypeExpr> elements);
  static TypeExpr Unknown(std::string reason);

  std::string ToString() const;

  friend bool operator==(const TypeExpr&, const TypeExpr&) = default;
  friend auto operator<=>(const TypeExpr& a, const TypeExpr& b) {
    return a.ToString() <=> b.ToString();
  }
};

struct ReduceSummary {
  // Absent when the callable could not be determined; `callable_reason`
  // says why.
  std::optional<std::string> callable;
  std::string callable_reason;
  std::vector<TypeExpr> arg_types;
  std::vector<TypeExpr> state_types;

  friend bool operator==(const ReduceSummary&, const ReduceSummary&) = default;
};

struct SourceLocation {
  std::string module;
  int line = 0;
  friend bool operator==(const SourceLocation&, const SourceLocation&) = default;
};

struct ClassRecord {
  std::string name;
  std::vector<std::string> bases;
  // Own attributes merged with those of resolvable bases.
  std::map<std::string, TypeExpr> attributes;
  std::optional<ReduceSummary> reduce_summary;
  SourceLocation defined_at;
  std::vector<std::string> warnings;

  friend bool operator==(const ClassRecord&, const ClassRecord&) = default;
};

struct FileError {
  std::string file;  // relative to the package directory
  int line = 0;
  std::string message;
  friend bool operator==(const FileError&, const FileError&) = default;
};

// Names a set of types mentions. `references` holds classes that appear
// as class objects, which need importing but not expanding.
struct TypeNames {
  NameSet names;
  NameSet references;
  std::vector<std::string> warnings;
};

// Adds every name `type` mentions to `out`; Unknown parts add a warning
// prefixed with `context`.
void CollectTypeNames(const TypeExpr& type, const std::string& context, TypeNames& out);

TypeNames ExtractAttributeTypes(const ClassRecord& record);

// Immutable index of one Python package.
class ModuleIndex {
 public:
  // Parses every .py file under `root_path/package_name` (or under
  // `root_path` itself when that subdirectory does not exist). Throws
  // Error(kNoSources) when there is no Python file; syntax errors are
  // collected in errors().
  static ModuleIndex Build(const std::filesystem::path& root_path,
                           const std::string& package_name);

  ModuleIndex(ModuleIndex&&) noexcept;
  ModuleIndex& operator=(ModuleIndex&&) noexcept;
  ~ModuleIndex();

  const std::string& package() const;
  std::vector<std::string> ModuleNames() const;
  // Local alias to absolute dotted target, definitions included. Null
  // for modules outside the index.
  const std::map<std::string, std::string>* ImportTable(const std::string& module) const;
  const std::vector<FileError>& errors() const;

  // Follows re-exports through the import tables of indexed modules.
  std::string Canonicalize(const std::string& name) const;

  const ClassRecord* FindClass(const std::string& name) const;
  // Throws Error(kClassNotFound).
  const ClassRecord& ResolveClass(const std::string& name) const;
  NameSet SubclassesOf(const std::string& name) const;
  std::vector<std::string> ClassNames() const;

  std::string DebugDump() const;

  struct Data;  // opaque

 private:
  explicit ModuleIndex(std::unique_ptr<Data> data);
  std::unique_ptr<Data> data_;
};

}  // namespace pickleward

#endif  // PICKLEWARD_SOURCE_INDEX_H_
