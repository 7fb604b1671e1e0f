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

#include "pickleward/policy.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pickleward/container.h"
#include "pickleward/error.h"

namespace pickleward {
namespace {

using nlohmann::json;

bool ValidComponent(std::string_view part) {
  if (part.empty()) return false;
  for (char c : part) {
    auto b = static_cast<unsigned char>(c);
    if (b <= 0x20 || b == 0x7F || c == ':' || c == '.') return false;
  }
  return true;
}

bool ValidDotted(std::string_view text) {
  std::size_t start = 0;
  for (;;) {
    std::size_t dot = text.find('.', start);
    if (!ValidComponent(text.substr(start, dot - start))) return false;
    if (dot == std::string_view::npos) return true;
    start = dot + 1;
  }
}

std::string JoinLabels(const std::string& a, const std::string& b) {
  std::set<std::string> parts;
  for (const std::string* s : {&a, &b}) {
    std::stringstream in(*s);
    std::string part;
    while (std::getline(in, part, '+')) {
      if (!part.empty()) parts.insert(part);
    }
  }
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out.push_back('+');
    out += p;
  }
  return out;
}

[[noreturn]] void ParseFail(const std::string& message) {
  throw Error(ErrorCode::kParseError, "policy: " + message);
}

NameSet ReadNames(const json& doc, const char* field) {
  NameSet out;
  if (!doc.contains(field)) return out;
  const json& arr = doc.at(field);
  if (!arr.is_array()) ParseFail(std::string(field) + " must be an array");
  for (const auto& v : arr) {
    if (!v.is_string()) ParseFail(std::string(field) + " must hold strings");
    out.insert(v.get<std::string>());
  }
  return out;
}

std::string ReadString(const json& doc, const char* field) {
  if (!doc.contains(field) || doc.at(field).is_null()) return "";
  if (!doc.at(field).is_string()) ParseFail(std::string(field) + " must be a string");
  return doc.at(field).get<std::string>();
}

}  // namespace

std::optional<QualifiedName> QualifiedName::Parse(std::string_view text) {
  QualifiedName q;
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    q.module = std::string(text.substr(0, colon));
    q.attr = std::string(text.substr(colon + 1));
  } else {
    auto dot = text.rfind('.');
    if (dot == std::string_view::npos) return std::nullopt;
    q.module = std::string(text.substr(0, dot));
    q.attr = std::string(text.substr(dot + 1));
  }
  if (!ValidDotted(q.module) || !ValidDotted(q.attr)) return std::nullopt;
  return q;
}

bool IsValidQualifiedName(std::string_view text) {
  return text.find(':') == std::string_view::npos && QualifiedName::Parse(text).has_value();
}

void Validate(const PolicyData& data) {
  for (const auto* set : {&data.allowed_imports, &data.allowed_invocations}) {
    for (const auto& name : *set) {
      if (!IsValidQualifiedName(name)) {
        throw Error(ErrorCode::kInvalidName, "invalid qualified name '" + name + "'",
                    std::nullopt, name);
      }
    }
  }
  for (const auto& name : data.allowed_invocations) {
    if (!data.allowed_imports.count(name)) {
      throw Error(ErrorCode::kSubsetViolation,
                  "allowed invocation '" + name + "' is not an allowed import",
                  std::nullopt, name);
    }
  }
  if (data.root_class) {
    if (!data.allowed_imports.count(*data.root_class)) {
      throw Error(ErrorCode::kMissingRootClass,
                  "root class '" + *data.root_class + "' is not an allowed import",
                  std::nullopt, *data.root_class);
    }
  } else if (!data.allowed_imports.empty()) {
    throw Error(ErrorCode::kMissingRootClass, "policy with imports has no root class");
  }
}

Policy Policy::From(PolicyData data) {
  Validate(data);
  return Policy(std::move(data));
}

Policy Policy::Empty() {
  PolicyData data;
  data.generator_version.clear();
  return Policy(std::move(data));
}

Policy Merge(const Policy& a, const Policy& b) {
  const PolicyData& x = a.data();
  const PolicyData& y = b.data();
  PolicyData out;
  out.allowed_imports = x.allowed_imports;
  out.allowed_imports.insert(y.allowed_imports.begin(), y.allowed_imports.end());
  out.allowed_invocations = x.allowed_invocations;
  out.allowed_invocations.insert(y.allowed_invocations.begin(), y.allowed_invocations.end());
  out.library = JoinLabels(x.library, y.library);
  out.generator_version = JoinLabels(x.generator_version, y.generator_version);
  if (x.root_class && y.root_class) {
    out.root_class = std::min(*x.root_class, *y.root_class);
  } else {
    out.root_class = x.root_class ? x.root_class : y.root_class;
  }
  out.warnings = x.warnings;
  out.warnings.insert(y.warnings.begin(), y.warnings.end());
  out.provenance = x.provenance;
  for (const auto& [name, d] : y.provenance) {
    auto [it, inserted] = out.provenance.emplace(name, d);
    if (!inserted) {
      auto key = [](const Derivation& v) { return std::tie(v.parent, v.rule); };
      if (key(d) < key(it->second)) it->second = d;
    }
  }
  return Policy::From(std::move(out));
}

std::string ToJson(const Policy& policy) {
  const PolicyData& d = policy.data();
  json doc = json::object();
  doc["schema"] = kPolicySchema;
  doc["library"] = d.library;
  doc["root_class"] = d.root_class ? json(*d.root_class) : json(nullptr);
  doc["generator_version"] = d.generator_version;
  doc["allowed_imports"] = json(std::vector<std::string>(d.allowed_imports.begin(),
                                                         d.allowed_imports.end()));
  doc["allowed_invocations"] = json(std::vector<std::string>(
      d.allowed_invocations.begin(), d.allowed_invocations.end()));
  doc["warnings"] = json(std::vector<std::string>(d.warnings.begin(), d.warnings.end()));
  json prov = json::object();
  for (const auto& [name, v] : d.provenance) {
    prov[name] = json{{"parent", v.parent}, {"rule", v.rule}};
  }
  doc["provenance"] = prov;
  return doc.dump(2) + "\n";
}

Policy PolicyFromJson(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    ParseFail(std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) ParseFail("document must be an object");
  if (!doc.contains("schema") || !doc.at("schema").is_string()) ParseFail("missing schema");
  std::string schema = doc.at("schema").get<std::string>();
  if (schema != kPolicySchema) {
    ParseFail("unsupported schema version '" + schema + "' (expected " +
              std::string(kPolicySchema) + ")");
  }
  PolicyData data;
  data.allowed_imports = ReadNames(doc, "allowed_imports");
  data.allowed_invocations = ReadNames(doc, "allowed_invocations");
  data.library = ReadString(doc, "library");
  std::string root = ReadString(doc, "root_class");
  if (!root.empty()) data.root_class = root;
  data.generator_version = ReadString(doc, "generator_version");
  for (const auto& w : ReadNames(doc, "warnings")) data.warnings.insert(w);
  if (doc.contains("provenance")) {
    const json& prov = doc.at("provenance");
    if (!prov.is_object()) ParseFail("provenance must be an object");
    for (const auto& [name, v] : prov.items()) {
      if (!v.is_object()) ParseFail("provenance entries must be objects");
      data.provenance[name] = Derivation{ReadString(v, "parent"), ReadString(v, "rule")};
    }
  }
  return Policy::From(std::move(data));
}

Policy ReadPolicy(const std::filesystem::path& path) {
  return PolicyFromJson(ReadFileBytes(path));
}

void WritePolicy(const Policy& policy, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << ToJson(policy);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

std::string_view CacheOriginName(CacheOrigin origin) {
  switch (origin) {
    case CacheOrigin::kBuiltin: return "Builtin";
    case CacheOrigin::kVendored: return "Vendored";
    case CacheOrigin::kUserSupplied: return "UserSupplied";
  }
  return "";
}

ClassCache ClassCache::WithBuiltins() {
  ClassCache cache;
  // Containers that protocols below 4 rebuild by calling the type.
  for (const char* name : {"collections.OrderedDict", "builtins.frozenset", "builtins.set",
                           "builtins.bytearray"}) {
    cache.Add(ClassCacheEntry{name, {name}, {name}, CacheOrigin::kBuiltin});
  }
  return cache;
}

void ClassCache::Add(ClassCacheEntry entry) {
  for (const auto& name : entry.invocations) {
    if (!entry.imports.count(name)) {
      throw Error(ErrorCode::kSubsetViolation,
                  "cache entry " + entry.class_name + ": invocation '" + name +
                      "' is not an import",
                  std::nullopt, name);
    }
  }
  auto& layer = layers_[static_cast<std::size_t>(entry.origin)];
  std::string key = entry.class_name;
  layer.insert_or_assign(std::move(key), std::move(entry));
}

void ClassCache::LoadDirectory(const std::filesystem::path& dir, CacheOrigin origin) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::kIo, "class cache directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    Policy p = ReadPolicy(file);
    std::string name = p.data().root_class.value_or(file.stem().string());
    Add(ClassCacheEntry{name, p.allowed_imports(), p.allowed_invocations(), origin});
  }
}

const ClassCacheEntry* ClassCache::Lookup(std::string_view name) const {
  for (std::size_t i = layers_.size(); i-- > 0;) {
    auto it = layers_[i].find(name);
    if (it != layers_[i].end()) return &it->second;
  }
  return nullptr;
}

std::vector<std::string> ClassCache::Names() const {
  std::set<std::string> names;
  for (const auto& layer : layers_) {
    for (const auto& [name, entry] : layer) names.insert(name);
  }
  return {names.begin(), names.end()};
}

}  // namespace pickleward
