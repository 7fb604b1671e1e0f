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

#include "pickleward/policy_gen.h"

#include <deque>
#include <random>
#include <set>

#include "pickleward/error.h"

namespace pickleward {

bool IsDataBuiltin(std::string_view name) {
  static const std::set<std::string, std::less<>> k = {
      "builtins.int",   "builtins.str",  "builtins.list",  "builtins.dict",     "builtins.tuple",
      "builtins.bytes", "builtins.bool", "builtins.float", "builtins.NoneType", "builtins.set"};
  return k.count(name) > 0;
}

namespace {

class Generator {
 public:
  Generator(const ModuleIndex& index, const ClassCache& cache, const GenerateOptions& options)
      : index_(index), cache_(cache) {
    if (options.shuffle_seed) rng_.emplace(*options.shuffle_seed);
  }

  PolicyData Run(const std::string& root) {
    Enqueue(root, "", "root");
    AddImport(root, root, "root");
    while (!pending_.empty()) {
      std::size_t pick = 0;
      if (rng_) pick = std::uniform_int_distribution<std::size_t>(0, pending_.size() - 1)(*rng_);
      std::string candidate = pending_[pick];
      pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(pick));
      Expand(candidate);
    }
    return std::move(out_);
  }

 private:
  void Enqueue(const std::string& name, const std::string& parent, const std::string& rule) {
    if (IsDataBuiltin(name)) return;
    if (!enqueued_.emplace(name, Derivation{parent, rule}).second) return;
    pending_.push_back(name);
  }

  // Provenance of `name` reached while expanding `candidate`; the
  // candidate itself keeps the derivation that enqueued it.
  Derivation Via(const std::string& name, const std::string& candidate, const std::string& rule) const {
    if (name == candidate) return enqueued_.at(candidate);
    return Derivation{candidate, rule};
  }

  void AddImport(const std::string& name, const std::string& candidate, const std::string& rule) {
    out_.allowed_imports.insert(name);
    out_.provenance.emplace(name, Via(name, candidate, rule));
  }

  void AddInvocation(const std::string& name, const std::string& candidate, const std::string& rule) {
    AddImport(name, candidate, rule);
    out_.allowed_invocations.insert(name);
  }

  void Absorb(const TypeNames& types, const std::string& candidate, const std::string& rule) {
    for (const auto& n : types.names) Enqueue(n, candidate, rule);
    for (const auto& n : types.references) {
      if (!IsDataBuiltin(n)) AddImport(n, candidate, rule);
    }
    out_.warnings.insert(types.warnings.begin(), types.warnings.end());
  }

  void Expand(const std::string& candidate) {
    const Derivation& how = enqueued_.at(candidate);
    if (const ClassCacheEntry* entry = cache_.Lookup(candidate)) {
      std::string origin = std::string(CacheOriginName(entry->origin));
      Derivation self{how.parent, how.rule + "; class cache: " + origin};
      auto add = [&](const std::string& n) {
        out_.allowed_imports.insert(n);
        out_.provenance.emplace(n, n == candidate ? self : Derivation{candidate, "class cache: " + origin});
      };
      for (const auto& n : entry->imports) add(n);
      for (const auto& n : entry->invocations) out_.allowed_invocations.insert(n);
      return;
    }
    const ClassRecord* record = index_.FindClass(candidate);
    if (!record) {
      out_.warnings.insert("cannot resolve " + candidate + " (" + how.rule +
                           (how.parent.empty() ? "" : ", from " + how.parent) + ")");
      return;
    }
    out_.warnings.insert(record->warnings.begin(), record->warnings.end());
    if (const auto& reduce = record->reduce_summary) {
      if (reduce->callable) {
        AddInvocation(*reduce->callable, candidate, "rule 1: __reduce__ return of " + candidate);
      }
      TypeNames types;
      for (std::size_t i = 0; i < reduce->arg_types.size(); ++i) {
        CollectTypeNames(reduce->arg_types[i], candidate + ".__reduce__ argument " + std::to_string(i), types);
      }
      for (std::size_t i = 0; i < reduce->state_types.size(); ++i) {
        CollectTypeNames(reduce->state_types[i], candidate + ".__reduce__ state " + std::to_string(i), types);
      }
      Absorb(types, candidate, "rule 1: __reduce__ argument type of " + candidate);
      return;
    }
    AddImport(candidate, candidate, "");
    for (const auto& sub : index_.SubclassesOf(candidate)) {
      Enqueue(sub, candidate, "rule 2: subclass of " + candidate);
    }
    Absorb(ExtractAttributeTypes(*record), candidate, "rule 2: attribute type of " + candidate);
    for (const auto& base : record->bases) {
      if (!index_.FindClass(base) && cache_.Lookup(base)) {
        Enqueue(base, candidate, "base class of " + candidate);
      }
    }
  }

  const ModuleIndex& index_;
  const ClassCache& cache_;
  std::optional<std::mt19937_64> rng_;
  std::deque<std::string> pending_;
  std::map<std::string, Derivation> enqueued_;
  PolicyData out_;
};

}  // namespace

Policy Generate(const ModuleIndex& index, const ClassCache& cache, const std::string& root_class,
                const GenerateOptions& options) {
  std::string root = index.Canonicalize(root_class);
  if (!index.FindClass(root) && !cache.Lookup(root)) {
    throw Error(ErrorCode::kRootUnresolvable,
                "root class " + root_class + " is neither in the index nor in the class cache",
                std::nullopt, root_class);
  }
  PolicyData data = Generator(index, cache, options).Run(root);
  data.root_class = root;
  data.library = options.library.empty() ? index.package() : options.library;
  data.generator_version = kGeneratorVersion;
  for (const auto& e : index.errors()) {
    data.warnings.insert("syntax error in " + e.file + ":" + std::to_string(e.line) + ": " + e.message);
  }
  return Policy::From(std::move(data));
}

std::vector<ChainLink> Explain(const Policy& policy, const std::string& name) {
  if (!policy.AllowsImport(name)) {
    throw Error(ErrorCode::kNameNotInPolicy, name + " is not an allowed import of this policy",
                std::nullopt, name);
  }
  const auto& prov = policy.data().provenance;
  std::vector<ChainLink> chain;
  std::set<std::string> seen;
  std::string current = name;
  while (seen.insert(current).second) {
    auto it = prov.find(current);
    if (it == prov.end()) {
      chain.push_back(ChainLink{current, "no provenance recorded"});
      break;
    }
    chain.push_back(ChainLink{current, it->second.rule});
    if (it->second.parent.empty()) break;
    current = it->second.parent;
  }
  return {chain.rbegin(), chain.rend()};
}

std::string FormatChain(const std::vector<ChainLink>& chain) {
  std::string out;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    out += std::string(2 * i, ' ') + chain[i].name + "  [" + chain[i].rule + "]\n";
  }
  return out;
}

}  // namespace pickleward
