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

#ifndef PICKLEWARD_TESTS_SUPPORT_CORPUS_H_
#define PICKLEWARD_TESTS_SUPPORT_CORPUS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pickleward/opcodes.h"

namespace pickleward::testing {

std::filesystem::path SourceDir();
std::filesystem::path CorpusDir();

struct CorpusLibrary {
  std::string name;
  std::string package;
  std::filesystem::path path;
  std::string root_class;
};

struct CorpusEntry {
  std::string id;
  std::string kind;  // benign, malicious, bypass, known-failing
  std::filesystem::path pickle_path;
  std::optional<std::string> library;
  std::optional<std::string> member;
  std::optional<std::filesystem::path> oracle_dump;
  std::optional<std::filesystem::path> oracle_restricted_dump;
  std::vector<std::string> expected_stubs;
  std::vector<std::string> expected_errors;  // alternatives
  std::string notes;

  bool hostile() const { return kind == "malicious" || kind == "bypass"; }
};

struct Corpus {
  std::vector<CorpusLibrary> libraries;
  std::vector<CorpusEntry> entries;

  const CorpusEntry& Get(const std::string& id) const;
  const CorpusLibrary& Library(const std::string& name) const;
};

const Corpus& LoadCorpus();

// The pickle program of an entry, unwrapped from its container.
std::string EntryBytes(const CorpusEntry& entry);
OpcodeStream EntryStream(const CorpusEntry& entry);

std::string ReadText(const std::filesystem::path& path);

}  // namespace pickleward::testing

#endif  // PICKLEWARD_TESTS_SUPPORT_CORPUS_H_
