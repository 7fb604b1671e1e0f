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

#ifndef PICKLEWARD_CONTAINER_H_
#define PICKLEWARD_CONTAINER_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pickleward {

// Reader for the ZIP layout used by PyTorch checkpoints. Stored and
// deflated members, ZIP64 sizes; no encryption, no multi-disk archives.
class ZipArchive {
 public:
  struct Member {
    std::string name;
    std::uint16_t method = 0;
    std::uint32_t crc32 = 0;
    std::uint64_t compressed_size = 0;
    std::uint64_t size = 0;
    std::uint64_t header_offset = 0;
  };

  // Takes ownership of the archive bytes. Throws Error(kContainer).
  explicit ZipArchive(std::string data);

  const std::vector<Member>& members() const { return members_; }
  const Member* Find(std::string_view name) const;
  std::string Read(const Member& member) const;
  std::string Read(std::string_view name) const;

 private:
  std::string data_;
  std::vector<Member> members_;
};

bool LooksLikeZip(std::string_view data);

// The member `requested` when given, else the single member whose name
// ends in "data.pkl", else the single ".pkl" member.
std::string SelectPickleMember(const ZipArchive& archive,
                               const std::optional<std::string>& requested);

struct PickleInput {
  std::string bytes;
  std::optional<std::string> member;  // set when read from a ZIP archive
};

// Raw pickle bytes from a file, unwrapping a ZIP container when the magic
// bytes say so.
PickleInput ReadPickleFile(const std::filesystem::path& path,
                           const std::optional<std::string>& member = std::nullopt);

std::string ReadFileBytes(const std::filesystem::path& path);

}  // namespace pickleward

#endif  // PICKLEWARD_CONTAINER_H_
