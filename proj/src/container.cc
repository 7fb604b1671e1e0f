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

#include "pickleward/container.h"

#include <zlib.h>

#include <fstream>
#include <iterator>

#include "pickleward/error.h"

namespace pickleward {
namespace {

constexpr std::uint32_t kLocalHeader = 0x04034b50;
constexpr std::uint32_t kCentralHeader = 0x02014b50;
constexpr std::uint32_t kEndRecord = 0x06054b50;
constexpr std::uint32_t kZip64EndRecord = 0x06064b50;
constexpr std::uint32_t kZip64Locator = 0x07064b50;

[[noreturn]] void Fail(const std::string& message) {
  throw Error(ErrorCode::kContainer, "zip: " + message);
}

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::uint64_t Get(std::uint64_t at, int n) const {
    if (at > data_.size() || data_.size() - at < static_cast<std::uint64_t>(n)) {
      Fail("record extends past the end of the archive");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[at + i])) << (8 * i);
    }
    return v;
  }
  std::uint16_t U16(std::uint64_t at) const { return static_cast<std::uint16_t>(Get(at, 2)); }
  std::uint32_t U32(std::uint64_t at) const { return static_cast<std::uint32_t>(Get(at, 4)); }
  std::uint64_t U64(std::uint64_t at) const { return Get(at, 8); }

  std::string_view Slice(std::uint64_t at, std::uint64_t n) const {
    if (at > data_.size() || data_.size() - at < n) {
      Fail("record extends past the end of the archive");
    }
    return data_.substr(at, n);
  }

  std::uint64_t size() const { return data_.size(); }

 private:
  std::string_view data_;
};

std::uint64_t FindEndRecord(const Reader& r) {
  if (r.size() < 22) Fail("too short for an end-of-central-directory record");
  std::uint64_t lowest = r.size() > 22 + 65535 ? r.size() - 22 - 65535 : 0;
  for (std::uint64_t at = r.size() - 22;; --at) {
    if (r.U32(at) == kEndRecord) return at;
    if (at == lowest) break;
  }
  Fail("end-of-central-directory record not found");
}

}  // namespace

bool LooksLikeZip(std::string_view data) {
  return data.size() >= 4 && data[0] == 'P' && data[1] == 'K' &&
         ((data[2] == 3 && data[3] == 4) || (data[2] == 5 && data[3] == 6));
}

ZipArchive::ZipArchive(std::string data) : data_(std::move(data)) {
  Reader r(data_);
  std::uint64_t eocd = FindEndRecord(r);
  std::uint64_t count = r.U16(eocd + 10);
  std::uint64_t cd_offset = r.U32(eocd + 16);
  if (count == 0xFFFF || cd_offset == 0xFFFFFFFF) {
    if (eocd < 20 || r.U32(eocd - 20) != kZip64Locator) Fail("missing ZIP64 locator");
    std::uint64_t rec = r.U64(eocd - 20 + 8);
    if (r.U32(rec) != kZip64EndRecord) Fail("bad ZIP64 end record");
    count = r.U64(rec + 32);
    cd_offset = r.U64(rec + 48);
  }
  std::uint64_t at = cd_offset;
  for (std::uint64_t i = 0; i < count; ++i) {
    if (r.U32(at) != kCentralHeader) Fail("bad central directory entry");
    Member m;
    m.method = r.U16(at + 10);
    m.crc32 = r.U32(at + 16);
    m.compressed_size = r.U32(at + 20);
    m.size = r.U32(at + 24);
    std::uint16_t name_len = r.U16(at + 28);
    std::uint16_t extra_len = r.U16(at + 30);
    std::uint16_t comment_len = r.U16(at + 32);
    m.header_offset = r.U32(at + 42);
    m.name = std::string(r.Slice(at + 46, name_len));
    std::uint64_t extra = at + 46 + name_len;
    std::uint64_t extra_end = extra + extra_len;
    while (extra + 4 <= extra_end) {
      std::uint16_t id = r.U16(extra);
      std::uint16_t len = r.U16(extra + 2);
      if (id == 0x0001) {
        std::uint64_t field = extra + 4;
        if (m.size == 0xFFFFFFFF) { m.size = r.U64(field); field += 8; }
        if (m.compressed_size == 0xFFFFFFFF) { m.compressed_size = r.U64(field); field += 8; }
        if (m.header_offset == 0xFFFFFFFF) { m.header_offset = r.U64(field); }
      }
      extra += 4 + len;
    }
    members_.push_back(std::move(m));
    at += 46 + name_len + extra_len + comment_len;
  }
}

const ZipArchive::Member* ZipArchive::Find(std::string_view name) const {
  for (const auto& m : members_) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

std::string ZipArchive::Read(std::string_view name) const {
  const Member* m = Find(name);
  if (m == nullptr) Fail("no member named '" + std::string(name) + "'");
  return Read(*m);
}

std::string ZipArchive::Read(const Member& m) const {
  Reader r(data_);
  if (r.U32(m.header_offset) != kLocalHeader) Fail("bad local header for " + m.name);
  std::uint64_t start = m.header_offset + 30 + r.U16(m.header_offset + 26) +
                        r.U16(m.header_offset + 28);
  std::string_view packed = r.Slice(start, m.compressed_size);
  std::string out;
  if (m.method == 0) {
    out.assign(packed);
  } else if (m.method == 8) {
    if (m.size > (1ULL << 34)) Fail("member too large: " + m.name);
    out.resize(m.size);
    z_stream zs{};
    if (inflateInit2(&zs, -MAX_WBITS) != Z_OK) Fail("inflate init failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(packed.data()));
    zs.avail_in = static_cast<uInt>(packed.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());
    int rc = inflate(&zs, Z_FINISH);
    std::uint64_t produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || produced != m.size) Fail("corrupt deflate data in " + m.name);
  } else {
    Fail("unsupported compression method " + std::to_string(m.method) + " for " + m.name);
  }
  auto crc = static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(out.data()), static_cast<uInt>(out.size())));
  if (crc != m.crc32) Fail("CRC mismatch in " + m.name);
  return out;
}

std::string SelectPickleMember(const ZipArchive& archive,
                               const std::optional<std::string>& requested) {
  if (requested) {
    if (archive.Find(*requested) == nullptr) Fail("no member named '" + *requested + "'");
    return *requested;
  }
  auto pick = [&archive](std::string_view suffix) -> std::optional<std::string> {
    std::optional<std::string> found;
    int hits = 0;
    for (const auto& m : archive.members()) {
      if (m.name.size() >= suffix.size() &&
          m.name.compare(m.name.size() - suffix.size(), suffix.size(), suffix) == 0) {
        found = m.name;
        ++hits;
      }
    }
    if (hits > 1) Fail("several members end in '" + std::string(suffix) + "'; use --member");
    return found;
  };
  if (auto name = pick("data.pkl")) return *name;
  if (auto name = pick(".pkl")) return *name;
  Fail("archive has no .pkl member");
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  return data;
}

PickleInput ReadPickleFile(const std::filesystem::path& path,
                           const std::optional<std::string>& member) {
  PickleInput input;
  std::string data = ReadFileBytes(path);
  if (!LooksLikeZip(data)) {
    if (member) Fail(path.string() + " is not a ZIP archive");
    input.bytes = std::move(data);
    return input;
  }
  ZipArchive archive(std::move(data));
  std::string name = SelectPickleMember(archive, member);
  input.bytes = archive.Read(name);
  input.member = name;
  return input;
}

}  // namespace pickleward
