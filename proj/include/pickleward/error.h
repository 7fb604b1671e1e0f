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

#ifndef PICKLEWARD_ERROR_H_
#define PICKLEWARD_ERROR_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pickleward {

enum class ErrorCode {
  // Decoding.
  kTruncatedInput,
  kUnknownOpcode,
  kBadFrame,
  kMissingStop,
  kUnsupportedProtocol,
  kBadArgument,
  kContainer,
  // Security violations raised by the restricted VM.
  kInvocationDenied,
  kStubInvocation,
  kForbiddenOpcode,
  kStubsPresent,
  // Malformed programs and resource bounds.
  kStackUnderflow,
  kMemoMiss,
  kDepthExceeded,
  kMemoExceeded,
  kNotCallable,
  kUnhashableKey,
  kInvalidTarget,
  // Policies.
  kSubsetViolation,
  kMissingRootClass,
  kInvalidName,
  kParseError,
  kNameNotInPolicy,
  // Source analysis.
  kNoSources,
  kSyntaxError,
  kClassNotFound,
  kRootUnresolvable,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// True for the three outcomes that mean "the policy stopped this program".
bool IsSecurityViolation(ErrorCode code);

// The single exception type of the library. `offset` is the byte offset of
// the offending opcode when one exists; `subject` is the callable name or
// mnemonic the error is about.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message,
        std::optional<std::uint64_t> offset = std::nullopt,
        std::string subject = {});

  ErrorCode code() const { return code_; }
  const std::optional<std::uint64_t>& offset() const { return offset_; }
  const std::string& subject() const { return subject_; }

 private:
  ErrorCode code_;
  std::optional<std::uint64_t> offset_;
  std::string subject_;
};

}  // namespace pickleward

#endif  // PICKLEWARD_ERROR_H_
