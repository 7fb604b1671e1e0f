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

#include "pickleward/error.h"

#include <utility>

namespace pickleward {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kTruncatedInput: return "TruncatedInput";
    case ErrorCode::kUnknownOpcode: return "UnknownOpcode";
    case ErrorCode::kBadFrame: return "BadFrame";
    case ErrorCode::kMissingStop: return "MissingStop";
    case ErrorCode::kUnsupportedProtocol: return "UnsupportedProtocol";
    case ErrorCode::kBadArgument: return "BadArgument";
    case ErrorCode::kContainer: return "ContainerError";
    case ErrorCode::kInvocationDenied: return "InvocationDenied";
    case ErrorCode::kStubInvocation: return "StubInvocation";
    case ErrorCode::kForbiddenOpcode: return "ForbiddenOpcode";
    case ErrorCode::kStubsPresent: return "StubsPresent";
    case ErrorCode::kStackUnderflow: return "StackUnderflow";
    case ErrorCode::kMemoMiss: return "MemoMiss";
    case ErrorCode::kDepthExceeded: return "DepthExceeded";
    case ErrorCode::kMemoExceeded: return "MemoExceeded";
    case ErrorCode::kNotCallable: return "NotCallable";
    case ErrorCode::kUnhashableKey: return "UnhashableKey";
    case ErrorCode::kInvalidTarget: return "InvalidTarget";
    case ErrorCode::kSubsetViolation: return "SubsetViolation";
    case ErrorCode::kMissingRootClass: return "MissingRootClass";
    case ErrorCode::kInvalidName: return "InvalidName";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kNameNotInPolicy: return "NameNotInPolicy";
    case ErrorCode::kNoSources: return "NoSources";
    case ErrorCode::kSyntaxError: return "SyntaxError";
    case ErrorCode::kClassNotFound: return "ClassNotFound";
    case ErrorCode::kRootUnresolvable: return "RootUnresolvable";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

bool IsSecurityViolation(ErrorCode code) {
  return code == ErrorCode::kInvocationDenied ||
         code == ErrorCode::kStubInvocation ||
         code == ErrorCode::kForbiddenOpcode;
}

Error::Error(ErrorCode code, std::string message,
             std::optional<std::uint64_t> offset, std::string subject)
    : std::runtime_error(std::move(message)),
      code_(code),
      offset_(offset),
      subject_(std::move(subject)) {}

}  // namespace pickleward
