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

#ifndef PICKLEWARD_TOOLS_CLI_H_
#define PICKLEWARD_TOOLS_CLI_H_

#include <iosfwd>

namespace pickleward::cli {

enum ExitCode {
  kOk = 0,
  kUsage = 2,  // also parse and I/O errors
  kFlagged = 3,
  kSecurityViolation = 4,
  kStubsPresent = 5,
};

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pickleward::cli

#endif  // PICKLEWARD_TOOLS_CLI_H_
