// Copyright 2026 The RepExp Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef REPEXP_CLI_H_
#define REPEXP_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace repexp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitValidation = 2;

// Entry point of the `repexp` tool. `args` excludes the program name.
// Returns 0 on success, 1 on I/O failure and 2 on invalid flags or inputs;
// failures print a one-line diagnostic to `err`.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace repexp

#endif  // REPEXP_CLI_H_
