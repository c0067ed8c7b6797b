/*
 * Copyright 2026 The unistpa Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef UNISTPA_CLI_HPP
#define UNISTPA_CLI_HPP

#include <ostream>
#include <span>
#include <string>

namespace unistpa::cli {

/// Process exit codes.
enum ExitStatus : int {
  kOk = 0,
  kFindings = 1,
  kInvalidInput = 2,
  kUsageOrIo = 3,
};

/// Runs one command. `args` excludes the program name.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace unistpa::cli

#endif  // UNISTPA_CLI_HPP
