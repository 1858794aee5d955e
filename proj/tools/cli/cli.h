// Copyright 2026 The mtforge Authors.
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


// The `mtforge` command line, callable in process.
//
// Exit status: 0 on success, 1 on a data or I/O error, 2 on a configuration
// or usage error. Diagnostics go to `err` as `key=value` lines; a failure
// always logs `error=<code>`.

#ifndef MTFORGE_TOOLS_CLI_CLI_H_
#define MTFORGE_TOOLS_CLI_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace mtforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitData = 1;
inline constexpr int kExitConfig = 2;

// `args` excludes the program name. "-" as a path means `in` or `out`.
int RunCli(const std::vector<std::string>& args, std::istream& in,
           std::ostream& out, std::ostream& err);

}  // namespace mtforge::cli

#endif  // MTFORGE_TOOLS_CLI_CLI_H_
