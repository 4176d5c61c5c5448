// Copyright 2026 The geneo-select Authors
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

#ifndef GENEO_CLI_H_
#define GENEO_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace geneo {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitIo = 3;

// Entry point for the `geneo` tool: subcommands select, verify, metrics, net
// and ingest-check. args excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

// Writes via a temporary file and rename. Throws IoError.
void WriteFileAtomic(const std::string& path, const std::string& contents);

}  // namespace geneo

#endif  // GENEO_CLI_H_
