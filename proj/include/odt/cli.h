/*
 * Copyright 2026 The ODT Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Command-line driver behind the odt binary, callable in-process.
//
//   odt <encode|train|export|eval|cv|oracle|sweep> --data FILE [flags]
//
// Exit codes: 0 success, 1 library error (one-line diagnostic on `err`),
// 2 usage error, 3 a solve stopped at its time limit (the incumbent is still
// written).

#ifndef ODT_CLI_H_
#define ODT_CLI_H_

#include <ostream>

namespace odt {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitTimeLimit = 3;

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace odt

#endif  // ODT_CLI_H_
