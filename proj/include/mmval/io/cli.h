/*
 * Copyright 2026 The mmval Authors.
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

#ifndef MMVAL_IO_CLI_H_
#define MMVAL_IO_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace mmval::io {

inline constexpr int kExitOk = 0;
// Bad arguments, invalid input content or a failed check.
inline constexpr int kExitValidation = 1;
// Unreadable input or unwritable output.
inline constexpr int kExitIo = 2;

// Runs the mmval command line. `args` excludes the program name.
int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err);

}  // namespace mmval::io

#endif  // MMVAL_IO_CLI_H_
