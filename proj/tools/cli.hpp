// Copyright 2026 The slra Authors.
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

#ifndef SLRA_TOOLS_CLI_HPP
#define SLRA_TOOLS_CLI_HPP

namespace slra::cli {

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kInputError = 1;
inline constexpr int kNotConverged = 2;
inline constexpr int kSingularGamma = 3;

/// Entry point of the `slra` command (solve, eval, bench, cond, validate).
int run(int argc, char** argv);

}  // namespace slra::cli

#endif  // SLRA_TOOLS_CLI_HPP
