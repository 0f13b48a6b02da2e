// Copyright 2026 The cftrace Authors
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

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cftrace::cli {

inline constexpr int kSchemaVersion = 1;
/// Default directory for data files when --output is relative or absent.
inline constexpr const char* kOutputDirEnv = "CFTRACE_OUTPUT_DIR";

/// Runs one command line. Data goes to `out` unless a file is requested;
/// diagnostics go to `err`. Returns the process exit status: 0 on success,
/// 2 on a usage or configuration error, 1 on any other failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cftrace::cli
