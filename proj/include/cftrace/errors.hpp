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

#include <stdexcept>
#include <string>

namespace cftrace {

/// Invalid network or element configuration (unknown port, sink misuse, bad parameter).
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Post-selection on an outcome with (numerically) zero probability.
struct PostSelectionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problem too large for the exact tag-subset expansion.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

/// Operation not defined for the requested network kind.
struct UnsupportedKind : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

}  // namespace cftrace
