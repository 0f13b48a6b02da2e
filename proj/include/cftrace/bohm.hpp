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

#include "cftrace/network_spec.hpp"

namespace cftrace {

/// Amplitude-based crossing estimates: a channel path's probability is the
/// squared forward amplitude there.
struct BohmReport {
    /// Largest single-path probability for the spec's bit.
    double max_path_prob{0};
    double counterfactual_prob{1};
    /// Expected channel crossings, averaged over both bits. Every traversal
    /// of a path is a round trip and counts twice.
    double cross_expectation{0};
    double cross_bit0{0};
    double cross_bit1{0};
    /// Set when the kind is not Li; the numbers then come from the same
    /// recipe but the closed forms do not apply.
    bool flagged{false};
};

BohmReport bohm_estimate(const NetworkSpec& spec);

}  // namespace cftrace
