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

#include "cftrace/bohm.hpp"

#include <algorithm>
#include <complex>

#include "cftrace/networks.hpp"

namespace cftrace {

namespace {

struct PathStats {
    double max_prob{0};
    double sum_prob{0};
};

PathStats stats(const NetworkSpec& spec) {
    PathStats s;
    for (const auto& a : path_amplitudes(spec).fwd) {
        const double p = std::norm(a);
        s.max_prob = std::max(s.max_prob, p);
        s.sum_prob += p;
    }
    return s;
}

}  // namespace

BohmReport bohm_estimate(const NetworkSpec& spec) {
    BohmReport r;
    r.flagged = spec.kind != NetworkKind::Li;
    NetworkSpec other = spec;
    other.bit = 1 - spec.bit;
    const PathStats mine = stats(spec);
    const PathStats theirs = stats(other);
    r.max_path_prob = mine.max_prob;
    r.counterfactual_prob = 1 - mine.max_prob;
    const double own = 2 * mine.sum_prob;
    const double alt = 2 * theirs.sum_prob;
    r.cross_bit0 = spec.bit == 0 ? own : alt;
    r.cross_bit1 = spec.bit == 0 ? alt : own;
    r.cross_expectation = (r.cross_bit0 + r.cross_bit1) / 2;
    return r;
}

}  // namespace cftrace
