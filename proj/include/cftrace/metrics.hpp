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

#include <string>
#include <string_view>
#include <vector>

#include "cftrace/network_spec.hpp"
#include "cftrace/trace_model.hpp"

namespace cftrace {

/// Trace left by one particle sent through an n-path channel and
/// post-selected on the uniform superposition.
struct Standard {
    int n_paths{1};
    double detect_prob{0};
    double shift_sum{0};
};

Standard single_particle_standard(int n_paths, const ProbeModel& probe);

enum class FormulaId {
    ZenoBit0Trace,
    SalihBit0Trace,
    SalihBit0Shift,
    LiBit0Trace,
    LiBit0Shift,
    LiBit1Trace,
    LiBit1Shift,
    SalihFailBit1,
    SalihFailBit0,
    SalihError,
    BohmCrossExpect,
};

inline constexpr FormulaId kAllFormulas[] = {
    FormulaId::ZenoBit0Trace, FormulaId::SalihBit0Trace, FormulaId::SalihBit0Shift,
    FormulaId::LiBit0Trace,   FormulaId::LiBit0Shift,    FormulaId::LiBit1Trace,
    FormulaId::LiBit1Shift,   FormulaId::SalihFailBit1,  FormulaId::SalihFailBit0,
    FormulaId::SalihError,    FormulaId::BohmCrossExpect,
};

/// Snake-case names, e.g. "salih_bit0_trace".
std::string_view to_string(FormulaId id);
FormulaId parse_formula(std::string_view s);

/// Closed-form asymptotic value. Parameters a formula does not use are ignored.
double eval_asymptotic(FormulaId id, int M, int N, double eps, double delta);

/// Empty when (M, N, eps) lies in the formula's validity regime; otherwise one
/// human-readable line per violated condition.
std::vector<std::string> regime_warnings(FormulaId id, int M, int N, double eps);

/// Simulated trace metrics of `spec` against the single-particle standard for
/// the same number of channel paths.
TraceReport compare(const NetworkSpec& spec, const ProbeModel& probe);

/// Relative band around ratio 1 that counts as "at the standard".
inline constexpr double kVerdictBand = 1e-9;

Verdict classify(double detect_ratio, double shift_ratio);

}  // namespace cftrace
