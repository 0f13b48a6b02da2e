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

// Passive eavesdropping: Eve measures the particle's presence on channel
// paths without absorbing it.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cftrace/network_spec.hpp"

namespace cftrace {

enum class EveMode { Weak, Projective };

std::string_view to_string(EveMode m);
EveMode parse_eve_mode(std::string_view s);

/// Eve sits on one channel path, or on every path of inner chain `chain`
/// (chain > 0). Projective mode ignores `eps`.
struct EveProbe {
    PathId path{1, 1};
    int chain{0};
    double eps{1};
    EveMode mode{EveMode::Projective};
};

struct EveOutcome {
    bool eve_click{false};
    /// Detector name ("D1", ...) or sink group ("absorbed", "side_loss", ...).
    std::string outcome;
    double prob{0};
};

struct EveJoint {
    int bit{0};
    std::vector<EveOutcome> entries;

    double prob(bool eve_click, std::string_view outcome) const;
    double prob_click() const;
    /// P(outcome | eve_click); 0 when Eve never clicks.
    double conditional(std::string_view outcome, bool eve_click = true) const;
};

/// Exact joint distribution of Eve's click and the final outcome.
EveJoint eve_joint_distribution(const NetworkSpec& spec, const EveProbe& eve);

enum class Outcome : std::uint8_t { D1, D2, Absorbed, Lost };
std::string_view to_string(Outcome o);

struct KeyRound {
    int alice_choice{0};
    int bob_choice{0};
    Outcome outcome{Outcome::Lost};
    bool announced{false};
    bool eve_click{false};
};

struct KeyReport {
    int N{0};
    std::uint64_t rounds{0};
    std::uint64_t seed{0};
    std::optional<EveProbe> eve;
    std::vector<KeyRound> log;
    std::uint64_t announced{0};
    std::uint64_t errors{0};
    std::uint64_t eve_clicks{0};
    /// Announced bits where Eve clicked and Alice and Bob agree.
    std::uint64_t eve_on_correct{0};
    /// Announced bits where Eve clicked.
    std::uint64_t eve_on_announced{0};
    double error_rate{0};
    /// Plug-in mutual information (bits) between Eve's observation and the
    /// key bit, over all announced rounds and over correct ones only.
    double mi_announced{0};
    double mi_correct{0};
    /// Exact per-round probability of an announcement.
    double announce_prob{0};
};

/// Two-chain counterfactual key distribution: Alice sends into one of two
/// identical N-splitter Zeno chains, Bob blocks every path of one of them,
/// Alice announces D1 clicks. Eve, if present, watches the same location on
/// both chains. Deterministic in `seed`.
KeyReport keydist_simulate(int N, std::uint64_t rounds, std::uint64_t seed,
                           std::optional<EveProbe> eve = std::nullopt);

/// Uniform double in [0, 1) for round `round` draw `k` of stream `seed`.
double round_uniform(std::uint64_t seed, std::uint64_t round, unsigned k);

}  // namespace cftrace
