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

#include "cftrace/adversary.hpp"

#include <array>
#include <cmath>
#include <map>
#include <random>

#include "cftrace/networks.hpp"

namespace cftrace {

std::string_view to_string(EveMode m) { return m == EveMode::Weak ? "weak" : "projective"; }

EveMode parse_eve_mode(std::string_view s) {
    if (s == "weak") return EveMode::Weak;
    if (s == "projective") return EveMode::Projective;
    throw ConfigError("unknown eve mode '" + std::string(s) + "'");
}

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::D1:
            return "D1";
        case Outcome::D2:
            return "D2";
        case Outcome::Absorbed:
            return "absorbed";
        case Outcome::Lost:
            return "lost";
    }
    return "?";
}

double EveJoint::prob(bool eve_click, std::string_view outcome) const {
    double p = 0;
    for (const auto& e : entries)
        if (e.eve_click == eve_click && e.outcome == outcome) p += e.prob;
    return p;
}

double EveJoint::prob_click() const {
    double p = 0;
    for (const auto& e : entries)
        if (e.eve_click) p += e.prob;
    return p;
}

double EveJoint::conditional(std::string_view outcome, bool eve_click) const {
    double total = 0;
    for (const auto& e : entries)
        if (e.eve_click == eve_click) total += e.prob;
    return total > 0 ? prob(eve_click, outcome) / total : 0.0;
}

EveJoint eve_joint_distribution(const NetworkSpec& spec, const EveProbe& eve) {
    if (spec.kind != NetworkKind::Salih && spec.kind != NetworkKind::ZenoChain)
        throw UnsupportedKind("eve: Salih or ZenoChain networks only");
    const Network net = build(spec);
    if (!(eve.eps >= 0 && eve.eps <= 1)) throw ConfigError("eve coupling must lie in [0, 1]");
    std::vector<std::size_t> watched;
    if (eve.chain > 0) {
        for (std::size_t k = 0; k < net.probes.size(); ++k)
            if (net.probes[k].m == eve.chain) watched.push_back(k);
        if (watched.empty())
            throw ConfigError("eve location: no inner chain " + std::to_string(eve.chain));
    } else {
        watched.push_back(net.probe_index(eve.path));
    }

    Coupling c;
    c.eps.assign(net.probes.size(), 0.0);
    c.pointer.assign(net.probes.size(), -1);
    if (eve.mode == EveMode::Projective) {
        // Eve keeps the path of her first click. Full coupling empties the
        // untagged column at each watched path, and first-order bookkeeping
        // never re-tags a clicked branch, so each record is exact.
        c.truncation = Truncation::FirstOrder;
        for (std::size_t j = 0; j < watched.size(); ++j) {
            c.eps[watched[j]] = 1.0;
            c.pointer[watched[j]] = static_cast<int>(j);
        }
    } else {
        if (watched.size() > static_cast<std::size_t>(kMaxExactProbes))
            throw SizeError("weak eve: at most " + std::to_string(kMaxExactProbes) +
                            " watched paths");
        c.truncation = Truncation::Exact;
        for (std::size_t j = 0; j < watched.size(); ++j) {
            c.eps[watched[j]] = eve.eps;
            c.pointer[watched[j]] = static_cast<int>(j);
        }
    }
    const BranchedState state = propagate(net, c);

    EveJoint out;
    out.bit = spec.bit;
    const auto amps = state.amplitudes();
    const auto sinks = state.sink_weights();
    for (bool click : {false, true}) {
        auto weight = [&](auto&& col_weight) {
            double p = 0;
            for (Index b = 0; b < state.branch_count(); ++b)
                if ((b != 0) == click) p += col_weight(b);
            return p;
        };
        for (const auto& d : net.detectors)
            out.entries.push_back(
                {click, d.name, weight([&](Index b) { return std::norm(amps(d.port, b)); })});
        for (Index g = 0; g < static_cast<Index>(net.sink_groups.size()); ++g)
            out.entries.push_back(
                {click, net.sink_groups[g], weight([&](Index b) { return sinks(g, b); })});
    }
    return out;
}

namespace {

std::mt19937_64 round_stream(std::uint64_t seed, std::uint64_t round) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(round), static_cast<std::uint32_t>(round >> 32)};
    return std::mt19937_64(seq);
}

double uniform53(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

double round_uniform(std::uint64_t seed, std::uint64_t round, unsigned k) {
    auto gen = round_stream(seed, round);
    gen.discard(k);
    return uniform53(gen);
}

namespace {

/// Plug-in mutual information in bits from a joint count table.
template <std::size_t A, std::size_t B>
double mutual_information(const std::array<std::array<std::uint64_t, B>, A>& counts) {
    std::uint64_t total = 0;
    std::array<std::uint64_t, A> ra{};
    std::array<std::uint64_t, B> rb{};
    for (std::size_t i = 0; i < A; ++i)
        for (std::size_t j = 0; j < B; ++j) {
            total += counts[i][j];
            ra[i] += counts[i][j];
            rb[j] += counts[i][j];
        }
    if (total == 0) return 0;
    double mi = 0;
    for (std::size_t i = 0; i < A; ++i)
        for (std::size_t j = 0; j < B; ++j) {
            if (counts[i][j] == 0) continue;
            const double pij = static_cast<double>(counts[i][j]) / total;
            const double pi_ = static_cast<double>(ra[i]) / total;
            const double pj = static_cast<double>(rb[j]) / total;
            mi += pij * std::log2(pij / (pi_ * pj));
        }
    return std::max(mi, 0.0);
}

struct Cell {
    bool eve_click;
    Outcome outcome;
    double prob;
};

Outcome classify_outcome(const std::string& name) {
    if (name == "D1") return Outcome::D1;
    if (name == "D2") return Outcome::D2;
    if (name == "absorbed") return Outcome::Absorbed;
    return Outcome::Lost;
}

std::vector<Cell> round_table(int N, bool blocked, const std::optional<EveProbe>& eve) {
    NetworkSpec spec;
    spec.kind = NetworkKind::ZenoChain;
    spec.N = N;
    spec.bit = blocked ? 1 : 0;
    std::vector<Cell> cells;
    if (eve) {
        for (const auto& e : eve_joint_distribution(spec, *eve).entries)
            cells.push_back({e.eve_click, classify_outcome(e.outcome), e.prob});
    } else {
        const auto sim = simulate(spec, ProbeModel{});
        for (const auto& [name, p] : sim.detector_probs) cells.push_back({false, classify_outcome(name), p});
        for (const auto& [name, p] : sim.sink_probs) cells.push_back({false, classify_outcome(name), p});
    }
    return cells;
}

}  // namespace

KeyReport keydist_simulate(int N, std::uint64_t rounds, std::uint64_t seed,
                           std::optional<EveProbe> eve) {
    if (rounds < 1) throw ConfigError("keydist: rounds must be >= 1");
    if (N < 2) throw ConfigError("keydist: N >= 2");
    KeyReport r;
    r.N = N;
    r.rounds = rounds;
    r.seed = seed;
    r.eve = eve;
    const std::array<std::vector<Cell>, 2> tables{round_table(N, false, eve), round_table(N, true, eve)};
    for (const auto& table : tables) {
        double d1 = 0;
        for (const auto& c : table)
            if (c.outcome == Outcome::D1) d1 += c.prob;
        r.announce_prob += 0.5 * d1;
    }

    // Eve's observation: 0 = no click, 1 + chain she clicked on.
    std::array<std::array<std::uint64_t, 2>, 3> all{}, correct{};
    r.log.reserve(rounds);
    for (std::uint64_t k = 0; k < rounds; ++k) {
        KeyRound round;
        auto gen = round_stream(seed, k);
        round.alice_choice = uniform53(gen) < 0.5 ? 0 : 1;
        round.bob_choice = uniform53(gen) < 0.5 ? 0 : 1;
        const auto& table = tables[round.alice_choice == round.bob_choice ? 1 : 0];
        const double u = uniform53(gen);
        double acc = 0;
        const Cell* pick = nullptr;
        for (const auto& c : table) {
            if (c.prob <= 0) continue;
            pick = &c;
            acc += c.prob;
            if (u < acc) break;
        }
        if (pick) {
            round.outcome = pick->outcome;
            round.eve_click = pick->eve_click;
        }
        round.announced = round.outcome == Outcome::D1;
        if (round.eve_click) ++r.eve_clicks;
        if (round.announced) {
            ++r.announced;
            const bool agree = round.alice_choice == round.bob_choice;
            if (!agree) ++r.errors;
            if (round.eve_click) {
                ++r.eve_on_announced;
                if (agree) ++r.eve_on_correct;
            }
            const std::size_t obs = round.eve_click ? 1 + round.alice_choice : 0;
            ++all[obs][round.alice_choice];
            if (agree) ++correct[obs][round.alice_choice];
        }
        r.log.push_back(round);
    }
    r.error_rate = r.announced ? static_cast<double>(r.errors) / r.announced : 0.0;
    r.mi_announced = mutual_information(all);
    r.mi_correct = mutual_information(correct);
    return r;
}

}  // namespace cftrace
