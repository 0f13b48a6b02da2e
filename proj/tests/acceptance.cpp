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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "cftrace/adversary.hpp"
#include "cftrace/bohm.hpp"
#include "cftrace/metrics.hpp"
#include "cftrace/mode_core.hpp"
#include "cftrace/networks.hpp"

using namespace cftrace;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int id, const char* title, bool ok, const std::string& detail) {
    std::printf("%s criterion %2d  %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

NetworkSpec spec_of(NetworkKind kind, int M, int N, int bit) {
    NetworkSpec s;
    s.kind = kind;
    s.M = M;
    s.N = N;
    s.bit = bit;
    return s;
}

double rel(double value, double target) { return std::abs(value / target - 1); }

void chain_closed_form() {
    double worst = 0;
    for (int N : {2, 10, 100, 1000}) {
        const double a = pi / (2 * N);
        auto s = ModeStated::prepare({"L", "R"}, "L");
        for (int n = 1; n <= N; ++n) {
            s = apply_beam_splitter(s, BeamSplitterd{a});
            worst = std::max(worst, std::abs(s.amp("L") - std::cos(n * a)));
            worst = std::max(worst, std::abs(s.amp("R") - std::sin(n * a)));
        }
    }
    report(1, "chain closed form", worst < 1e-12, fmt("max deviation %.2e (tol 1e-12)", worst));
}

void zeno_survival() {
    double worst = 0;
    for (int N : {2, 10, 100, 1000}) {
        const double p = simulate(spec_of(NetworkKind::ZenoChain, 0, N, 1), ProbeModel{}).prob("D1");
        worst = std::max(worst, std::abs(p - std::pow(std::cos(pi / (2 * N)), 2 * N)));
    }
    const int N = 1000;
    const double loss = 1 - simulate(spec_of(NetworkKind::ZenoChain, 0, N, 1), ProbeModel{}).prob("D1");
    const double r = rel(loss, pi * pi / (4 * N));
    report(2, "Zeno survival", worst < 1e-12 && r < 0.01,
           fmt("max |P - cos^2N| %.2e (tol 1e-12); N=1000 loss/(pi^2/4N) off by %.3f%% (tol 1%%)", worst,
               100 * r));
}

void salih_success() {
    double worst1 = 0, worst0 = 0;
    for (int M : {2, 4, 8, 12, 16})
        for (int N : {10, 100, 1000, 2000}) {
            const double zeno = std::pow(std::cos(pi / (2 * N)), 2.0 * (M - 1) * N);
            const double d2 = simulate(spec_of(NetworkKind::Salih, M, N, 1), ProbeModel{}).prob("D2");
            const double d1 = simulate(spec_of(NetworkKind::Salih, M, N, 0), ProbeModel{}).prob("D1");
            worst1 = std::max(worst1, std::abs(d2 - zeno));
            worst0 = std::max(worst0, std::abs(d1 - zeno * std::pow(std::cos(pi / (2 * M)), 2.0 * M)));
        }
    const int M = 10, N = 1000;
    const double failure = 1 - simulate(spec_of(NetworkKind::Salih, M, N, 0), ProbeModel{}).prob("D1");
    const double target = pi * pi / 4 * (double(M) / N + 1.0 / M);
    const double r = rel(failure, target);
    report(3, "Salih success/failure", worst1 < 1e-10 && worst0 < 1e-10 && r < 0.10,
           fmt("bit1 D2 dev %.2e, bit0 D1 dev %.2e (tol 1e-10); bit0 failure %.4f vs %.4f, off by %.1f%% (tol 10%%)",
               worst1, worst0, failure, target, 100 * r));
}

void single_particle() {
    const double e = 0.01;
    double worst = 0, worst_oracle = 0, worst_shift = 0;
    for (int n : {1, 2, 4, 16}) {
        const auto probe = ProbeModel::from_epsilon(e);
        const auto s = single_particle_standard(n, probe);
        worst = std::max(worst, rel(s.detect_prob, e * e / n));
        worst_shift = std::max(worst_shift, std::abs(s.shift_sum - probe.delta));
        if (n <= kMaxExactProbes) {
            NetworkSpec spec;
            spec.kind = NetworkKind::SimpleChannel;
            spec.N = n;
            const double exact = trace_detect_prob(post_select(exact_oracle_simulate(spec, e), "D").channel);
            worst_oracle = std::max(worst_oracle, rel(s.detect_prob, exact));
        }
    }
    report(4, "single-particle standard", worst < 0.01 && worst_oracle < 1e-6 && worst_shift < 1e-10,
           fmt("max rel dev from eps^2/n %.2e (tol 1e-2); vs exact oracle %.2e; shift dev %.2e (tol 1e-10)", worst,
               worst_oracle, worst_shift));
}

void nested_three() {
    const double e = 0.01;
    const auto ch = nested_mzi3_channel_state(Element::Free, ProbeModel::from_epsilon(e), "D1");
    const double d0 = std::abs(ch.amp(0, 0) - std::sqrt(1 - e * e));
    const double d1 = ch.branch_count() > 1 ? std::abs(ch.amp(0, 1) - e) : 1.0;
    const double dev = std::max(d0, d1);
    report(5, "nested 3-path MZI channel state", dev < 1e-10, fmt("max deviation %.2e (tol 1e-10)", dev));
}

void zeno_trace() {
    const double e = 0.01;
    const int N = 200;
    const auto r = compare(spec_of(NetworkKind::ZenoChain, 0, N, 0), ProbeModel::from_epsilon(e));
    const double target = 3 * e * e * N / 8;
    const double d = rel(r.trace_detect_prob, target);
    report(6, "Zeno bit-0 trace", d < 0.05,
           fmt("%.4e vs %.4e, off by %.2f%% (tol 5%%)", r.trace_detect_prob, target, 100 * d));
}

void salih_trace() {
    const double e = 0.01;
    const int M = 8, N = 800;
    const auto r = compare(spec_of(NetworkKind::Salih, M, N, 0), ProbeModel::from_epsilon(e));
    const double t = e * e * std::pow(pi, 4) * N / (128.0 * M * M * M);
    const double s = r.probe.delta * pi * pi * N / (16.0 * M);
    const double dt = rel(r.trace_detect_prob, t), ds = rel(r.shift_sum, s);
    report(7, "Salih bit-0 trace and shift", dt < 0.20 && ds < 0.15,
           fmt("trace %.4e vs %.4e (%.1f%%, tol 20%%); shift %.4f vs %.4f (%.1f%%, tol 15%%)", r.trace_detect_prob, t,
               100 * dt, r.shift_sum, s, 100 * ds));
}

void li_traces() {
    const double e = 0.001;
    double worst_t[2] = {0, 0}, worst_s[2] = {0, 0};
    int checked = 0;
    for (int M : {16, 32, 64})
        for (int N : {16, 32, 64})
            for (int bit : {0, 1}) {
                const auto r = compare(spec_of(NetworkKind::Li, M, N, bit), ProbeModel::from_epsilon(e));
                if (!r.warnings.empty()) continue;
                ++checked;
                const double t = bit ? 3 * e * e * std::pow(pi, 4) * M / (64.0 * N * N * N)
                                     : e * e * std::pow(pi, 4) * N / (256.0 * M * M * M);
                const auto f = bit ? FormulaId::LiBit1Shift : FormulaId::LiBit0Shift;
                worst_t[bit] = std::max(worst_t[bit], rel(r.trace_detect_prob, t));
                worst_s[bit] = std::max(worst_s[bit], rel(r.shift_sum, eval_asymptotic(f, M, N, e, r.probe.delta)));
            }
    const bool ok = checked == 18 && worst_t[0] < 0.20 && worst_t[1] < 0.20 && worst_s[0] < 0.15 && worst_s[1] < 0.15;
    report(8, "Li traces and shifts", ok,
           fmt("%d grid points; worst trace deviation bit0 %.0f%% bit1 %.0f%% (tol 20%%); worst shift deviation "
               "bit0 %.1f%% bit1 %.1f%% (tol 15%%)",
               checked, 100 * worst_t[0], 100 * worst_t[1], 100 * worst_s[0], 100 * worst_s[1]));
}

void verdict_reversal() {
    const auto p = ProbeModel::from_epsilon(0.001);
    std::string forward, backward;
    for (int M : {8, 16, 32, 64})
        for (int N : {8, 16, 32, 64}) {
            const auto v0 = compare(spec_of(NetworkKind::Li, M, N, 0), p).verdict;
            const auto v1 = compare(spec_of(NetworkKind::Li, M, N, 1), p).verdict;
            const std::string at = fmt("(M=%d,N=%d)", M, N);
            if (forward.empty() && v0 == Verdict::Counterfactual && v1 == Verdict::NotCounterfactual) forward = at;
            if (backward.empty() && v0 == Verdict::NotCounterfactual && v1 == Verdict::Counterfactual) backward = at;
        }
    const auto s = compare(spec_of(NetworkKind::Salih, 8, 800, 1), ProbeModel::from_epsilon(0.01));
    const bool salih_ok = s.verdict == Verdict::Counterfactual && s.trace_detect_prob == 0 && s.detector == "D2";
    report(9, "verdict reversal", !forward.empty() && !backward.empty() && salih_ok,
           fmt("Li bit0 below/bit1 above at %s; bit0 above/bit1 below at %s; Salih bit1 '%s' with trace %.1e given %s",
               forward.empty() ? "none" : forward.c_str(), backward.empty() ? "none" : backward.c_str(),
               std::string(to_string(s.verdict)).c_str(), s.trace_detect_prob, s.detector.c_str()));
}

double first_order_vs_exact(const NetworkSpec& spec, double e) {
    const auto net = build(spec);
    const auto first = propagate(net, Coupling::uniform(net, e, Truncation::FirstOrder));
    const auto exact = exact_oracle_simulate(spec, e);
    std::vector<Index> mask_to_first(static_cast<std::size_t>(exact.branch_count()), -1);
    for (Index b = 0; b < first.branch_count(); ++b) {
        Index mask = 0;
        for (auto k : first.branch_tags(b)) mask |= Index(1) << k;
        mask_to_first[static_cast<std::size_t>(mask)] = b;
    }
    double worst = 0;
    for (Index m = 0; m < exact.branch_count(); ++m)
        for (Index p = 0; p < static_cast<Index>(net.ports.size()); ++p) {
            const Index b = mask_to_first[static_cast<std::size_t>(m)];
            const Complex y = b >= 0 ? first.amp(p, b) : Complex(0);
            worst = std::max(worst, std::abs(exact.amp(p, m) - y));
        }
    return worst;
}

void oracle_equivalence() {
    const double e = 0.01;
    std::vector<NetworkSpec> specs;
    for (int n = 1; n <= 14; ++n) specs.push_back(spec_of(NetworkKind::SimpleChannel, 0, n, 0));
    for (int bit : {0, 1}) {
        specs.push_back(spec_of(NetworkKind::IfmMzi, 0, 2, bit));
        specs.push_back(spec_of(NetworkKind::HwpMzi, 0, 2, bit));
        specs.push_back(spec_of(NetworkKind::NestedMzi3, 0, 0, bit));
        for (int N = 2; N <= 15; ++N) specs.push_back(spec_of(NetworkKind::ZenoChain, 0, N, bit));
        for (int M = 2; M <= 15; ++M)
            for (int N = 2; N <= 15; ++N) {
                if ((M - 1) * (N - 1) > kMaxExactProbes) continue;
                specs.push_back(spec_of(NetworkKind::Salih, M, N, bit));
                if (M % 2 == 0 && N % 2 == 0) specs.push_back(spec_of(NetworkKind::Li, M, N, bit));
            }
    }
    double worst = 0;
    std::string where;
    for (const auto& s : specs) {
        const double d = first_order_vs_exact(s, e);
        if (d >= worst) {
            worst = d;
            where = fmt("%s M=%d N=%d bit=%d", std::string(to_string(s.kind)).c_str(), s.M, s.N, s.bit);
        }
    }
    report(10, "oracle equivalence", worst < 5 * e * e,
           fmt("%zu networks; max branch-amplitude deviation %.2e at %s (tol %.1e)", specs.size(), worst,
               where.c_str(), 5 * e * e));
}

void security() {
    double leak = 0;
    for (int M : {6, 8})
        for (int N : {10 * M, 50 * M}) {
            const auto spec = spec_of(NetworkKind::Salih, M, N, 1);
            for (int m = 1; m < M; ++m) {
                EveProbe chain;
                chain.chain = m;
                leak = std::max(leak, eve_joint_distribution(spec, chain).prob(true, "D2"));
                for (int n : {1, N / 2, N - 1}) {
                    EveProbe at;
                    at.path = {m, n};
                    leak = std::max(leak, eve_joint_distribution(spec, at).prob(true, "D2"));
                    at.mode = EveMode::Weak;
                    at.eps = 0.2;
                    leak = std::max(leak, eve_joint_distribution(spec, at).prob(true, "D2"));
                }
            }
        }
    const std::uint64_t rounds = 100000, seed = 20260101;
    const auto quiet = keydist_simulate(10, rounds, seed);
    EveProbe eve;
    eve.path = {1, 5};
    const auto tapped = keydist_simulate(10, rounds, seed, eve);
    const bool ok = leak <= 1e-12 && quiet.announced > 0 && quiet.errors == 0 && tapped.eve_on_announced > 0 &&
                    tapped.eve_on_correct == 0;
    report(11, "security", ok,
           fmt("max P(D2 & click) %.1e (tol 1e-12); no Eve: %llu announced, %llu errors; Eve: %llu announced with "
               "click, %llu of them correct bits",
               leak, static_cast<unsigned long long>(quiet.announced), static_cast<unsigned long long>(quiet.errors),
               static_cast<unsigned long long>(tapped.eve_on_announced),
               static_cast<unsigned long long>(tapped.eve_on_correct)));
}

void bohm() {
    const int M = 64, N = 64;
    const double b0 = bohm_estimate(spec_of(NetworkKind::Li, M, N, 0)).max_path_prob;
    const double b1 = bohm_estimate(spec_of(NetworkKind::Li, M, N, 1)).max_path_prob;
    const double t0 = pi * pi / (4.0 * M * M), t1 = pi * pi / (double(N) * N);
    const double cross = bohm_estimate(spec_of(NetworkKind::Li, 32, 32, 0)).cross_expectation;
    const double tc = pi * pi / 4 * (1 + 0.25);
    const double d0 = rel(b0, t0), d1 = rel(b1, t1), dc = rel(cross, tc);
    report(12, "Bohmian estimates", d0 < 0.10 && d1 < 0.10 && dc < 0.10,
           fmt("bit0 max %.3e vs %.3e (%.1f%%); bit1 max %.3e vs %.3e (%.1f%%); crossings %.4f vs %.4f (%.1f%%); tol 10%%",
               b0, t0, 100 * d0, b1, t1, 100 * d1, cross, tc, 100 * dc));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> criteria{chain_closed_form, zeno_survival,  salih_success,
                                                      single_particle,   nested_three,   zeno_trace,
                                                      salih_trace,       li_traces,      verdict_reversal,
                                                      oracle_equivalence, security,      bohm};
    for (const auto& c : criteria) {
        try {
            c();
        } catch (const std::exception& e) {
            std::printf("FAIL criterion: exception %s\n", e.what());
            ++failures;
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
