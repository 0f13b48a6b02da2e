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

#include "cftrace/metrics.hpp"

#include <cmath>
#include <numbers>

#include "cftrace/networks.hpp"

namespace cftrace {

namespace {

using std::numbers::pi;

constexpr double kMaxRegimeEps = 0.05;

double pi4() { return pi * pi * pi * pi; }

double ratio(double value, double standard) {
    if (standard > 0) return value / standard;
    return value > 0 ? INFINITY : 0.0;
}

}  // namespace

Standard single_particle_standard(int n_paths, const ProbeModel& probe) {
    if (n_paths < 1) throw ConfigError("single-particle standard needs n_paths >= 1");
    NetworkSpec spec;
    spec.kind = NetworkKind::SimpleChannel;
    spec.N = n_paths;
    const Network net = build(spec);
    const auto& port = net.ports[net.detector("D1").port];
    const BranchedState joint =
        propagate(net, Coupling::uniform(net, probe.epsilon, Truncation::FirstOrder));
    const PostSelection sel = post_select(joint, port);
    const auto weak = path_amplitudes(spec).weak_values();
    return Standard{n_paths, trace_detect_prob(sel.channel), shift_sum(weak, probe.delta)};
}

std::string_view to_string(FormulaId id) {
    switch (id) {
        case FormulaId::ZenoBit0Trace:
            return "zeno_bit0_trace";
        case FormulaId::SalihBit0Trace:
            return "salih_bit0_trace";
        case FormulaId::SalihBit0Shift:
            return "salih_bit0_shift";
        case FormulaId::LiBit0Trace:
            return "li_bit0_trace";
        case FormulaId::LiBit0Shift:
            return "li_bit0_shift";
        case FormulaId::LiBit1Trace:
            return "li_bit1_trace";
        case FormulaId::LiBit1Shift:
            return "li_bit1_shift";
        case FormulaId::SalihFailBit1:
            return "salih_fail_bit1";
        case FormulaId::SalihFailBit0:
            return "salih_fail_bit0";
        case FormulaId::SalihError:
            return "salih_error";
        case FormulaId::BohmCrossExpect:
            return "bohm_cross_expect";
    }
    return "?";
}

FormulaId parse_formula(std::string_view s) {
    for (FormulaId id : kAllFormulas)
        if (to_string(id) == s) return id;
    throw ConfigError("unknown formula '" + std::string(s) + "'");
}

double eval_asymptotic(FormulaId id, int M, int N, double eps, double delta) {
    const double m = M, n = N, e2 = eps * eps;
    switch (id) {
        case FormulaId::ZenoBit0Trace:
            return 3 * e2 * n / 8;
        case FormulaId::SalihBit0Trace:
            return e2 * pi4() * n / (128 * m * m * m);
        case FormulaId::SalihBit0Shift:
        case FormulaId::LiBit0Shift:
            return delta * pi * pi * n / (16 * m);
        case FormulaId::LiBit0Trace:
            return e2 * pi4() * n / (256 * m * m * m);
        case FormulaId::LiBit1Trace:
            return 3 * e2 * pi4() * m / (64 * n * n * n);
        case FormulaId::LiBit1Shift:
            return delta * pi * pi * m / (4 * n);
        case FormulaId::SalihFailBit1:
            return pi * pi * m / (4 * n);
        case FormulaId::SalihFailBit0:
            return pi * pi / 4 * (m / n + 1 / m);
        case FormulaId::SalihError:
            return pi * pi / (4 * m * m);
        case FormulaId::BohmCrossExpect:
            return pi * pi / 4 * (m / n + n / (4 * m));
    }
    throw ConfigError("unknown formula id");
}

std::vector<std::string> regime_warnings(FormulaId id, int M, int N, double eps) {
    std::vector<std::string> out;
    auto need = [&](bool ok, const std::string& what) {
        if (!ok) out.push_back(std::string(to_string(id)) + ": outside regime, needs " + what);
    };
    switch (id) {
        case FormulaId::ZenoBit0Trace:
            need(N >= 100, "N >= 100");
            break;
        case FormulaId::SalihBit0Trace:
        case FormulaId::SalihBit0Shift:
        case FormulaId::SalihFailBit1:
        case FormulaId::SalihFailBit0:
        case FormulaId::SalihError:
            need(M >= 8, "M >= 8");
            need(N >= 10 * M, "N >= 10 M");
            break;
        case FormulaId::LiBit0Trace:
        case FormulaId::LiBit0Shift:
        case FormulaId::LiBit1Trace:
        case FormulaId::LiBit1Shift:
            need(M >= 8 && N >= 8, "M, N >= 8");
            need(M % 2 == 0 && N % 2 == 0, "M, N even");
            break;
        case FormulaId::BohmCrossExpect:
            need(M >= 16 && N >= 16, "M, N >= 16");
            need(M % 2 == 0 && N % 2 == 0, "M, N even");
            break;
    }
    need(eps <= kMaxRegimeEps, "eps <= 0.05");
    return out;
}

Verdict classify(double detect_ratio, double shift_ratio) {
    const bool detect_below = detect_ratio < 1 - kVerdictBand;
    const bool shift_below = shift_ratio < 1 - kVerdictBand;
    if (detect_below && shift_below) return Verdict::Counterfactual;
    if (!detect_below && !shift_below) return Verdict::NotCounterfactual;
    return Verdict::Mixed;
}

TraceReport compare(const NetworkSpec& spec, const ProbeModel& probe) {
    switch (spec.kind) {
        case NetworkKind::ZenoChain:
        case NetworkKind::NestedMzi3:
        case NetworkKind::Salih:
        case NetworkKind::Li:
            break;
        default:
            throw UnsupportedKind("compare: kind '" + std::string(to_string(spec.kind)) +
                                  "' has no channel to compare");
    }
    const Network net = build(spec);
    TraceReport r;
    r.spec = spec;
    r.probe = probe;
    r.detector = expected_detector(spec);
    const BranchedState joint =
        propagate(net, Coupling::uniform(net, probe.epsilon, Truncation::FirstOrder));
    const PostSelection sel = post_select(joint, net.ports[net.detector(r.detector).port]);
    r.postselect_prob = sel.prob;
    r.trace_detect_prob = trace_detect_prob(sel.channel);

    const PathAmplitudeTable table = path_amplitudes(spec, r.detector);
    const auto weak = table.weak_values();
    for (std::size_t k = 0; k < weak.size(); ++k) r.weak_values.emplace_back(table.paths[k], weak[k]);
    r.shift_sum = shift_sum(weak, probe.delta);

    r.n_paths = channel_path_count(spec);
    const Standard standard = single_particle_standard(r.n_paths, probe);
    r.standard_detect = standard.detect_prob;
    r.standard_shift = standard.shift_sum;
    r.detect_ratio = ratio(r.trace_detect_prob, r.standard_detect);
    r.shift_ratio = ratio(r.shift_sum, r.standard_shift);
    r.verdict = classify(r.detect_ratio, r.shift_ratio);

    auto attach = [&](std::optional<FormulaId> trace, std::optional<FormulaId> shift) {
        for (auto [id, slot] : {std::pair{trace, &r.formula_trace}, std::pair{shift, &r.formula_shift}}) {
            if (!id) continue;
            *slot = eval_asymptotic(*id, spec.M, spec.N, probe.epsilon, probe.delta);
            for (auto& w : regime_warnings(*id, spec.M, spec.N, probe.epsilon))
                r.warnings.push_back(std::move(w));
        }
    };
    if (spec.kind == NetworkKind::ZenoChain && spec.bit == 0 && spec.elements.empty())
        attach(FormulaId::ZenoBit0Trace, std::nullopt);
    if (spec.kind == NetworkKind::Salih && spec.bit == 0 && spec.elements.empty() &&
        !spec.side_mirror_t3)
        attach(FormulaId::SalihBit0Trace, FormulaId::SalihBit0Shift);
    if (spec.kind == NetworkKind::Li && spec.elements.empty()) {
        if (spec.bit == 0) attach(FormulaId::LiBit0Trace, FormulaId::LiBit0Shift);
        else attach(FormulaId::LiBit1Trace, FormulaId::LiBit1Shift);
    }
    return r;
}

}  // namespace cftrace
