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

#include "cftrace/networks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/QR>

namespace cftrace {

namespace {

using std::numbers::pi;

constexpr const char* kAbsorbed = "absorbed";
constexpr const char* kSideLoss = "side_loss";
constexpr const char* kDiscarded = "discarded";
constexpr const char* kRejected = "rejected";

class Builder {
   public:
    explicit Builder(const NetworkSpec& spec) { net_.spec = spec; }

    Index port(const std::string& name) {
        net_.ports.push_back(name);
        return static_cast<Index>(net_.ports.size()) - 1;
    }

    Index group(const std::string& name) {
        const auto it = std::find(net_.sink_groups.begin(), net_.sink_groups.end(), name);
        if (it != net_.sink_groups.end()) return it - net_.sink_groups.begin();
        net_.sink_groups.push_back(name);
        return static_cast<Index>(net_.sink_groups.size()) - 1;
    }

    void source(Index p) { net_.source = p; }
    void detector(const std::string& name, Index p) { net_.detectors.push_back({name, p}); }
    void alias(const std::string& logical, const std::string& physical) {
        net_.aliases[logical] = physical;
    }

    void bs(Index left, Index right, double alpha) {
        net_.program.push_back({Instruction::Op::BeamSplitter, left, right, alpha});
    }

    void absorb(Index p, const std::string& sink) {
        Instruction ins{Instruction::Op::Absorb, p};
        ins.group = group(sink);
        net_.program.push_back(ins);
    }

    void mirror(Index p, double t3) {
        Instruction ins{Instruction::Op::LossyMirror, p, -1, t3};
        ins.group = group(kSideLoss);
        net_.program.push_back(ins);
    }

    void mix(std::vector<Index> ports, Eigen::MatrixXd m) {
        Instruction ins{Instruction::Op::Mix};
        ins.mix = net_.mix_matrices.size();
        net_.mix_ports.push_back(std::move(ports));
        net_.mix_matrices.push_back(std::move(m));
        net_.program.push_back(ins);
    }

    /// The particle crosses channel path `path` at port `p` on its way to Bob:
    /// the probe there couples, then Bob's element acts.
    void channel(PathId path, Index p) {
        Instruction ins{Instruction::Op::Tag, p};
        ins.probe = net_.probes.size();
        net_.probes.push_back(path);
        net_.program.push_back(ins);
        switch (element_at(net_.spec, path)) {
            case Element::Free:
                break;
            case Element::Shutter:
                absorb(p, kAbsorbed);
                break;
            case Element::Hwp:
                net_.program.push_back({Instruction::Op::Hwp, p});
                break;
        }
    }

    Network take() { return std::move(net_); }

   private:
    Network net_;
};

void build_simple(Builder& b, int paths) {
    // Sequential split-tag-merge: the source sheds 1/sqrt(n) into the path
    // port, the probe couples, and the path merges into Bob's collector with
    // running-average weights, so the collector projects onto the uniform
    // superposition of all paths.
    const Index src = b.port("S");
    const Index path = b.port("P");
    const Index collector = b.port("D");
    b.source(src);
    for (int k = 1; k <= paths; ++k) {
        b.bs(src, path, std::asin(1.0 / std::sqrt(static_cast<double>(paths - k + 1))));
        b.channel({1, k}, path);
        b.bs(path, collector, std::asin(std::sqrt(1.0 / k)));
        b.absorb(path, kRejected);
    }
    b.detector("D1", collector);
}

void build_chain(Builder& b, int n_splitters) {
    const Index left = b.port("L");
    const Index right = b.port("R");
    b.source(left);
    const double alpha = pi / (2.0 * n_splitters);
    for (int n = 1; n <= n_splitters; ++n) {
        b.bs(left, right, alpha);
        if (n < n_splitters) b.channel({1, n}, right);
    }
    b.detector("D1", left);
    b.detector("D2", right);
}

void build_nested3(Builder& b) {
    const Index a = b.port("A");
    const Index bb = b.port("B");
    const Index c = b.port("C");
    b.source(a);
    b.mix({a, bb, c}, nested_mzi3_input_splitter());
    b.channel({1, 1}, a);
    b.mix({a, bb, c}, nested_mzi3_output_splitter());
    b.detector("D1", a);
    b.detector("D2", bb);
    b.detector("D3", c);
}

/// Outer chain of M splitters at pi/2M; between consecutive outer splitters
/// the right arm runs through an inner chain of N splitters at `inner_alpha`
/// whose right output is discarded on Bob's side, and the left arm bounces off
/// a side mirror of transmittance `t3` (skipped when zero).
void build_nested_chains(Builder& b, int M, int N, double inner_alpha, double t3) {
    const Index outer_l = b.port("outer.L");
    const Index outer_r = b.port("outer.R");
    b.source(outer_l);
    const double outer_alpha = pi / (2.0 * M);
    for (int m = 1; m <= M; ++m) {
        b.bs(outer_l, outer_r, outer_alpha);
        if (m == M) break;
        const std::string chain = "chain[" + std::to_string(m) + "]";
        b.alias(chain + ".L", "outer.R");
        const Index inner_r = b.port(chain + ".R");
        for (int n = 1; n <= N; ++n) {
            b.bs(outer_r, inner_r, inner_alpha);
            if (n < N) b.channel({m, n}, inner_r);
        }
        b.absorb(inner_r, kDiscarded);
        if (t3 > 0) b.mirror(outer_l, t3);
    }
    b.detector("D1", outer_l);
    b.detector("D2", outer_r);
}

}  // namespace

Eigen::MatrixXd nested_mzi3_input_splitter() {
    // Any orthogonal completion works: only the first input is ever lit.
    Eigen::Vector3d v = Eigen::Vector3d::Ones() / std::sqrt(3.0);
    const Eigen::MatrixXd vm = v;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(vm);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(3, 3);
    if (q.col(0).dot(v) < 0) q.col(0) *= -1;
    return q;
}

Eigen::Matrix3d nested_mzi3_output_splitter() {
    const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0), s6 = std::sqrt(6.0);
    Eigen::Matrix3d m;
    // rows D1, D2, D3; columns A, B, C
    m << 1 / s3, -1 / s3, 1 / s3,
        -1 / s6, 1 / s6, std::sqrt(2.0 / 3.0),
        1 / s2, 1 / s2, 0;
    return m;
}

const Detector& Network::detector(std::string_view name) const {
    for (const auto& d : detectors)
        if (d.name == name) return d;
    throw ConfigError("network has no detector '" + std::string(name) + "'");
}

std::size_t Network::probe_index(PathId path) const {
    const auto it = std::find(probes.begin(), probes.end(), path);
    if (it == probes.end()) throw ConfigError("path " + to_string(path) + " is not a channel path");
    return static_cast<std::size_t>(it - probes.begin());
}

Network build(const NetworkSpec& spec) {
    validate(spec);
    Builder b(spec);
    switch (spec.kind) {
        case NetworkKind::SimpleChannel:
            build_simple(b, std::max(spec.N, 1));
            break;
        case NetworkKind::IfmMzi:
        case NetworkKind::HwpMzi:
            build_chain(b, 2);
            break;
        case NetworkKind::ZenoChain:
            build_chain(b, spec.N);
            break;
        case NetworkKind::NestedMzi3:
            build_nested3(b);
            break;
        case NetworkKind::Salih: {
            const double t3 = spec.side_mirror_t3.value_or(
                1.0 - std::pow(std::cos(pi / (2.0 * spec.N)), 2.0 * spec.N));
            build_nested_chains(b, spec.M, spec.N, pi / (2.0 * spec.N), t3);
            break;
        }
        case NetworkKind::Li:
            build_nested_chains(b, spec.M, spec.N, pi / spec.N, 0.0);
            break;
    }
    return b.take();
}

Coupling Coupling::uniform(const Network& net, double eps, Truncation t) {
    return Coupling{t, std::vector<double>(net.probes.size(), eps), {}};
}

BranchedState propagate(const Network& net, const Coupling& coupling) {
    if (coupling.eps.size() != net.probes.size())
        throw ConfigError("coupling must give one epsilon per channel path");
    std::vector<PathId> state_probes;
    std::vector<int> slot(net.probes.size(), -1);
    if (!coupling.pointer.empty()) {
        if (coupling.pointer.size() != net.probes.size())
            throw ConfigError("coupling must give one pointer index per channel path");
        int count = 0;
        for (std::size_t k = 0; k < net.probes.size(); ++k) {
            slot[k] = coupling.pointer[k];
            count = std::max(count, slot[k] + 1);
        }
        state_probes.assign(count, PathId{});
        for (std::size_t k = net.probes.size(); k-- > 0;)
            if (slot[k] >= 0) state_probes[slot[k]] = net.probes[k];
    } else {
        // Exact mode expands only over probes that actually couple.
        for (std::size_t k = 0; k < net.probes.size(); ++k) {
            if (coupling.truncation == Truncation::FirstOrder || coupling.eps[k] > 0) {
                slot[k] = static_cast<int>(state_probes.size());
                state_probes.push_back(net.probes[k]);
            }
        }
    }
    auto state = BranchedState::prepare(net.ports, net.ports[net.source], net.sink_groups,
                                        state_probes, coupling.truncation);
    if (coupling.truncation == Truncation::FirstOrder) {
        const auto coupled = std::count_if(coupling.eps.begin(), coupling.eps.end(),
                                           [](double e) { return e > 0; });
        state.reserve_branches(1 + coupled);
    }
    for (const auto& ins : net.program) {
        switch (ins.op) {
            case Instruction::Op::BeamSplitter:
                state.beam_splitter(ins.a, ins.b, ins.value);
                break;
            case Instruction::Op::Hwp:
                state.hwp(ins.a);
                break;
            case Instruction::Op::Absorb:
                state.absorb(ins.a, ins.group);
                break;
            case Instruction::Op::LossyMirror:
                state.lossy_mirror(ins.a, ins.value, ins.group);
                break;
            case Instruction::Op::Mix:
                state.mix(net.mix_ports[ins.mix], net.mix_matrices[ins.mix]);
                break;
            case Instruction::Op::Tag:
                if (coupling.eps[ins.probe] > 0 && slot[ins.probe] >= 0)
                    state.tag(static_cast<std::size_t>(slot[ins.probe]), ins.a,
                              coupling.eps[ins.probe]);
                break;
        }
    }
    state.check_finite();
    return state;
}

double SimulationResult::prob(std::string_view outcome) const {
    for (const auto& [name, p] : detector_probs)
        if (name == outcome) return p;
    for (const auto& [name, p] : sink_probs)
        if (name == outcome) return p;
    return 0;
}

SimulationResult simulate(const NetworkSpec& spec, const ProbeModel& probe, Truncation truncation) {
    const Network net = build(spec);
    BranchedState state = propagate(net, Coupling::uniform(net, probe.epsilon, truncation));
    SimulationResult out{{}, {}, std::move(state)};
    for (const auto& d : net.detectors) out.detector_probs.emplace_back(d.name, out.state.port_weight(d.port));
    for (Index g = 0; g < static_cast<Index>(net.sink_groups.size()); ++g)
        out.sink_probs.emplace_back(net.sink_groups[g], out.state.sink_weight(g));
    return out;
}

Complex PathAmplitudeTable::fwd_at(PathId p) const {
    const auto it = std::find(paths.begin(), paths.end(), p);
    if (it == paths.end()) throw ConfigError("path " + to_string(p) + " is not a channel path");
    return fwd[it - paths.begin()];
}

Complex PathAmplitudeTable::bwd_at(PathId p) const {
    const auto it = std::find(paths.begin(), paths.end(), p);
    if (it == paths.end()) throw ConfigError("path " + to_string(p) + " is not a channel path");
    return bwd[it - paths.begin()];
}

std::vector<Complex> PathAmplitudeTable::weak_values() const {
    std::vector<Complex> out(paths.size());
    for (std::size_t k = 0; k < paths.size(); ++k)
        out[k] = weak_value_projection(fwd[k], bwd[k], overlap);
    return out;
}

PathAmplitudeTable path_amplitudes(const NetworkSpec& spec, std::optional<std::string> detector) {
    const Network net = build(spec);
    PathAmplitudeTable t;
    t.detector = detector.value_or(expected_detector(spec));
    const Index d = net.detector(t.detector).port;
    t.paths = net.probes;
    t.fwd.assign(net.probes.size(), Complex(0));
    t.bwd.assign(net.probes.size(), Complex(0));

    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(static_cast<Index>(net.ports.size()));
    x(net.source) = 1.0;
    for (const auto& ins : net.program) {
        switch (ins.op) {
            case Instruction::Op::BeamSplitter:
                kernel::rotate_rows(x, ins.a, ins.b, ins.value);
                break;
            case Instruction::Op::Hwp:
                x(ins.a) = -x(ins.a);
                break;
            case Instruction::Op::Absorb:
                x(ins.a) = 0.0;
                break;
            case Instruction::Op::LossyMirror:
                x(ins.a) *= std::sqrt(1 - ins.value);
                break;
            case Instruction::Op::Mix:
                kernel::mix_rows(x, net.mix_ports[ins.mix], net.mix_matrices[ins.mix]);
                break;
            case Instruction::Op::Tag:
                t.fwd[ins.probe] = x(ins.a);
                break;
        }
    }
    t.overlap = x(d);

    // Transfer amplitudes: the detector covector pulled back through the
    // transposed program.
    Eigen::VectorXcd w = Eigen::VectorXcd::Zero(x.size());
    w(d) = 1.0;
    for (auto it = net.program.rbegin(); it != net.program.rend(); ++it) {
        const auto& ins = *it;
        switch (ins.op) {
            case Instruction::Op::BeamSplitter:
                kernel::rotate_rows(w, ins.a, ins.b, -ins.value);
                break;
            case Instruction::Op::Hwp:
                w(ins.a) = -w(ins.a);
                break;
            case Instruction::Op::Absorb:
                w(ins.a) = 0.0;
                break;
            case Instruction::Op::LossyMirror:
                w(ins.a) *= std::sqrt(1 - ins.value);
                break;
            case Instruction::Op::Mix:
                kernel::mix_rows(w, net.mix_ports[ins.mix], net.mix_matrices[ins.mix].transpose());
                break;
            case Instruction::Op::Tag:
                t.bwd[ins.probe] = w(ins.a);
                break;
        }
    }
    return t;
}

BranchedState nested_mzi3_channel_state(Element element, const ProbeModel& probe,
                                        const std::string& detector) {
    NetworkSpec spec;
    spec.kind = NetworkKind::NestedMzi3;
    spec.elements[{1, 1}] = element;
    const Network net = build(spec);
    const BranchedState joint = propagate(net, Coupling::uniform(net, probe.epsilon, Truncation::Exact));
    const auto& port = net.ports[net.detector(detector).port];
    return post_select(joint, port).channel;
}

BranchedState exact_oracle_simulate(const NetworkSpec& spec, double eps) {
    validate(spec);
    const int paths = channel_path_count(spec);
    if (paths > kMaxExactProbes)
        throw SizeError("exact oracle supports at most " + std::to_string(kMaxExactProbes) +
                        " channel paths, network has " + std::to_string(paths));
    if (!(eps >= 0 && eps < 1)) throw DomainError("epsilon must lie in [0, 1)");
    const Network net = build(spec);
    return propagate(net, Coupling::uniform(net, eps, Truncation::Exact));
}

}  // namespace cftrace
