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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cftrace/network_spec.hpp"
#include "cftrace/trace_model.hpp"

namespace cftrace {

/// One step of a compiled network. Port fields index live ports; `group`
/// indexes sink groups; `probe` indexes Network::probes.
struct Instruction {
    enum class Op { BeamSplitter, Hwp, Absorb, LossyMirror, Mix, Tag };
    Op op{Op::BeamSplitter};
    Index a{-1};
    Index b{-1};
    double value{0};
    std::size_t probe{0};
    Index group{-1};
    std::size_t mix{0};
};

struct Detector {
    std::string name;
    Index port{-1};
};

/// Compiled apparatus: live ports, sink groups, detectors and a linear
/// instruction list in propagation order. Immutable after build().
struct Network {
    NetworkSpec spec;
    std::vector<std::string> ports;
    std::vector<std::string> sink_groups;
    Index source{0};
    std::vector<Detector> detectors;
    /// Channel paths in the order the particle first reaches them.
    std::vector<PathId> probes;
    std::vector<Instruction> program;
    std::vector<std::vector<Index>> mix_ports;
    std::vector<Eigen::MatrixXd> mix_matrices;
    /// Logical port names that share a physical port, e.g. an inner chain's
    /// left arm is the outer interferometer's right arm.
    std::map<std::string, std::string> aliases;

    const Detector& detector(std::string_view name) const;
    std::size_t probe_index(PathId path) const;
};

Network build(const NetworkSpec& spec);

/// How the probes couple during one propagation: eps per network probe
/// (0 leaves the probe out).
struct Coupling {
    Truncation truncation{Truncation::FirstOrder};
    std::vector<double> eps;
    /// Optional: state probe index per network probe, -1 for uncoupled.
    /// Network probes sharing an index share one pointer.
    std::vector<int> pointer;

    static Coupling uniform(const Network& net, double eps, Truncation t);
};

BranchedState propagate(const Network& net, const Coupling& coupling);

struct SimulationResult {
    std::vector<std::pair<std::string, double>> detector_probs;
    std::vector<std::pair<std::string, double>> sink_probs;
    BranchedState state;

    double prob(std::string_view outcome) const;
};

SimulationResult simulate(const NetworkSpec& spec, const ProbeModel& probe,
                          Truncation truncation = Truncation::FirstOrder);

/// Uncoupled forward amplitudes at each channel path, amplitudes to reach
/// `detector` from each path, and <fin|in>.
struct PathAmplitudeTable {
    std::string detector;
    std::vector<PathId> paths;
    std::vector<Complex> fwd;
    std::vector<Complex> bwd;
    Complex overlap{0};

    Complex fwd_at(PathId p) const;
    Complex bwd_at(PathId p) const;
    std::vector<Complex> weak_values() const;
};

/// `detector` defaults to expected_detector(spec).
PathAmplitudeTable path_amplitudes(const NetworkSpec& spec,
                                   std::optional<std::string> detector = std::nullopt);

/// Post-selected channel state of the three-path nested interferometer.
BranchedState nested_mzi3_channel_state(Element element, const ProbeModel& probe,
                                        const std::string& detector);

/// Splitter matrices of the three-path nested interferometer:
/// source -> (A, B, C), then (A, B, C) -> (D1, D2, D3).
Eigen::MatrixXd nested_mzi3_input_splitter();
Eigen::Matrix3d nested_mzi3_output_splitter();

}  // namespace cftrace
