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

// Weak-coupling probes on channel paths. Every probe is a two-level system
// spanned by its undisturbed Gaussian |Phi_0> and the orthogonal remainder
// |Phi_perp> left behind by a shift; the joint particle-probe state is a set
// of particle branches labeled by which probes were flipped.

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cftrace/mode_core.hpp"
#include "cftrace/network_spec.hpp"

namespace cftrace {

using Complex = std::complex<double>;

/// Below this post-selection probability weak values are undefined.
inline constexpr double kMinPostSelectProb = 1e-14;

/// Gaussian pointer: shift `delta`, width `width`, overlap parameter epsilon.
struct ProbeModel {
    double delta{0};
    double width{1};
    double epsilon{0};

    /// epsilon = sqrt(1 - exp(-delta^2 / width^2)).
    static ProbeModel from_shift(double delta, double width);
    /// Coupling given directly; delta is then the unit of shift (1, or 0 when
    /// eps == 0) and the width is chosen consistently.
    static ProbeModel from_epsilon(double eps);
};

double epsilon_from_probe(double delta, double width);

enum class Truncation { FirstOrder, Exact };

/// Joint particle-probe state.
///
/// Columns of `amplitudes()` are branches; rows are live ports. Weight that
/// left the interferometer is kept per branch and per sink group. Branch 0 is
/// always the untagged branch. In first-order mode each further branch
/// carries exactly one tag; in exact mode branch b is the tag subset whose
/// bitmask is b.
class BranchedState {
   public:
    BranchedState(std::vector<std::string> ports, std::vector<std::string> sink_groups,
                  std::vector<PathId> probes, Truncation truncation);

    /// Particle at `source` with every probe undisturbed.
    static BranchedState prepare(std::vector<std::string> ports, std::string_view source,
                                 std::vector<std::string> sink_groups, std::vector<PathId> probes,
                                 Truncation truncation);

    void reserve_branches(Index n);

    // In-place evolution; all ports are live-port row indices.
    void beam_splitter(Index left, Index right, double alpha);
    void hwp(Index port);
    void absorb(Index port, Index sink_group);
    void lossy_mirror(Index port, double t3, Index sink_group);
    void mix(std::span<const Index> ports, const Eigen::MatrixXd& m);
    /// Probe `probe` couples to the particle at `port`.
    void tag(std::size_t probe, Index port, double eps);

    Truncation truncation() const { return truncation_; }
    const std::vector<std::string>& ports() const { return ports_; }
    const std::vector<std::string>& sink_groups() const { return sink_groups_; }
    const std::vector<PathId>& probes() const { return probes_; }

    Index port_index(std::string_view name) const;
    Index sink_group_index(std::string_view name) const;

    Index branch_count() const { return active_; }
    /// Probe indices flipped in branch b (sorted).
    std::vector<std::size_t> branch_tags(Index b) const;

    auto amplitudes() const { return amps_.leftCols(active_); }
    auto sink_weights() const { return sinks_.leftCols(active_); }

    Complex amp(Index port, Index branch) const { return amps_(port, branch); }
    double total_weight() const;
    double port_weight(Index port) const;
    double sink_weight(Index group) const;
    /// Total weight of branch b (ports and sinks).
    double branch_weight(Index b) const;

    void check_finite() const;

   private:
    friend struct PostSelection post_select(const BranchedState&, std::string_view);

    Index column_for_probe(std::size_t probe);

    Truncation truncation_;
    std::vector<std::string> ports_;
    std::vector<std::string> sink_groups_;
    std::vector<PathId> probes_;
    Eigen::MatrixXcd amps_;
    Eigen::MatrixXd sinks_;
    Index active_{1};
    std::vector<Index> probe_column_;  // first-order: column of each probe's branch, -1 if none
};

/// Pure form of BranchedState::tag; `port` names a live port.
BranchedState tag_interaction(BranchedState state, std::size_t probe, std::string_view port,
                              double eps);

struct PostSelection {
    double prob{0};
    /// One row (the detector), branches renormalized to unit total weight.
    BranchedState channel;
};

/// Conditions on `detector` firing. Throws PostSelectionError when the
/// outcome has probability below kMinPostSelectProb.
PostSelection post_select(const BranchedState& state, std::string_view detector);

/// Probability that at least one probe is found flipped: tagged weight over
/// total weight.
double trace_detect_prob(const BranchedState& channel);

/// fwd * bwd / overlap. `bwd` is the amplitude to reach the post-selected
/// detector from the path; `overlap` = <fin|in>.
Complex weak_value_projection(Complex fwd, Complex bwd, Complex overlap);

/// delta * sum |w|.
double shift_sum(std::span<const Complex> weak_values, double delta);

/// Probability criterion vs shift criterion against the single-particle
/// standard.
enum class Verdict { Counterfactual, NotCounterfactual, Mixed };
std::string_view to_string(Verdict v);

struct TraceReport {
    NetworkSpec spec;
    ProbeModel probe;
    std::string detector;
    double postselect_prob{0};
    double trace_detect_prob{0};
    std::vector<std::pair<PathId, Complex>> weak_values;
    double shift_sum{0};
    int n_paths{0};
    double standard_detect{0};
    double standard_shift{0};
    double detect_ratio{0};
    double shift_ratio{0};
    Verdict verdict{Verdict::Mixed};
    /// Closed-form predictions for this network and bit, when one is known.
    std::optional<double> formula_trace;
    std::optional<double> formula_shift;
    /// Regime-guard diagnostics for the closed forms above.
    std::vector<std::string> warnings;
};

/// Exact tag-subset propagation of the whole particle + probes state, every
/// channel path coupled with `eps`. At most 14 channel paths.
BranchedState exact_oracle_simulate(const NetworkSpec& spec, double eps);

inline constexpr int kMaxExactProbes = 14;

}  // namespace cftrace
