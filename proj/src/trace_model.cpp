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

#include "cftrace/trace_model.hpp"

#include <algorithm>
#include <cmath>

namespace cftrace {

double epsilon_from_probe(double delta, double width) {
    if (!(width > 0) || !std::isfinite(width)) throw DomainError("probe width must be positive");
    if (!std::isfinite(delta)) throw DomainError("probe shift must be finite");
    const double r = delta / width;
    // 1 - exp(-r^2) without cancellation for small r.
    return std::sqrt(-std::expm1(-r * r));
}

ProbeModel ProbeModel::from_shift(double delta, double width) {
    return ProbeModel{delta, width, epsilon_from_probe(delta, width)};
}

ProbeModel ProbeModel::from_epsilon(double eps) {
    if (!(eps >= 0 && eps < 1)) throw DomainError("epsilon must lie in [0, 1)");
    if (eps == 0) return ProbeModel{0, 1, 0};
    return ProbeModel{1, 1 / std::sqrt(-std::log1p(-eps * eps)), eps};
}

BranchedState::BranchedState(std::vector<std::string> ports, std::vector<std::string> sink_groups,
                             std::vector<PathId> probes, Truncation truncation)
    : truncation_(truncation),
      ports_(std::move(ports)),
      sink_groups_(std::move(sink_groups)),
      probes_(std::move(probes)) {
    const auto rows = static_cast<Index>(ports_.size());
    const auto sink_rows = static_cast<Index>(sink_groups_.size());
    if (truncation_ == Truncation::Exact) {
        if (probes_.size() > static_cast<std::size_t>(kMaxExactProbes))
            throw SizeError("exact expansion supports at most " + std::to_string(kMaxExactProbes) +
                            " probes, got " + std::to_string(probes_.size()));
        active_ = Index(1) << probes_.size();
    } else {
        active_ = 1;
        probe_column_.assign(probes_.size(), -1);
    }
    amps_ = Eigen::MatrixXcd::Zero(rows, active_);
    sinks_ = Eigen::MatrixXd::Zero(sink_rows, active_);
}

BranchedState BranchedState::prepare(std::vector<std::string> ports, std::string_view source,
                                     std::vector<std::string> sink_groups,
                                     std::vector<PathId> probes, Truncation truncation) {
    BranchedState s(std::move(ports), std::move(sink_groups), std::move(probes), truncation);
    s.amps_(s.port_index(source), 0) = 1.0;
    return s;
}

void BranchedState::reserve_branches(Index n) {
    if (n <= amps_.cols()) return;
    amps_.conservativeResize(Eigen::NoChange, n);
    sinks_.conservativeResize(Eigen::NoChange, n);
    amps_.rightCols(n - active_).setZero();
    sinks_.rightCols(n - active_).setZero();
}

Index BranchedState::port_index(std::string_view name) const {
    const auto it = std::find(ports_.begin(), ports_.end(), name);
    if (it == ports_.end()) throw ConfigError("unknown port '" + std::string(name) + "'");
    return it - ports_.begin();
}

Index BranchedState::sink_group_index(std::string_view name) const {
    const auto it = std::find(sink_groups_.begin(), sink_groups_.end(), name);
    if (it == sink_groups_.end())
        throw ConfigError("unknown sink group '" + std::string(name) + "'");
    return it - sink_groups_.begin();
}

void BranchedState::beam_splitter(Index left, Index right, double alpha) {
    kernel::rotate_rows(amps_.leftCols(active_), left, right, alpha);
}

void BranchedState::hwp(Index port) { kernel::scale_row(amps_.leftCols(active_), port, -1.0); }

void BranchedState::absorb(Index port, Index sink_group) {
    sinks_.row(sink_group).head(active_) += amps_.row(port).head(active_).cwiseAbs2();
    amps_.row(port).head(active_).setZero();
}

void BranchedState::lossy_mirror(Index port, double t3, Index sink_group) {
    if (!(t3 >= 0 && t3 <= 1)) throw ConfigError("side mirror transmittance must lie in [0, 1]");
    sinks_.row(sink_group).head(active_) += t3 * amps_.row(port).head(active_).cwiseAbs2();
    amps_.row(port).head(active_) *= std::sqrt(1 - t3);
}

void BranchedState::mix(std::span<const Index> ports, const Eigen::MatrixXd& m) {
    kernel::mix_rows(amps_.leftCols(active_), ports, m);
}

Index BranchedState::column_for_probe(std::size_t probe) {
    if (probe_column_[probe] >= 0) return probe_column_[probe];
    if (active_ == amps_.cols()) reserve_branches(std::max<Index>(2 * active_, 8));
    probe_column_[probe] = active_;
    return active_++;
}

void BranchedState::tag(std::size_t probe, Index port, double eps) {
    if (probe >= probes_.size()) throw ConfigError("unknown probe index");
    if (port < 0 || port >= static_cast<Index>(ports_.size()))
        throw ConfigError("tagging needs a live port");
    if (!(eps >= 0 && eps <= 1)) throw DomainError("coupling must lie in [0, 1]");
    if (eps == 0) return;
    const double keep = std::sqrt(1 - eps * eps);
    if (truncation_ == Truncation::FirstOrder) {
        const Complex a = amps_(port, 0);
        if (a == Complex(0)) return;
        const Index col = column_for_probe(probe);
        amps_(port, 0) = keep * a;
        amps_(port, col) += eps * a;
        return;
    }
    // Exact: two-level rotation between subsets S and S + {probe}.
    const Index bit = Index(1) << probe;
    for (Index s = 0; s < active_; ++s) {
        if (s & bit) continue;
        const Complex a0 = amps_(port, s);
        const Complex a1 = amps_(port, s | bit);
        amps_(port, s) = keep * a0 - eps * a1;
        amps_(port, s | bit) = eps * a0 + keep * a1;
    }
}

std::vector<std::size_t> BranchedState::branch_tags(Index b) const {
    std::vector<std::size_t> out;
    if (truncation_ == Truncation::Exact) {
        for (std::size_t k = 0; k < probes_.size(); ++k)
            if (b & (Index(1) << k)) out.push_back(k);
        return out;
    }
    if (b == 0) return out;
    for (std::size_t k = 0; k < probe_column_.size(); ++k)
        if (probe_column_[k] == b) out.push_back(k);
    return out;
}

double BranchedState::total_weight() const {
    return amplitudes().squaredNorm() + sink_weights().sum();
}

double BranchedState::port_weight(Index port) const {
    return amps_.row(port).head(active_).squaredNorm();
}

double BranchedState::sink_weight(Index group) const { return sinks_.row(group).head(active_).sum(); }

double BranchedState::branch_weight(Index b) const {
    return amps_.col(b).squaredNorm() + sinks_.col(b).sum();
}

void BranchedState::check_finite() const {
    if (!amplitudes().allFinite() || !sink_weights().allFinite())
        throw DomainError("non-finite amplitude in branched state");
}

BranchedState tag_interaction(BranchedState state, std::size_t probe, std::string_view port,
                              double eps) {
    state.tag(probe, state.port_index(port), eps);
    return state;
}

PostSelection post_select(const BranchedState& state, std::string_view detector) {
    const Index d = state.port_index(detector);
    const double prob = state.port_weight(d);
    if (!(prob >= kMinPostSelectProb))
        throw PostSelectionError("post-selection on '" + std::string(detector) +
                                 "' is impossible (probability " + std::to_string(prob) + ")");
    BranchedState channel = state;
    channel.ports_ = {std::string(detector)};
    channel.sink_groups_.clear();
    channel.amps_ = state.amps_.row(d) / std::sqrt(prob);
    channel.sinks_.resize(0, state.amps_.cols());
    return PostSelection{prob, std::move(channel)};
}

double trace_detect_prob(const BranchedState& channel) {
    const double total = channel.total_weight();
    if (!(total > 0)) return 0;
    return (total - channel.branch_weight(0)) / total;
}

Complex weak_value_projection(Complex fwd, Complex bwd, Complex overlap) {
    if (std::norm(overlap) < kMinPostSelectProb)
        throw PostSelectionError("weak value undefined: pre- and post-selected states are orthogonal");
    return fwd * bwd / overlap;
}

double shift_sum(std::span<const Complex> weak_values, double delta) {
    double acc = 0;
    for (const auto& w : weak_values) acc += std::abs(w);
    return std::abs(delta) * acc;
}

std::string_view to_string(Verdict v) {
    switch (v) {
        case Verdict::Counterfactual:
            return "counterfactual";
        case Verdict::NotCounterfactual:
            return "not counterfactual";
        case Verdict::Mixed:
            return "mixed";
    }
    return "mixed";
}

}  // namespace cftrace
