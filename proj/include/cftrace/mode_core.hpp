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

// Mode amplitudes for a single structureless particle in a network of
// beam splitters: named ports, real-rotation beam splitters, phase plates,
// absorbing shutters and partially transmitting mirrors.

#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "cftrace/errors.hpp"

namespace cftrace {

using Eigen::Index;

template <typename Scalar>
inline constexpr Scalar kConservationTol = Scalar(1e-10);
template <typename Scalar>
inline constexpr Scalar kIdentityTol = Scalar(1e-12);

/// Row kernels shared by ModeState and the branched network engine. Each acts
/// on every column of `amps`, so a column can be one branch of a joint state.
namespace kernel {

/// (l, r) -> (l cos a - r sin a, l sin a + r cos a)
template <typename Derived>
void rotate_rows(const Eigen::MatrixBase<Derived>& amps_, Index left, Index right,
                 typename Derived::RealScalar alpha) {
    auto& amps = const_cast<Eigen::MatrixBase<Derived>&>(amps_);
    using std::cos;
    using std::sin;
    const auto c = cos(alpha);
    const auto s = sin(alpha);
    for (Index j = 0; j < amps.cols(); ++j) {
        const auto l = amps(left, j);
        const auto r = amps(right, j);
        amps(left, j) = c * l - s * r;
        amps(right, j) = s * l + c * r;
    }
}

template <typename Derived>
void scale_row(const Eigen::MatrixBase<Derived>& amps_, Index row,
               typename Derived::Scalar factor) {
    auto& amps = const_cast<Eigen::MatrixBase<Derived>&>(amps_);
    amps.row(row) *= factor;
}

/// Applies `m` (rows: outputs, columns: inputs) to the listed rows.
template <typename Derived, typename MatDerived>
void mix_rows(const Eigen::MatrixBase<Derived>& amps_, std::span<const Index> rows,
              const Eigen::MatrixBase<MatDerived>& m) {
    auto& amps = const_cast<Eigen::MatrixBase<Derived>&>(amps_);
    using Complex = typename Derived::Scalar;
    const auto k = static_cast<Index>(rows.size());
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> gathered(k, amps.cols());
    for (Index i = 0; i < k; ++i) gathered.row(i) = amps.row(rows[i]);
    gathered = m.template cast<Complex>() * gathered;
    for (Index i = 0; i < k; ++i) amps.row(rows[i]) = gathered.row(i);
}

}  // namespace kernel

/// Real rotation beam splitter on an ordered (left, right) port pair.
template <typename Scalar = double>
struct BeamSplitter {
    Scalar alpha{0};
    std::string left{"L"};
    std::string right{"R"};

    Scalar transmittance() const {
        using std::sin;
        return sin(alpha) * sin(alpha);
    }

    /// Column j is the image of input port j (0 = left, 1 = right).
    Eigen::Matrix<Scalar, 2, 2> matrix() const {
        using std::cos;
        using std::sin;
        Eigen::Matrix<Scalar, 2, 2> m;
        m << cos(alpha), -sin(alpha), sin(alpha), cos(alpha);
        return m;
    }
};

/// Closed form of n identical beam splitters: a rotation by n*alpha.
template <typename Scalar>
Eigen::Matrix<Scalar, 2, 2> chain_rotation(Scalar alpha, long n) {
    return BeamSplitter<Scalar>{alpha * static_cast<Scalar>(n)}.matrix();
}

/// Complex amplitudes over named ports. Sink ports hold weight that has left
/// the interferometer (absorbed, transmitted through a side mirror, discarded)
/// and are never fed back into an optical element.
template <typename Scalar = double>
class ModeState {
   public:
    using Complex = std::complex<Scalar>;
    using Vector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

    ModeState() = default;

    /// Fresh particle: amplitude 1 at `source`, 0 elsewhere.
    static ModeState prepare(const std::vector<std::string>& ports, std::string_view source) {
        ModeState s;
        for (const auto& p : ports) s.add_port(p);
        s.amps_(s.index_of(source)) = Complex(1);
        s.declared_weight_ = Scalar(1);
        return s;
    }

    /// State with explicit amplitudes; the declared weight is their norm.
    static ModeState from_amplitudes(const std::vector<std::string>& ports,
                                     const std::vector<Complex>& amps) {
        if (ports.size() != amps.size()) throw ConfigError("port/amplitude count mismatch");
        ModeState s;
        for (std::size_t i = 0; i < ports.size(); ++i) s.add_port(ports[i], false, amps[i]);
        s.declared_weight_ = s.total_weight();
        return s;
    }

    Index add_port(const std::string& name, bool sink = false, Complex amp = Complex(0)) {
        if (index_.contains(name)) throw ConfigError("duplicate port '" + name + "'");
        const auto i = static_cast<Index>(names_.size());
        names_.push_back(name);
        index_.emplace(name, i);
        sink_.push_back(sink);
        amps_.conservativeResize(i + 1);
        amps_(i) = amp;
        return i;
    }

    bool has_port(std::string_view name) const { return index_.contains(std::string(name)); }

    Index index_of(std::string_view name) const {
        const auto it = index_.find(std::string(name));
        if (it == index_.end()) throw ConfigError("unknown port '" + std::string(name) + "'");
        return it->second;
    }

    Complex amp(std::string_view port) const { return amps_(index_of(port)); }
    bool is_sink(std::string_view port) const { return sink_[index_of(port)]; }

    const std::vector<std::string>& ports() const { return names_; }
    const Vector& amplitudes() const { return amps_; }
    Vector& amplitudes() { return amps_; }

    Scalar total_weight() const { return amps_.squaredNorm(); }
    Scalar declared_weight() const { return declared_weight_; }

    Scalar sink_weight() const {
        Scalar w(0);
        for (Index i = 0; i < amps_.size(); ++i)
            if (sink_[i]) w += std::norm(amps_(i));
        return w;
    }

    /// Index of a live (non-sink) port; throws ConfigError otherwise.
    Index live_index(std::string_view port) const {
        const auto i = index_of(port);
        if (sink_[i]) throw ConfigError("port '" + std::string(port) + "' is a loss sink");
        return i;
    }

    /// Creates a fresh sink named `<prefix>:<port>` (suffixed #k when reused).
    Index new_sink(std::string_view prefix, std::string_view port) {
        std::string base = std::string(prefix) + ":" + std::string(port);
        std::string name = base;
        for (int k = 2; has_port(name); ++k) name = base + "#" + std::to_string(k);
        return add_port(name, true);
    }

    void check_finite() const {
        if (!amps_.allFinite()) throw DomainError("non-finite amplitude");
    }

   private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, Index> index_;
    std::vector<bool> sink_;
    Vector amps_;
    Scalar declared_weight_{0};
};

template <typename Scalar>
ModeState<Scalar> apply_beam_splitter(ModeState<Scalar> state, const BeamSplitter<Scalar>& bs) {
    using std::isfinite;
    if (!isfinite(bs.alpha)) throw DomainError("beam splitter angle must be finite");
    const auto l = state.live_index(bs.left);
    const auto r = state.live_index(bs.right);
    if (l == r) throw ConfigError("beam splitter needs two distinct ports");
    kernel::rotate_rows(state.amplitudes(), l, r, bs.alpha);
    return state;
}

/// n successive beam splitters of angle alpha on (left, right).
template <typename Scalar>
ModeState<Scalar> chain_evolve(ModeState<Scalar> state, Scalar alpha, long n,
                               const std::string& left = "L", const std::string& right = "R") {
    if (n < 0) throw DomainError("chain length must be non-negative");
    const BeamSplitter<Scalar> bs{alpha, left, right};
    for (long i = 0; i < n; ++i) state = apply_beam_splitter(std::move(state), bs);
    return state;
}

/// Side mirror with transmittance T3: sqrt(1 - T3) of the amplitude is
/// reflected back (no phase), sqrt(T3) leaves into a fresh loss sink.
template <typename Scalar>
ModeState<Scalar> apply_lossy_mirror(ModeState<Scalar> state, std::string_view port, Scalar t3) {
    using std::sqrt;
    if (!(t3 >= Scalar(0) && t3 <= Scalar(1)))
        throw ConfigError("side mirror transmittance must lie in [0, 1]");
    const auto p = state.live_index(port);
    const auto a = state.amplitudes()(p);
    const auto sink = state.new_sink("loss", port);
    state.amplitudes()(p) = a * sqrt(Scalar(1) - t3);
    state.amplitudes()(sink) = a * sqrt(t3);
    return state;
}

/// Half-wave plate: pi phase on one port.
template <typename Scalar>
ModeState<Scalar> apply_hwp_phase(ModeState<Scalar> state, std::string_view port) {
    const auto p = state.live_index(port);
    state.amplitudes()(p) = -state.amplitudes()(p);
    return state;
}

/// Shutter: the whole amplitude at `port` moves to an absorption sink named
/// after the shutter location.
template <typename Scalar>
ModeState<Scalar> apply_shutter(ModeState<Scalar> state, std::string_view port) {
    const auto p = state.live_index(port);
    const auto sink = state.new_sink("absorbed", port);
    state.amplitudes()(sink) = state.amplitudes()(p);
    state.amplitudes()(p) = typename ModeState<Scalar>::Complex(0);
    return state;
}

/// <a|b> over the ports of `a`; ports missing from `b` contribute zero.
template <typename Scalar>
std::complex<Scalar> inner_product(const ModeState<Scalar>& a, const ModeState<Scalar>& b) {
    std::complex<Scalar> acc(0);
    for (Index i = 0; i < static_cast<Index>(a.ports().size()); ++i) {
        const auto& name = a.ports()[i];
        if (b.has_port(name)) acc += std::conj(a.amplitudes()(i)) * b.amp(name);
    }
    return acc;
}

using ModeStated = ModeState<double>;
using BeamSplitterd = BeamSplitter<double>;

}  // namespace cftrace
