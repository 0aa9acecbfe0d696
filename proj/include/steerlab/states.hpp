// Copyright 2026 The steerlab Authors
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

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "steerlab/linalg.hpp"
#include "steerlab/rng.hpp"

namespace steerlab {

/// A normalized pure state.
class StateVector {
   public:
    explicit StateVector(Vector amplitudes, double tol = kDefaultTol) : amps_(std::move(amplitudes)) {
        if (amps_.empty()) {
            throw Error(ErrorCode::DimensionMismatch, "state vector must have positive dimension");
        }
        for (const auto &z : amps_) {
            if (!is_finite(z)) {
                throw Error(ErrorCode::NonFinite, "state amplitude is not finite");
            }
        }
        if (std::abs(steerlab::norm(amps_) - 1.0) > tol) {
            throw Error(ErrorCode::DomainError, "state vector is not normalized");
        }
    }

    /// Rescales any nonzero vector to unit norm.
    static StateVector normalized(std::span<const Complex> v) {
        double n = steerlab::norm(v);
        if (!(n > 0)) {
            throw Error(ErrorCode::DomainError, "cannot normalize the zero vector");
        }
        return StateVector(scaled(v, 1.0 / n));
    }

    std::size_t dim() const noexcept {
        return amps_.size();
    }
    const Vector &amplitudes() const noexcept {
        return amps_;
    }
    operator std::span<const Complex>() const noexcept {
        return amps_;
    }
    Complex operator[](std::size_t i) const {
        return amps_[i];
    }

    Matrix projector() const {
        return Matrix::outer(amps_, amps_);
    }

   private:
    Vector amps_;
};

inline StateVector tensor_product(const StateVector &a, const StateVector &b) {
    return StateVector(tensor_product(std::span<const Complex>(a), std::span<const Complex>(b)));
}

/// Hermitian, unit-trace, positive-semidefinite operator.
class DensityMatrix {
   public:
    explicit DensityMatrix(Matrix m, double tol = kDefaultTol) : mat_(std::move(m)) {
        if (!mat_.is_square() || !is_density(mat_, tol)) {
            throw Error(ErrorCode::NotDensity, "matrix is not a density matrix within tolerance");
        }
    }

    std::size_t dim() const noexcept {
        return mat_.rows();
    }
    const Matrix &matrix() const noexcept {
        return mat_;
    }

   private:
    Matrix mat_;
};

struct EnsembleElement {
    double weight;
    StateVector state;
};

/// Weighted pure states {p_mu, |phi_mu>}. Weights must be positive and the
/// states share one dimension; whether the weights sum to one is checked when
/// the ensemble is turned into a density matrix.
class Ensemble {
   public:
    explicit Ensemble(std::vector<EnsembleElement> elements) : elements_(std::move(elements)) {
        if (elements_.empty()) {
            throw Error(ErrorCode::InvalidEnsemble, "ensemble has no elements");
        }
        for (const auto &e : elements_) {
            if (!std::isfinite(e.weight) || e.weight <= 0) {
                throw Error(ErrorCode::InvalidEnsemble, "ensemble weights must be finite and positive");
            }
            if (e.state.dim() != elements_[0].state.dim()) {
                throw Error(ErrorCode::DimensionMismatch, "ensemble states differ in dimension");
            }
        }
    }

    std::size_t size() const noexcept {
        return elements_.size();
    }
    std::size_t dim() const noexcept {
        return elements_[0].state.dim();
    }
    const std::vector<EnsembleElement> &elements() const noexcept {
        return elements_;
    }
    const EnsembleElement &operator[](std::size_t i) const {
        return elements_[i];
    }

    double weight_sum() const {
        double s = 0;
        for (const auto &e : elements_) s += e.weight;
        return s;
    }

    /// sum_mu p_mu |phi_mu><phi_mu| without the density-matrix checks.
    Matrix mixture() const {
        Matrix m(dim(), dim());
        for (const auto &e : elements_) {
            m += e.state.projector() * e.weight;
        }
        return m;
    }

   private:
    std::vector<EnsembleElement> elements_;
};

inline DensityMatrix ensemble_density(const Ensemble &e, double tol = kDefaultTol) {
    return DensityMatrix(e.mixture(), tol);
}

/// True iff the ensemble's mixture is within `tol` of `w` in Frobenius norm.
inline bool validate_ensemble(const Ensemble &e, const DensityMatrix &w, double tol = kDefaultTol) {
    if (e.dim() != w.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "ensemble and density matrix dimensions differ");
    }
    return (e.mixture() - w.matrix()).frobenius_norm() <= tol;
}

// ---------------------------------------------------------------------------
// Observables and measurement

struct ObservableOutcome {
    std::string label;
    double eigenvalue;
    Matrix projector;
};

/// Labeled orthogonal projectors resolving the identity.
class ProjectiveObservable {
   public:
    explicit ProjectiveObservable(std::vector<ObservableOutcome> outcomes, double tol = kDefaultTol)
        : outcomes_(std::move(outcomes)) {
        if (outcomes_.empty()) {
            throw Error(ErrorCode::InvalidObservable, "observable has no outcomes");
        }
        std::size_t n = outcomes_[0].projector.rows();
        Matrix sum(n, n);
        for (std::size_t i = 0; i < outcomes_.size(); i++) {
            const Matrix &p = outcomes_[i].projector;
            if (!p.is_square() || p.rows() != n) {
                throw Error(ErrorCode::DimensionMismatch, "projectors differ in dimension");
            }
            if (!is_hermitian(p, tol) || ((p * p) - p).frobenius_norm() > tol) {
                throw Error(ErrorCode::InvalidObservable, "outcome '" + outcomes_[i].label + "' is not a projector");
            }
            for (std::size_t j = 0; j < i; j++) {
                if ((p * outcomes_[j].projector).frobenius_norm() > tol) {
                    throw Error(ErrorCode::InvalidObservable, "projectors are not mutually orthogonal");
                }
                if (outcomes_[j].label == outcomes_[i].label) {
                    throw Error(ErrorCode::InvalidObservable, "duplicate outcome label '" + outcomes_[i].label + "'");
                }
            }
            sum += p;
        }
        if ((sum - Matrix::identity(n)).frobenius_norm() > tol) {
            throw Error(ErrorCode::InvalidObservable, "projectors do not sum to the identity");
        }
    }

    /// One rank-1 projector per basis vector. Labels default to "0", "1", ...
    /// and eigenvalues to the outcome index.
    static ProjectiveObservable from_basis(std::span<const Vector> basis, std::vector<std::string> labels = {},
                                           std::vector<double> eigenvalues = {}) {
        std::vector<ObservableOutcome> outs;
        for (std::size_t i = 0; i < basis.size(); i++) {
            outs.push_back({i < labels.size() ? labels[i] : std::to_string(i),
                            i < eigenvalues.size() ? eigenvalues[i] : static_cast<double>(i),
                            Matrix::outer(basis[i], basis[i])});
        }
        return ProjectiveObservable(std::move(outs));
    }

    std::size_t dim() const noexcept {
        return outcomes_[0].projector.rows();
    }
    std::size_t size() const noexcept {
        return outcomes_.size();
    }
    const std::vector<ObservableOutcome> &outcomes() const noexcept {
        return outcomes_;
    }
    const ObservableOutcome &operator[](std::size_t i) const {
        return outcomes_[i];
    }

    std::optional<std::size_t> index_of(std::string_view label) const {
        for (std::size_t i = 0; i < outcomes_.size(); i++) {
            if (outcomes_[i].label == label) return i;
        }
        return std::nullopt;
    }

   private:
    std::vector<ObservableOutcome> outcomes_;
};

struct MeasurementResult {
    std::size_t index;
    std::string label;
    double probability;
    StateVector post_state;
};

/// Unnormalized post-measurement branch P_mu |psi>.
struct Branch {
    double probability;
    Vector unnormalized;
};

/// <s|P_mu|s> for every outcome. Rounding noise below zero is clamped.
inline std::vector<double> born_probabilities(const StateVector &s, const ProjectiveObservable &o) {
    if (s.dim() != o.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state and observable dimensions differ");
    }
    std::vector<double> probs;
    for (const auto &out : o.outcomes()) {
        probs.push_back(std::max(0.0, inner(s, out.projector * std::span<const Complex>(s)).real()));
    }
    return probs;
}

/// All outcome branches of measuring `o` on the `targets` factors of `joint`.
inline std::vector<Branch> subsystem_branches(const StateVector &joint, std::span<const std::size_t> dims,
                                              std::span<const std::size_t> targets, const ProjectiveObservable &o) {
    std::vector<Branch> out;
    for (const auto &outcome : o.outcomes()) {
        Vector v = apply_on_factors(outcome.projector, joint, dims, targets);
        double n = steerlab::norm(v);
        out.push_back({n * n, std::move(v)});
    }
    return out;
}

namespace detail {

inline MeasurementResult pick_branch(std::vector<Branch> branches, const ProjectiveObservable &o, Stream &rng) {
    double u = rng.uniform();
    double acc = 0;
    std::size_t chosen = branches.size() - 1;
    for (std::size_t i = 0; i < branches.size(); i++) {
        acc += branches[i].probability;
        if (u < acc) {
            chosen = i;
            break;
        }
    }
    // Rounding can leave the total slightly below 1; fall back to the last
    // outcome with non-negligible weight.
    if (acc <= u) {
        while (chosen > 0 && branches[chosen].probability < kRankEpsilon) chosen--;
    }
    const Branch &b = branches[chosen];
    if (b.probability < kRankEpsilon) {
        throw Error(ErrorCode::DegenerateOutcome, "sampled outcome '" + o[chosen].label + "' has negligible probability");
    }
    return {chosen, o[chosen].label, b.probability, StateVector::normalized(b.unnormalized)};
}

}  // namespace detail

/// Born-rule draw with the Lueders update P|s>/||P|s>||.
inline MeasurementResult sample_measurement(const StateVector &s, const ProjectiveObservable &o, Stream &rng) {
    std::size_t dims[] = {s.dim()};
    std::size_t targets[] = {0};
    if (s.dim() != o.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state and observable dimensions differ");
    }
    return detail::pick_branch(subsystem_branches(s, dims, targets, o), o, rng);
}

/// Measures `o` on the `targets` factors only; the post state is the whole
/// joint state after collapse.
inline MeasurementResult measure_subsystem(const StateVector &joint, std::span<const std::size_t> dims,
                                           std::span<const std::size_t> targets, const ProjectiveObservable &o,
                                           Stream &rng) {
    return detail::pick_branch(subsystem_branches(joint, dims, targets, o), o, rng);
}

inline bool equal_up_to_phase(const StateVector &a, const StateVector &b, double tol = kDefaultTol) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "states differ in dimension");
    }
    return std::abs(inner(a, b)) >= 1.0 - tol;
}

/// Reduced density matrix of a pure state on the `keep` factors.
inline Matrix reduced_density(const StateVector &s, std::span<const std::size_t> dims,
                              std::span<const std::size_t> keep) {
    return partial_trace(s.projector(), dims, keep);
}

// ---------------------------------------------------------------------------
// Named states. Convention: |H> = |up> = e0, |V> = |down> = e1.

enum class Axis { X, Y, Z };

inline std::string_view axis_name(Axis a) {
    switch (a) {
        case Axis::X: return "x";
        case Axis::Y: return "y";
        case Axis::Z: return "z";
    }
    return "?";
}

inline StateVector ket_h() {
    return StateVector({1.0, 0.0});
}
inline StateVector ket_v() {
    return StateVector({0.0, 1.0});
}
inline StateVector spin_up() {
    return ket_h();
}
inline StateVector spin_down() {
    return ket_v();
}
inline StateVector ket_d() {
    return StateVector({std::numbers::sqrt2 / 2, std::numbers::sqrt2 / 2});
}
inline StateVector ket_dbar() {
    return StateVector({std::numbers::sqrt2 / 2, -std::numbers::sqrt2 / 2});
}

namespace detail {
inline void require_open_probability(double p) {
    if (!(p > 0 && p < 1)) {
        throw Error(ErrorCode::DomainError, "p must lie in (0, 1)");
    }
}
}  // namespace detail

/// sqrt(p)|H> + sqrt(q)|V>: linear polarization tilted by acos(sqrt(p)) from H.
inline StateVector ket_r(double p) {
    detail::require_open_probability(p);
    return StateVector({std::sqrt(p), std::sqrt(1 - p)});
}

/// sqrt(p)|H> - sqrt(q)|V>.
inline StateVector ket_l(double p) {
    detail::require_open_probability(p);
    return StateVector({std::sqrt(p), -std::sqrt(1 - p)});
}

/// Eigenstate of spin along `axis`; sign +1 is "up".
inline StateVector spin_state(Axis axis, int sign) {
    const double h = std::numbers::sqrt2 / 2;
    switch (axis) {
        case Axis::Z: return sign > 0 ? spin_up() : spin_down();
        case Axis::X: return StateVector({h, sign > 0 ? h : -h});
        case Axis::Y: return StateVector({Complex(h), sign > 0 ? Complex(0, h) : Complex(0, -h)});
    }
    throw Error(ErrorCode::DomainError, "unknown axis");
}

/// Spin measurement along `axis`: outcome "+" (eigenvalue +1) then "-" (-1).
inline ProjectiveObservable spin_observable(Axis axis) {
    Vector basis[] = {spin_state(axis, +1).amplitudes(), spin_state(axis, -1).amplitudes()};
    return ProjectiveObservable::from_basis(basis, {"+", "-"}, {+1.0, -1.0});
}

/// (|up down> - |down up>)/sqrt(2)
inline StateVector singlet() {
    const double h = std::numbers::sqrt2 / 2;
    return StateVector({0.0, h, -h, 0.0});
}
/// |1,1> = |up up>
inline StateVector triplet_up() {
    return StateVector({1.0, 0.0, 0.0, 0.0});
}
/// |1,-1> = |down down>
inline StateVector triplet_down() {
    return StateVector({0.0, 0.0, 0.0, 1.0});
}
/// |1,0> = (|up down> + |down up>)/sqrt(2)
inline StateVector triplet_zero() {
    const double h = std::numbers::sqrt2 / 2;
    return StateVector({0.0, h, h, 0.0});
}

}  // namespace steerlab
