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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "steerlab/ghjw.hpp"
#include "steerlab/linalg.hpp"
#include "steerlab/protocols.hpp"
#include "steerlab/random.hpp"
#include "steerlab/rng.hpp"
#include "steerlab/states.hpp"

/// Closed-form identities behind both stories, each evaluated as a residual
/// between two independently written expressions.
namespace steerlab::identities {

struct IdentityResult {
    std::string name;
    std::size_t cases = 0;
    double max_residual = 0;
    bool passed = false;
};

namespace detail {

inline double max_abs(const Matrix &m) {
    double worst = 0;
    for (const auto &z : m.data()) worst = std::max(worst, std::abs(z));
    return worst;
}

inline double max_abs(std::span<const Complex> v) {
    double worst = 0;
    for (const auto &z : v) worst = std::max(worst, std::abs(z));
    return worst;
}

inline Vector kron(std::span<const Complex> a, std::span<const Complex> b) {
    return tensor_product(a, b);
}

/// sum_k c_k v_k
inline Vector combination(const std::vector<std::pair<double, Vector>> &terms) {
    Vector out(terms.front().second.size());
    for (const auto &[c, v] : terms) {
        for (std::size_t i = 0; i < v.size(); i++) out[i] += c * v[i];
    }
    return out;
}

inline Vector quartet_grouped_by_carol() {
    using protocols::kAlice, protocols::kBob, protocols::kCarol1, protocols::kCarol2;
    const std::size_t dims[] = {2, 2, 2, 2};
    const std::size_t perm[] = {kCarol1, kCarol2, kAlice, kBob};
    return permute_factors(protocols::prepare_quartet(), dims, perm);
}

}  // namespace detail

/// p|H><H| + q|V><V| against (|R><R| + |L><L|)/2 on p = 0.1 .. 0.9.
inline IdentityResult photon_density_identity(double tol, double perturbation = 0) {
    IdentityResult r{"photon_density_equality", 0, 0, false};
    for (int i = 1; i <= 9; i++) {
        double p = 0.1 * i;
        Matrix hv = ket_h().projector() * Complex(p) + ket_v().projector() * Complex(1 - p);
        double half = 0.5 + perturbation;
        Matrix rl = (ket_r(p).projector() + ket_l(p).projector()) * Complex(half);
        r.max_residual = std::max(r.max_residual, detail::max_abs(hv - rl));
        r.cases++;
    }
    r.passed = r.max_residual <= tol;
    return r;
}

/// sqrt(p)|HH> + sqrt(q)|VV> against (|R>|D> + |L>|Dbar>)/sqrt(2).
inline IdentityResult photon_state_identity(double tol, double perturbation = 0) {
    IdentityResult r{"photon_pair_state_equality", 0, 0, false};
    for (int i = 1; i <= 9; i++) {
        double p = 0.1 * i;
        const Vector lhs = protocols::photon_pair_state(p).joint.amplitudes();
        double c = std::numbers::sqrt2 / 2 + perturbation;
        Vector rhs = detail::combination(
            {{c, detail::kron(ket_r(p), ket_d())}, {c, detail::kron(ket_l(p), ket_dbar())}});
        r.max_residual = std::max(r.max_residual, detail::max_abs(subtracted(lhs, rhs)));
        r.cases++;
    }
    r.passed = r.max_residual <= tol;
    return r;
}

/// Two singlets regrouped as (Carol's pair)(Alice, Bob), against the z-product expansion.
inline IdentityResult quartet_z_expansion_identity(double tol, double perturbation = 0) {
    IdentityResult r{"quartet_z_product_expansion", 1, 0, false};
    auto ket = [](bool c1, bool c2, bool a, bool b) {
        Vector v{1.0};
        for (bool up : {c1, c2, a, b}) {
            Vector s = up ? Vector{1, 0} : Vector{0, 1};
            v = detail::kron(v, s);
        }
        return v;
    };
    double h = 0.5 + perturbation;
    Vector expected = detail::combination({{h, ket(true, true, false, false)},
                                           {h, ket(false, false, true, true)},
                                           {-h, ket(true, false, false, true)},
                                           {-h, ket(false, true, true, false)}});
    r.max_residual = detail::max_abs(subtracted(detail::quartet_grouped_by_carol(), expected));
    r.passed = r.max_residual <= tol;
    return r;
}

/// The same regrouping against the singlet/triplet expansion.
inline IdentityResult quartet_spin_expansion_identity(double tol, double perturbation = 0) {
    IdentityResult r{"quartet_total_spin_expansion", 1, 0, false};
    double h = 0.5 + perturbation;
    Vector expected = detail::combination({{h, detail::kron(triplet_up(), triplet_down())},
                                           {h, detail::kron(triplet_down(), triplet_up())},
                                           {-h, detail::kron(triplet_zero(), triplet_zero())},
                                           {h, detail::kron(singlet(), singlet())}});
    r.max_residual = detail::max_abs(subtracted(detail::quartet_grouped_by_carol(), expected));
    r.passed = r.max_residual <= tol;
    return r;
}

/// Both fable ensembles mix to the maximally mixed two-spin state.
inline IdentityResult fable_density_identity(double tol, double perturbation = 0) {
    IdentityResult r{"fable_ensembles_maximally_mixed", 2, 0, false};
    Matrix quarter = Matrix::identity(4) * Complex(0.25 + perturbation);
    for (const auto &e : {protocols::case_i_ensemble(), protocols::case_ii_ensemble()}) {
        r.max_residual = std::max(r.max_residual, detail::max_abs(e.mixture() - quarter));
    }
    r.passed = r.max_residual <= tol;
    return r;
}

/// (u (x) u (x) u (x) u) leaves the quartet unchanged up to phase, for the
/// identity, the Hadamard and `samples` random unitaries.
inline IdentityResult rotational_sweep(double tol, std::uint64_t seed, std::size_t samples = 100,
                                       double perturbation = 0) {
    IdentityResult r{"quartet_rotational_invariance", 0, 0, false};
    const double s = std::numbers::sqrt2 / 2;
    std::vector<Matrix> rotations = {Matrix::identity(2), Matrix::from_rows({{s, s}, {s, -s}})};
    Stream rng = Stream(seed).child(0x726f74);
    for (std::size_t i = 0; i < samples; i++) rotations.push_back(random_unitary(2, rng));

    const Vector quartet = protocols::prepare_quartet().amplitudes();
    Vector reference = quartet;
    reference[0b0101] += perturbation;
    const std::size_t dims[] = {2, 2, 2, 2};
    for (const auto &u : rotations) {
        Vector v = quartet;
        for (std::size_t f = 0; f < 4; f++) {
            const std::size_t target[] = {f};
            v = apply_on_factors(u, v, dims, target);
        }
        Complex overlap = inner(reference, v);
        Complex phase = std::abs(overlap) > 0 ? overlap / std::abs(overlap) : Complex(1);
        r.max_residual = std::max(r.max_residual, distance(v, scaled(reference, phase)));
        r.cases++;
    }
    r.passed = r.max_residual <= tol;
    return r;
}

/// Every identity above. `perturbation` shifts one analytic constant per
/// identity, which a sound build must detect.
inline std::vector<IdentityResult> run_identity_suite(double tol = kDefaultTol, std::uint64_t seed = 0,
                                                      double perturbation = 0) {
    return {photon_density_identity(tol, perturbation),     photon_state_identity(tol, perturbation),
            quartet_z_expansion_identity(tol, perturbation), quartet_spin_expansion_identity(tol, perturbation),
            fable_density_identity(tol, perturbation),      rotational_sweep(tol, seed, 100, perturbation)};
}

}  // namespace steerlab::identities
