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
#include <optional>
#include <string>
#include <vector>

#include "steerlab/linalg.hpp"
#include "steerlab/rng.hpp"
#include "steerlab/states.hpp"

/// Constructive ensemble steering: given Alice's density matrix W, build a
/// joint pure state in which Bob can realize any decomposition of W by a
/// projective measurement on his factor.
namespace steerlab::ghjw {

/// sum_i sqrt(w_i) |alpha_i> (x) |gamma_i>, restricted to w_i > kRankEpsilon.
struct SchmidtForm {
    /// sqrt(w_i), descending.
    std::vector<double> coefficients;
    std::vector<StateVector> alice_basis;
    std::vector<StateVector> bob_basis;

    Vector reassemble() const {
        std::size_t n = alice_basis.empty() ? 0 : alice_basis[0].dim() * bob_basis[0].dim();
        Vector out(n);
        for (std::size_t i = 0; i < coefficients.size(); i++) {
            Vector term = tensor_product(std::span<const Complex>(alice_basis[i]), std::span<const Complex>(bob_basis[i]));
            for (std::size_t k = 0; k < n; k++) out[k] += coefficients[i] * term[k];
        }
        return out;
    }
};

struct Purification {
    StateVector joint;
    std::size_t dim_alice;
    std::size_t dim_bob;
    /// Bob's pointer states |psi_mu>, one per ensemble element, when built from an ensemble.
    std::vector<StateVector> bob_pointer_basis;

    Purification(StateVector joint_state, std::size_t alice, std::size_t bob, std::vector<StateVector> pointers = {})
        : joint(std::move(joint_state)), dim_alice(alice), dim_bob(bob), bob_pointer_basis(std::move(pointers)) {
        if (alice == 0 || bob == 0 || alice * bob != joint.dim()) {
            throw Error(ErrorCode::DimensionMismatch, "dim_alice * dim_bob must equal the joint dimension");
        }
    }

    /// Tr_Bob |Psi><Psi|
    Matrix alice_density() const {
        std::size_t dims[] = {dim_alice, dim_bob};
        std::size_t keep[] = {0};
        return reduced_density(joint, dims, keep);
    }
};

/// (<alpha| (x) 1)|Psi>: the Bob-side vector paired with |alpha> in |Psi>.
inline Vector bob_component(const StateVector &joint, std::size_t dim_alice, std::size_t dim_bob,
                            std::span<const Complex> alpha) {
    Vector beta(dim_bob);
    for (std::size_t a = 0; a < dim_alice; a++) {
        Complex ca = std::conj(alpha[a]);
        for (std::size_t b = 0; b < dim_bob; b++) beta[b] += ca * joint[a * dim_bob + b];
    }
    return beta;
}

/// (1 (x) <bob|)|Psi>: Alice's unnormalized conditional factor.
inline Vector alice_component(const StateVector &joint, std::size_t dim_alice, std::size_t dim_bob,
                              std::span<const Complex> bob) {
    Vector phi(dim_alice);
    for (std::size_t a = 0; a < dim_alice; a++) {
        for (std::size_t b = 0; b < dim_bob; b++) phi[a] += std::conj(bob[b]) * joint[a * dim_bob + b];
    }
    return phi;
}

/// Schmidt analysis through Alice's eigenbasis. When `alice_eigenbasis` is
/// given it is used instead of diagonalizing W, which is what lets two
/// purifications with a degenerate W be compared term by term.
inline SchmidtForm schmidt(const StateVector &joint, std::size_t dim_alice, std::size_t dim_bob,
                           const std::optional<EigenDecomposition> &alice_eigenbasis = std::nullopt,
                           double tol = kDefaultTol) {
    if (dim_alice == 0 || dim_bob == 0 || dim_alice * dim_bob != joint.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "subsystem dimensions do not factor the joint state");
    }
    EigenDecomposition eig;
    if (alice_eigenbasis) {
        eig = *alice_eigenbasis;
        if (eig.eigenvectors.size() != dim_alice || eig.eigenvectors[0].size() != dim_alice) {
            throw Error(ErrorCode::DimensionMismatch, "supplied eigenbasis does not span Alice's space");
        }
    } else {
        std::size_t dims[] = {dim_alice, dim_bob};
        std::size_t keep[] = {0};
        eig = hermitian_eig(reduced_density(joint, dims, keep), tol);
    }

    std::vector<Vector> betas;
    for (const auto &alpha : eig.eigenvectors) {
        betas.push_back(bob_component(joint, dim_alice, dim_bob, alpha));
    }
    // <beta_j|beta_i> = w_i delta_ij
    for (std::size_t i = 0; i < betas.size(); i++) {
        for (std::size_t j = 0; j < betas.size(); j++) {
            Complex g = inner(betas[j], betas[i]);
            Complex expect = i == j ? Complex(eig.eigenvalues[i]) : Complex(0);
            if (std::abs(g - expect) > tol) {
                throw Error(ErrorCode::AgreeViolation,
                            "Bob-side components are not orthogonal with norms sqrt(w_i) (deviation " +
                                std::to_string(std::abs(g - expect)) + ")");
            }
        }
    }

    SchmidtForm form;
    for (std::size_t i = 0; i < betas.size(); i++) {
        if (eig.eigenvalues[i] <= kRankEpsilon) {
            continue;
        }
        double len = steerlab::norm(betas[i]);
        form.coefficients.push_back(std::sqrt(eig.eigenvalues[i]));
        form.alice_basis.push_back(StateVector::normalized(eig.eigenvectors[i]));
        form.bob_basis.push_back(StateVector(scaled(betas[i], 1.0 / len), tol));
    }
    return form;
}

/// |Psi> = sum_mu sqrt(p_mu) |phi_mu> (x) e_mu.
inline Purification purify_from_ensemble(const Ensemble &e, std::size_t dim_bob) {
    if (dim_bob < e.size()) {
        throw Error(ErrorCode::BobTooSmall, "Bob's dimension " + std::to_string(dim_bob) + " is below the " +
                                                std::to_string(e.size()) + " ensemble elements");
    }
    std::size_t da = e.dim();
    Vector joint(da * dim_bob);
    std::vector<StateVector> pointers;
    for (std::size_t mu = 0; mu < e.size(); mu++) {
        double amp = std::sqrt(e[mu].weight);
        for (std::size_t a = 0; a < da; a++) joint[a * dim_bob + mu] += amp * e[mu].state[a];
        pointers.emplace_back(basis_vector(dim_bob, mu));
    }
    return Purification(StateVector(std::move(joint)), da, dim_bob, std::move(pointers));
}

/// Unitary U on Bob's factor with |Psi> = (1 (x) U)|Psi'>. Both states are
/// analysed in one shared eigenbasis of W; U maps gamma'_i to gamma_i on the
/// support, and the two orthonormal completions are paired in order.
inline Matrix relating_unitary(const Purification &psi, const Purification &psi_prime, double tol = kDefaultTol) {
    if (psi.dim_alice != psi_prime.dim_alice || psi.dim_bob != psi_prime.dim_bob) {
        throw Error(ErrorCode::DimensionMismatch, "purifications have different factor dimensions");
    }
    Matrix w = psi.alice_density();
    double gap = (w - psi_prime.alice_density()).frobenius_norm();
    if (gap > tol) {
        throw Error(ErrorCode::MarginalMismatch, "reduced densities differ by " + std::to_string(gap));
    }
    EigenDecomposition shared = hermitian_eig(w, tol);
    SchmidtForm form = schmidt(psi.joint, psi.dim_alice, psi.dim_bob, shared, tol);
    SchmidtForm form_prime = schmidt(psi_prime.joint, psi.dim_alice, psi.dim_bob, shared, tol);

    auto amplitudes = [](const std::vector<StateVector> &states) {
        std::vector<Vector> out;
        for (const auto &s : states) out.push_back(s.amplitudes());
        return out;
    };
    auto target = gram_schmidt_complete(amplitudes(form.bob_basis), psi.dim_bob, tol);
    auto source = gram_schmidt_complete(amplitudes(form_prime.bob_basis), psi.dim_bob, tol);

    Matrix u(psi.dim_bob, psi.dim_bob);
    for (std::size_t k = 0; k < psi.dim_bob; k++) {
        u += Matrix::outer(target[k], source[k]);
    }
    return u;
}

/// Bob's measurement realizing one decomposition of Alice's density matrix.
struct SteeringPlan {
    /// Outcome mu projects onto U|psi_mu>; a trailing "NONE" outcome holds the
    /// complement when the target has fewer elements than Bob's dimension.
    ProjectiveObservable observable;
    /// Indexed like the observable's outcomes; empty for "NONE".
    std::vector<std::optional<EnsembleElement>> outcome_map;
    /// Bob-side eigenvectors U|psi_mu>, one per ensemble element.
    std::vector<StateVector> bob_states;
    /// Probability of the "NONE" outcome on the purification (0 without one).
    double residual_probability = 0;
};

inline constexpr const char *kResidualLabel = "NONE";

inline SteeringPlan steering_observable(const Purification &psi, const Ensemble &target, double tol = kDefaultTol) {
    if (target.dim() != psi.dim_alice) {
        throw Error(ErrorCode::DimensionMismatch, "target ensemble does not live on Alice's factor");
    }
    for (const auto &e : target.elements()) {
        if (e.weight < kRankEpsilon) {
            throw Error(ErrorCode::NotADecomposition, "ensemble weight below the rank cutoff");
        }
    }
    Matrix w = psi.alice_density();
    if ((target.mixture() - w).frobenius_norm() > tol) {
        throw Error(ErrorCode::NotADecomposition, "ensemble does not reproduce Alice's density matrix");
    }
    if (target.size() > psi.dim_bob) {
        throw Error(ErrorCode::BobTooSmall, "ensemble has more elements than Bob's dimension");
    }

    Purification psi_prime = purify_from_ensemble(target, psi.dim_bob);
    Matrix u = relating_unitary(psi, psi_prime, tol);

    std::vector<ObservableOutcome> outcomes;
    std::vector<std::optional<EnsembleElement>> outcome_map;
    std::vector<StateVector> bob_states;
    for (std::size_t mu = 0; mu < target.size(); mu++) {
        StateVector b = StateVector::normalized(u.column(mu));
        outcomes.push_back({std::to_string(mu), static_cast<double>(mu), b.projector()});
        outcome_map.emplace_back(target[mu]);
        bob_states.push_back(std::move(b));
    }
    if (target.size() < psi.dim_bob) {
        Matrix rest(psi.dim_bob, psi.dim_bob);
        for (std::size_t k = target.size(); k < psi.dim_bob; k++) {
            Vector c = u.column(k);
            rest += Matrix::outer(c, c);
        }
        outcomes.push_back({kResidualLabel, static_cast<double>(target.size()), rest});
        outcome_map.emplace_back(std::nullopt);
    }
    SteeringPlan plan{ProjectiveObservable(std::move(outcomes), tol), std::move(outcome_map), std::move(bob_states),
                      0.0};

    if (target.size() < psi.dim_bob) {
        std::size_t dims[] = {psi.dim_alice, psi.dim_bob};
        std::size_t bob[] = {1};
        Vector v = apply_on_factors(plan.observable.outcomes().back().projector, psi.joint, dims, bob);
        double n = steerlab::norm(v);
        plan.residual_probability = n * n;
        if (plan.residual_probability > tol) {
            throw Error(ErrorCode::ResidualOutcome, "complement outcome has nonzero probability");
        }
    }
    return plan;
}

/// Exact (enumerated, not sampled) behaviour of one plan outcome.
struct OutcomeRow {
    std::string label;
    double probability;
    /// Target weight p_mu; absent for "NONE".
    std::optional<double> target_weight;
    /// |<phi_mu|conditional>|^2; absent for "NONE" or impossible outcomes.
    std::optional<double> fidelity;
    /// |<phi_mu|conditional>|
    std::optional<double> overlap;
};

inline std::vector<OutcomeRow> analyze_plan(const Purification &psi, const SteeringPlan &plan) {
    std::size_t dims[] = {psi.dim_alice, psi.dim_bob};
    std::size_t bob[] = {1};
    auto branches = subsystem_branches(psi.joint, dims, bob, plan.observable);
    std::vector<OutcomeRow> rows;
    for (std::size_t i = 0; i < branches.size(); i++) {
        OutcomeRow row{plan.observable[i].label, branches[i].probability, std::nullopt, std::nullopt, std::nullopt};
        if (plan.outcome_map[i]) {
            row.target_weight = plan.outcome_map[i]->weight;
            if (branches[i].probability > kRankEpsilon) {
                Vector phi = alice_component(psi.joint, psi.dim_alice, psi.dim_bob, plan.bob_states[i]);
                double ov = std::abs(inner(plan.outcome_map[i]->state, phi)) / steerlab::norm(phi);
                row.overlap = ov;
                row.fidelity = ov * ov;
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

struct SteeringOutcome {
    std::size_t index;
    std::string label;
    StateVector alice_conditional;
};

/// One run of the protocol: Bob measures his factor and reports the outcome;
/// Alice's conditional state is read off the collapsed joint state.
inline SteeringOutcome steer(const Purification &psi, const SteeringPlan &plan, Stream &rng) {
    std::size_t dims[] = {psi.dim_alice, psi.dim_bob};
    std::size_t bob[] = {1};
    MeasurementResult r = measure_subsystem(psi.joint, dims, bob, plan.observable, rng);
    if (!plan.outcome_map[r.index]) {
        throw Error(ErrorCode::ResidualOutcome, "Bob obtained the complement outcome");
    }
    Vector phi = alice_component(r.post_state, psi.dim_alice, psi.dim_bob, plan.bob_states[r.index]);
    return {r.index, r.label, StateVector::normalized(phi)};
}

struct CandidateCertificate {
    bool valid = false;
    std::string error;
    std::optional<SteeringPlan> plan;
    std::vector<OutcomeRow> outcome_table;
    double residual_probability = 0;
};

struct CertificationReport {
    std::optional<Purification> purification;
    /// Candidate the purification was built from.
    std::optional<std::size_t> source_candidate;
    std::vector<CandidateCertificate> candidates;

    bool all_certified() const {
        return std::all_of(candidates.begin(), candidates.end(), [](const auto &c) { return c.valid; });
    }
};

/// Checks every candidate decomposition of `w` and, for the valid ones,
/// synthesizes Bob's steering measurement on a single shared purification
/// built from the largest valid candidate.
inline CertificationReport certify(const DensityMatrix &w, const std::vector<Ensemble> &candidates,
                                   double tol = kDefaultTol) {
    CertificationReport report;
    report.candidates.resize(candidates.size());
    std::vector<bool> ok(candidates.size(), false);
    std::size_t dim_bob = 0;
    for (std::size_t i = 0; i < candidates.size(); i++) {
        const Ensemble &e = candidates[i];
        auto &cert = report.candidates[i];
        if (e.dim() != w.dim()) {
            cert.error = "NotADecomposition: ensemble dimension " + std::to_string(e.dim()) +
                         " differs from density dimension " + std::to_string(w.dim());
            continue;
        }
        bool weights_ok = std::all_of(e.elements().begin(), e.elements().end(),
                                      [](const auto &el) { return el.weight >= kRankEpsilon; });
        if (!weights_ok || !validate_ensemble(e, w, tol)) {
            cert.error = "NotADecomposition: weights sum to " + std::to_string(e.weight_sum()) +
                         ", mixture deviates from W by " + std::to_string((e.mixture() - w.matrix()).frobenius_norm());
            continue;
        }
        ok[i] = true;
        if (!report.source_candidate || e.size() > candidates[*report.source_candidate].size()) {
            report.source_candidate = i;
        }
        dim_bob = std::max(dim_bob, e.size());
    }
    if (!report.source_candidate) {
        return report;
    }
    report.purification = purify_from_ensemble(candidates[*report.source_candidate], dim_bob);

    for (std::size_t i = 0; i < candidates.size(); i++) {
        if (!ok[i]) {
            continue;
        }
        auto &cert = report.candidates[i];
        try {
            cert.plan = steering_observable(*report.purification, candidates[i], tol);
            cert.outcome_table = analyze_plan(*report.purification, *cert.plan);
            cert.residual_probability = cert.plan->residual_probability;
            cert.valid = true;
            for (const auto &row : cert.outcome_table) {
                if (!row.target_weight) continue;
                if (std::abs(row.probability - *row.target_weight) > tol || !row.overlap || *row.overlap < 1 - tol) {
                    cert.valid = false;
                    cert.error = "steering outcome '" + row.label + "' misses its target";
                }
            }
        } catch (const Error &ex) {
            cert.valid = false;
            cert.error = ex.what();
        }
    }
    return report;
}

}  // namespace steerlab::ghjw
