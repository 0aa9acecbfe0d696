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

// Random test instances built without touching the code under test.

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "steerlab/linalg.hpp"
#include "steerlab/random.hpp"
#include "steerlab/rng.hpp"
#include "steerlab/states.hpp"

namespace steerlab::testing {

/// Normalized spectrum of length `dim` with between 1 and min(dim, max_rank)
/// nonzero entries. flavor 1 plants a repeated eigenvalue, flavor 2 makes the
/// support maximally mixed.
inline std::vector<double> random_spectrum(std::size_t dim, std::size_t max_rank, int flavor, Stream &rng) {
    std::vector<double> w(dim, 0.0);
    std::size_t rank = 1 + rng.below(std::min(dim, max_rank));
    for (std::size_t i = 0; i < rank; i++) w[i] = 0.1 + rng.uniform();
    if (flavor == 1 && rank >= 2) w[1] = w[0];  // planted degeneracy
    if (flavor == 2) std::fill(w.begin(), w.begin() + rank, 1.0);
    double total = 0;
    for (double x : w) total += x;
    for (double &x : w) x /= total;
    return w;
}

/// An ensemble of exactly `size` pure states whose mixture is
/// U diag(spectrum) U^dagger for a random U. Built by measuring Bob's half of
/// a Schmidt-form purification in a random basis, so it never touches the
/// steering code. The number of nonzero spectrum entries must not exceed
/// `size`. `density` receives the planted density matrix.
inline Ensemble planted_ensemble(const std::vector<double> &spectrum, std::size_t size, Stream &rng,
                                 Matrix *density = nullptr, const Matrix *alice_basis = nullptr) {
    std::size_t dim = spectrum.size();
    Matrix alpha = alice_basis ? *alice_basis : random_unitary(dim, rng);
    if (density) *density = alpha * Matrix::diagonal(spectrum) * alpha.adjoint();
    for (int attempt = 0; attempt < 1000; attempt++) {
        Matrix q = random_unitary(size, rng);
        std::vector<EnsembleElement> els;
        bool ok = true;
        for (std::size_t mu = 0; mu < size && ok; mu++) {
            Vector phi(dim);
            std::size_t slot = 0;
            for (std::size_t i = 0; i < dim; i++) {
                if (spectrum[i] == 0) continue;
                Complex c = std::sqrt(spectrum[i]) * q(mu, slot++);
                for (std::size_t a = 0; a < dim; a++) phi[a] += c * alpha(a, i);
            }
            double n = norm(phi);
            if (n * n < 1e-3) {
                ok = false;
                break;
            }
            els.push_back({n * n, StateVector(scaled(phi, 1.0 / n))});
        }
        if (ok) return Ensemble(std::move(els));
    }
    throw std::runtime_error("could not plant an ensemble with non-negligible weights");
}

}  // namespace steerlab::testing
