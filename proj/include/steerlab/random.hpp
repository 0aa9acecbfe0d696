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

#include "steerlab/linalg.hpp"
#include "steerlab/rng.hpp"

namespace steerlab {

inline Complex complex_normal(Stream &rng) {
    double re = rng.normal();
    double im = rng.normal();
    return {re, im};
}

/// Random unitary from Gram-Schmidt on complex Gaussian columns.
inline Matrix random_unitary(std::size_t dim, Stream &rng) {
    Matrix u(dim, dim);
    for (std::size_t c = 0; c < dim; c++) {
        Vector v(dim);
        for (auto &z : v) z = complex_normal(rng);
        for (int pass = 0; pass < 2; pass++) {
            for (std::size_t prev = 0; prev < c; prev++) {
                Complex proj = 0;
                for (std::size_t r = 0; r < dim; r++) proj += std::conj(u(r, prev)) * v[r];
                for (std::size_t r = 0; r < dim; r++) v[r] -= proj * u(r, prev);
            }
        }
        double n = norm(v);
        for (std::size_t r = 0; r < dim; r++) u(r, c) = v[r] / n;
    }
    return u;
}

/// Uniformly-ish distributed pure state.
inline Vector random_state_vector(std::size_t dim, Stream &rng) {
    Vector v(dim);
    for (auto &z : v) z = complex_normal(rng);
    return scaled(v, 1.0 / norm(v));
}

}  // namespace steerlab
