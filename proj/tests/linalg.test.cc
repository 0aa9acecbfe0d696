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

#include "steerlab/linalg.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.h"

using namespace steerlab;
using steerlab::testing::random_hermitian;
using steerlab::testing::random_matrix;

namespace {

const double kS = std::sqrt(0.5);

Matrix ket_bra(std::size_t dim, std::size_t i) {
    Matrix m(dim, dim);
    m(i, i) = 1;
    return m;
}

}  // namespace

TEST(TensorProduct, identity) {
    EXPECT_EQ(tensor_product(Matrix::identity(2), Matrix::identity(2)), Matrix::identity(4));
}

TEST(TensorProduct, basis_bookkeeping) {
    // |up><up| (x) |down><down| is the projector onto |up down>, index 1.
    EXPECT_EQ(tensor_product(ket_bra(2, 0), ket_bra(2, 1)), ket_bra(4, 1));
}

TEST(TensorProduct, block_structure) {
    Matrix a = Matrix::from_rows({{1, 2}, {3, Complex(0, 1)}});
    Matrix b = Matrix::from_rows({{0, 1, 2}});
    Matrix k = tensor_product(a, b);
    ASSERT_EQ(k.rows(), 2u);
    ASSERT_EQ(k.cols(), 6u);
    for (std::size_t i = 0; i < 2; i++)
        for (std::size_t j = 0; j < 2; j++)
            for (std::size_t l = 0; l < 3; l++) EXPECT_EQ(k(i, j * 3 + l), a(i, j) * b(0, l));
}

TEST(TensorProduct, singlet_pair_has_unit_norm) {
    // Expanding singlet (x) singlet gives four amplitudes of +-1/2, so the squared norm is 4 * 1/4.
    Vector s{0, kS, -kS, 0};
    Vector q = tensor_product(std::span<const Complex>(s), std::span<const Complex>(s));
    ASSERT_EQ(q.size(), 16u);
    int nonzero = 0;
    for (auto z : q) {
        if (std::abs(z) > 1e-15) {
            nonzero++;
            EXPECT_NEAR(std::abs(z), 0.5, 1e-15);
        }
    }
    EXPECT_EQ(nonzero, 4);
    EXPECT_NEAR(norm(q), 1.0, 1e-15);
}

TEST(TensorProduct, associative) {
    Stream rng(11);
    for (int trial = 0; trial < 20; trial++) {
        Matrix a = random_matrix(1 + trial % 3, 2, rng);
        Matrix b = random_matrix(2, 1 + trial % 2, rng);
        Matrix c = random_matrix(3, 2, rng);
        EXPECT_MATRIX_NEAR(tensor_product(tensor_product(a, b), c), tensor_product(a, tensor_product(b, c)), 1e-12);
    }
}

TEST(PartialTrace, product_state) {
    Matrix a = Matrix::from_rows({{0.6, Complex(0.1, 0.2)}, {Complex(0.1, -0.2), 0.4}});
    Matrix b = Matrix::from_rows({{0.25, 0, 0}, {0, 0.5, 0}, {0, 0, 0.25}});
    std::size_t dims[] = {2, 3};
    std::size_t keep_a[] = {0};
    std::size_t keep_b[] = {1};
    EXPECT_MATRIX_NEAR(partial_trace(tensor_product(a, b), dims, keep_a), a, 1e-15);
    EXPECT_MATRIX_NEAR(partial_trace(tensor_product(a, b), dims, keep_b), b, 1e-15);
}

TEST(PartialTrace, entangled_polarization_pair) {
    // sqrt(.7)|HH> + sqrt(.3)|VV>: <beta_j|beta_i> vanishes off the diagonal.
    Vector psi{std::sqrt(0.7), 0, 0, std::sqrt(0.3)};
    std::size_t dims[] = {2, 2};
    std::size_t keep[] = {0};
    Matrix w = partial_trace(Matrix::outer(psi, psi), dims, keep);
    EXPECT_MATRIX_NEAR(w, Matrix::from_rows({{0.7, 0}, {0, 0.3}}), 1e-15);
}

TEST(PartialTrace, singlet_marginals_are_maximally_mixed) {
    Vector s{0, kS, -kS, 0};
    std::size_t dims[] = {2, 2};
    for (std::size_t k = 0; k < 2; k++) {
        std::size_t keep[] = {k};
        EXPECT_MATRIX_NEAR(partial_trace(Matrix::outer(s, s), dims, keep), Matrix::identity(2) * 0.5, 1e-15);
    }
}

TEST(PartialTrace, dimension_mismatch) {
    std::size_t dims[] = {2, 3};
    std::size_t keep[] = {0};
    try {
        partial_trace(Matrix::identity(5), dims, keep);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
    std::size_t bad_keep[] = {2};
    EXPECT_THROW(partial_trace(Matrix::identity(6), dims, bad_keep), Error);
}

TEST(PartialTrace, preserves_trace_and_matches_brute_force) {
    Stream rng(5);
    std::size_t dims[] = {2, 3, 2};
    for (int trial = 0; trial < 10; trial++) {
        Matrix a = random_matrix(12, 12, rng);
        Matrix rho = a * a.adjoint();
        rho *= 1.0 / rho.trace();
        std::size_t keep[] = {0, 2};
        Matrix red = partial_trace(rho, dims, keep);
        EXPECT_NEAR(std::abs(red.trace() - rho.trace()), 0.0, 1e-12);
        // Brute force over the middle factor.
        for (std::size_t i0 = 0; i0 < 2; i0++)
            for (std::size_t i2 = 0; i2 < 2; i2++)
                for (std::size_t j0 = 0; j0 < 2; j0++)
                    for (std::size_t j2 = 0; j2 < 2; j2++) {
                        Complex s = 0;
                        for (std::size_t k = 0; k < 3; k++) s += rho(i0 * 6 + k * 2 + i2, j0 * 6 + k * 2 + j2);
                        EXPECT_NEAR(std::abs(red(i0 * 2 + i2, j0 * 2 + j2) - s), 0.0, 1e-14);
                    }
        std::size_t keep_rev[] = {2, 0};
        EXPECT_EQ(partial_trace(rho, dims, keep_rev), red);
    }
}

TEST(HermitianEig, diagonal) {
    auto eig = hermitian_eig(Matrix::from_rows({{0.7, 0}, {0, 0.3}}));
    EXPECT_EQ(eig.eigenvalues, (std::vector<double>{0.7, 0.3}));
    EXPECT_EQ(eig.eigenvectors[0], (Vector{1, 0}));
    EXPECT_EQ(eig.eigenvectors[1], (Vector{0, 1}));
}

TEST(HermitianEig, ascending_diagonal_is_sorted) {
    auto eig = hermitian_eig(Matrix::from_rows({{0.3, 0}, {0, 0.7}}));
    EXPECT_EQ(eig.eigenvalues, (std::vector<double>{0.7, 0.3}));
    EXPECT_EQ(eig.eigenvectors[0], (Vector{0, 1}));
}

TEST(HermitianEig, pauli_x) {
    auto eig = hermitian_eig(Matrix::from_rows({{0, 1}, {1, 0}}));
    EXPECT_NEAR(eig.eigenvalues[0], 1.0, 1e-15);
    EXPECT_NEAR(eig.eigenvalues[1], -1.0, 1e-15);
    // Closed form (e0 +- e1)/sqrt2, up to phase.
    EXPECT_NEAR(std::abs(inner(eig.eigenvectors[0], Vector{kS, kS})), 1.0, 1e-15);
    EXPECT_NEAR(std::abs(inner(eig.eigenvectors[1], Vector{kS, -kS})), 1.0, 1e-15);
}

TEST(HermitianEig, complex_entries) {
    // Pauli-y: eigenvalues +-1 with eigenvectors (1, +-i)/sqrt2.
    auto eig = hermitian_eig(Matrix::from_rows({{0, Complex(0, -1)}, {Complex(0, 1), 0}}));
    EXPECT_NEAR(eig.eigenvalues[0], 1.0, 1e-15);
    EXPECT_NEAR(std::abs(inner(eig.eigenvectors[0], Vector{kS, Complex(0, kS)})), 1.0, 1e-15);
}

TEST(HermitianEig, not_hermitian) {
    try {
        hermitian_eig(Matrix::from_rows({{0, 1}, {0, 0}}));
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::NotHermitian);
    }
}

TEST(HermitianEig, random_reconstruction_and_orthonormality) {
    Stream rng(2026);
    for (std::size_t n = 1; n <= 16; n++) {
        for (int trial = 0; trial < 5; trial++) {
            Matrix h = random_hermitian(n, rng);
            auto eig = hermitian_eig(h);
            EXPECT_LE((eig.reconstruct() - h).frobenius_norm(), 1e-9) << "n=" << n;
            EXPECT_LE(orthonormality_defect(eig.eigenvectors), 1e-9);
            EXPECT_TRUE(std::is_sorted(eig.eigenvalues.rbegin(), eig.eigenvalues.rend()));
        }
    }
}

TEST(HermitianEig, degenerate_spectrum) {
    Stream rng(3);
    Matrix w = steerlab::testing::density_with_spectrum({0.25, 0.25, 0.5, 0.0}, rng);
    auto eig = hermitian_eig(w);
    EXPECT_NEAR(eig.eigenvalues[0], 0.5, 1e-12);
    EXPECT_NEAR(eig.eigenvalues[1], 0.25, 1e-12);
    EXPECT_NEAR(eig.eigenvalues[2], 0.25, 1e-12);
    EXPECT_NEAR(eig.eigenvalues[3], 0.0, 1e-12);
    EXPECT_LE((eig.reconstruct() - w).frobenius_norm(), 1e-12);
}

TEST(HermitianEig, deterministic) {
    Stream rng(8);
    Matrix h = random_hermitian(7, rng);
    auto a = hermitian_eig(h);
    auto b = hermitian_eig(h);
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);
    EXPECT_EQ(a.eigenvectors, b.eigenvectors);
}

TEST(GramSchmidt, basis_vector_is_completed_in_order) {
    std::vector<Vector> partial{{1, 0}};
    auto out = gram_schmidt_complete(partial, 2);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0], (Vector{1, 0}));
    EXPECT_EQ(out[1], (Vector{0, 1}));
}

TEST(GramSchmidt, diagonal_vector) {
    std::vector<Vector> partial{{kS, kS}};
    auto out = gram_schmidt_complete(partial, 2);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[0], partial[0]);
    EXPECT_NEAR(std::abs(inner(out[0], out[1])), 0.0, 1e-15);
    EXPECT_NEAR(norm(out[1]), 1.0, 1e-15);
}

TEST(GramSchmidt, empty_input_gives_standard_basis) {
    auto out = gram_schmidt_complete({}, 4);
    ASSERT_EQ(out.size(), 4u);
    for (std::size_t i = 0; i < 4; i++) EXPECT_EQ(out[i], basis_vector(4, i));
}

TEST(GramSchmidt, rejects_non_orthonormal) {
    std::vector<Vector> partial{{1, 0}, {kS, kS}};
    try {
        gram_schmidt_complete(partial, 2);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::NotOrthonormal);
    }
}

TEST(GramSchmidt, random_partial_sets) {
    Stream rng(21);
    for (std::size_t dim = 1; dim <= 8; dim++) {
        for (std::size_t k = 0; k <= dim; k++) {
            Matrix u = random_unitary(dim, rng);
            std::vector<Vector> partial;
            for (std::size_t c = 0; c < k; c++) partial.push_back(u.column(c));
            auto out = gram_schmidt_complete(partial, dim);
            ASSERT_EQ(out.size(), dim);
            EXPECT_LE(orthonormality_defect(out), 1e-9);
            for (std::size_t c = 0; c < k; c++) EXPECT_EQ(out[c], partial[c]);
        }
    }
}

TEST(Predicates, identity) {
    Matrix i = Matrix::identity(1);
    EXPECT_TRUE(is_unitary(i));
    EXPECT_TRUE(is_hermitian(i));
    EXPECT_TRUE(is_density(i));
}

TEST(Predicates, hadamard) {
    Matrix h = Matrix::from_rows({{kS, kS}, {kS, -kS}});
    EXPECT_TRUE(is_unitary(h));
    EXPECT_TRUE(is_hermitian(h));
    // Trace 0 and eigenvalue -1.
    EXPECT_FALSE(is_density(h));
}

TEST(Predicates, diagonal_density) {
    EXPECT_TRUE(is_density(Matrix::from_rows({{0.7, 0}, {0, 0.3}})));
    EXPECT_FALSE(is_density(Matrix::from_rows({{1.2, 0}, {0, -0.2}})));
    EXPECT_FALSE(is_unitary(Matrix::from_rows({{1, 0}, {0, 2}})));
    EXPECT_FALSE(is_hermitian(Matrix(2, 3)));
}

TEST(Matrix, rejects_non_finite_entries) {
    try {
        Matrix::from_rows({{1, std::nan("")}});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), ErrorCode::NonFinite);
    }
}

TEST(Factors, permute_and_apply) {
    Stream rng(4);
    std::size_t dims[] = {2, 3, 2};
    Vector v = random_state_vector(12, rng);
    std::size_t perm[] = {2, 0, 1};
    Vector p = permute_factors(v, dims, perm);
    std::size_t pdims[] = {2, 2, 3};
    std::size_t inv[] = {1, 2, 0};
    EXPECT_EQ(permute_factors(p, pdims, inv), v);

    // Acting on factor 1 equals the explicit 1 (x) m (x) 1.
    Matrix m = random_matrix(3, 3, rng);
    std::size_t target[] = {1};
    Matrix full = tensor_product(tensor_product(Matrix::identity(2), m), Matrix::identity(2));
    EXPECT_LE(distance(apply_on_factors(m, v, dims, target), full * std::span<const Complex>(v)), 1e-13);

    // Two targets in swapped order.
    Matrix m2 = random_matrix(4, 4, rng);
    std::size_t targets[] = {2, 0};
    Vector direct = apply_on_factors(m2, v, dims, targets);
    std::size_t to_front[] = {2, 0, 1};
    std::size_t front_dims[] = {2, 2, 3};
    Vector moved = permute_factors(v, dims, to_front);
    Vector via = tensor_product(m2, Matrix::identity(3)) * std::span<const Complex>(moved);
    std::size_t back[] = {1, 2, 0};
    EXPECT_LE(distance(direct, permute_factors(via, front_dims, back)), 1e-13);
}
