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
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "steerlab/error.hpp"

/// Dense complex linear algebra for the small dimensions (<= 64) that
/// steering experiments need. Storage is row-major; subsystem 0 is the
/// leftmost tensor factor.
namespace steerlab {

using Complex = std::complex<double>;
using Vector = std::vector<Complex>;

/// Eigenvalues at or below this are treated as exact zeros.
inline constexpr double kRankEpsilon = 1e-10;
/// Default comparison tolerance.
inline constexpr double kDefaultTol = 1e-9;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

class Matrix {
   public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {
    }

    Matrix(std::size_t rows, std::size_t cols, std::vector<Complex> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (data_.size() != rows_ * cols_) {
            throw Error(ErrorCode::DimensionMismatch, "entry count does not match rows*cols");
        }
        for (const auto &z : data_) {
            if (!is_finite(z)) {
                throw Error(ErrorCode::NonFinite, "matrix entry is not finite");
            }
        }
    }

    /// Row-by-row literal, e.g. Matrix::from_rows({{0, 1}, {1, 0}}).
    static Matrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
        std::size_t r = rows.size();
        std::size_t c = r == 0 ? 0 : rows.begin()->size();
        std::vector<Complex> data;
        data.reserve(r * c);
        for (const auto &row : rows) {
            if (row.size() != c) {
                throw Error(ErrorCode::DimensionMismatch, "ragged row literal");
            }
            data.insert(data.end(), row.begin(), row.end());
        }
        return Matrix(r, c, std::move(data));
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; i++) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static Matrix diagonal(std::span<const double> values) {
        Matrix m(values.size(), values.size());
        for (std::size_t i = 0; i < values.size(); i++) {
            m(i, i) = values[i];
        }
        return m;
    }

    /// |a><b|
    static Matrix outer(std::span<const Complex> a, std::span<const Complex> b) {
        Matrix m(a.size(), b.size());
        for (std::size_t i = 0; i < a.size(); i++) {
            for (std::size_t j = 0; j < b.size(); j++) {
                m(i, j) = a[i] * std::conj(b[j]);
            }
        }
        return m;
    }

    /// Matrix whose columns are the given vectors.
    static Matrix from_columns(std::span<const Vector> columns) {
        if (columns.empty()) {
            return Matrix();
        }
        Matrix m(columns[0].size(), columns.size());
        for (std::size_t j = 0; j < columns.size(); j++) {
            if (columns[j].size() != m.rows_) {
                throw Error(ErrorCode::DimensionMismatch, "columns of unequal length");
            }
            for (std::size_t i = 0; i < m.rows_; i++) {
                m(i, j) = columns[j][i];
            }
        }
        return m;
    }

    std::size_t rows() const noexcept {
        return rows_;
    }
    std::size_t cols() const noexcept {
        return cols_;
    }
    bool is_square() const noexcept {
        return rows_ == cols_;
    }
    std::span<const Complex> data() const noexcept {
        return data_;
    }

    Complex &operator()(std::size_t r, std::size_t c) {
        return data_[r * cols_ + c];
    }
    const Complex &operator()(std::size_t r, std::size_t c) const {
        return data_[r * cols_ + c];
    }

    Vector column(std::size_t c) const {
        Vector v(rows_);
        for (std::size_t r = 0; r < rows_; r++) {
            v[r] = (*this)(r, c);
        }
        return v;
    }

    Matrix adjoint() const {
        Matrix m(cols_, rows_);
        for (std::size_t r = 0; r < rows_; r++) {
            for (std::size_t c = 0; c < cols_; c++) {
                m(c, r) = std::conj((*this)(r, c));
            }
        }
        return m;
    }

    Complex trace() const {
        Complex t = 0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); i++) {
            t += (*this)(i, i);
        }
        return t;
    }

    double frobenius_norm() const {
        double s = 0;
        for (const auto &z : data_) {
            s += std::norm(z);
        }
        return std::sqrt(s);
    }

    Matrix &operator+=(const Matrix &other) {
        require_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); k++) {
            data_[k] += other.data_[k];
        }
        return *this;
    }

    Matrix &operator-=(const Matrix &other) {
        require_same_shape(other);
        for (std::size_t k = 0; k < data_.size(); k++) {
            data_[k] -= other.data_[k];
        }
        return *this;
    }

    Matrix &operator*=(Complex s) {
        for (auto &z : data_) {
            z *= s;
        }
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix &b) {
        return a += b;
    }
    friend Matrix operator-(Matrix a, const Matrix &b) {
        return a -= b;
    }
    friend Matrix operator*(Matrix a, Complex s) {
        return a *= s;
    }
    friend Matrix operator*(Complex s, Matrix a) {
        return a *= s;
    }

    friend Matrix operator*(const Matrix &a, const Matrix &b) {
        if (a.cols_ != b.rows_) {
            throw Error(ErrorCode::DimensionMismatch, "matrix product shape mismatch");
        }
        Matrix m(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; i++) {
            for (std::size_t k = 0; k < a.cols_; k++) {
                Complex aik = a(i, k);
                if (aik == Complex(0)) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; j++) {
                    m(i, j) += aik * b(k, j);
                }
            }
        }
        return m;
    }

    friend Vector operator*(const Matrix &a, std::span<const Complex> v) {
        if (a.cols_ != v.size()) {
            throw Error(ErrorCode::DimensionMismatch, "matrix-vector shape mismatch");
        }
        Vector out(a.rows_);
        for (std::size_t i = 0; i < a.rows_; i++) {
            Complex s = 0;
            for (std::size_t j = 0; j < a.cols_; j++) {
                s += a(i, j) * v[j];
            }
            out[i] = s;
        }
        return out;
    }

    friend bool operator==(const Matrix &, const Matrix &) = default;

   private:
    void require_same_shape(const Matrix &other) const {
        if (rows_ != other.rows_ || cols_ != other.cols_) {
            throw Error(ErrorCode::DimensionMismatch, "matrix shapes differ");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<Complex> data_;
};

// ---------------------------------------------------------------------------
// Vector helpers

/// <a|b>, conjugate-linear in the first argument.
inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "inner product of unequal dimensions");
    }
    Complex s = 0;
    for (std::size_t i = 0; i < a.size(); i++) {
        s += std::conj(a[i]) * b[i];
    }
    return s;
}

inline double norm(std::span<const Complex> v) {
    double s = 0;
    for (const auto &z : v) {
        s += std::norm(z);
    }
    return std::sqrt(s);
}

inline Vector scaled(std::span<const Complex> v, Complex s) {
    Vector out(v.begin(), v.end());
    for (auto &z : out) {
        z *= s;
    }
    return out;
}

inline Vector added(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "vector sum of unequal dimensions");
    }
    Vector out(a.begin(), a.end());
    for (std::size_t i = 0; i < out.size(); i++) {
        out[i] += b[i];
    }
    return out;
}

inline Vector subtracted(std::span<const Complex> a, std::span<const Complex> b) {
    return added(a, scaled(b, -1.0));
}

inline double distance(std::span<const Complex> a, std::span<const Complex> b) {
    return norm(subtracted(a, b));
}

inline Vector basis_vector(std::size_t dim, std::size_t index) {
    Vector v(dim);
    v.at(index) = 1.0;
    return v;
}

/// Kronecker product of two vectors; `a` is the leftmost factor.
inline Vector tensor_product(std::span<const Complex> a, std::span<const Complex> b) {
    Vector out(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); i++) {
        for (std::size_t j = 0; j < b.size(); j++) {
            out[i * b.size() + j] = a[i] * b[j];
        }
    }
    return out;
}

/// Kronecker product: block (i, j) of the result is a(i, j) * b.
inline Matrix tensor_product(const Matrix &a, const Matrix &b) {
    Matrix m(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); i++) {
        for (std::size_t j = 0; j < a.cols(); j++) {
            Complex aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); k++) {
                for (std::size_t l = 0; l < b.cols(); l++) {
                    m(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
                }
            }
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Subsystem bookkeeping

inline std::size_t product_of(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

namespace detail {

/// Splits a flat index into per-factor digits (factor 0 most significant).
inline void unflatten(std::size_t index, std::span<const std::size_t> dims, std::span<std::size_t> digits) {
    for (std::size_t f = dims.size(); f-- > 0;) {
        digits[f] = index % dims[f];
        index /= dims[f];
    }
}

inline std::size_t flatten(std::span<const std::size_t> digits, std::span<const std::size_t> dims) {
    std::size_t index = 0;
    for (std::size_t f = 0; f < dims.size(); f++) {
        index = index * dims[f] + digits[f];
    }
    return index;
}

inline void check_factor_set(std::span<const std::size_t> factors, std::size_t count, bool allow_empty) {
    if (!allow_empty && factors.empty()) {
        throw Error(ErrorCode::DimensionMismatch, "factor set must be nonempty");
    }
    std::vector<bool> seen(count, false);
    for (std::size_t f : factors) {
        if (f >= count || seen[f]) {
            throw Error(ErrorCode::DimensionMismatch, "factor index out of range or repeated");
        }
        seen[f] = true;
    }
}

}  // namespace detail

/// Reduced operator on the `keep` factors (kept in their original order).
inline Matrix partial_trace(const Matrix &rho, std::span<const std::size_t> dims, std::span<const std::size_t> keep) {
    std::size_t total = product_of(dims);
    if (!rho.is_square() || rho.rows() != total) {
        throw Error(ErrorCode::DimensionMismatch, "product of subsystem dims does not match operator dimension");
    }
    detail::check_factor_set(keep, dims.size(), false);

    std::vector<std::size_t> kept(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    std::vector<std::size_t> traced;
    for (std::size_t f = 0; f < dims.size(); f++) {
        if (!std::binary_search(kept.begin(), kept.end(), f)) {
            traced.push_back(f);
        }
    }
    std::vector<std::size_t> kept_dims, traced_dims;
    for (auto f : kept) kept_dims.push_back(dims[f]);
    for (auto f : traced) traced_dims.push_back(dims[f]);
    std::size_t n_keep = product_of(kept_dims);
    std::size_t n_trace = product_of(traced_dims);

    // full_index[k][t] = flat index into rho for kept digits k and traced digits t.
    std::vector<std::size_t> full_index(n_keep * n_trace);
    std::vector<std::size_t> kd(kept.size()), td(traced.size()), digits(dims.size());
    for (std::size_t k = 0; k < n_keep; k++) {
        detail::unflatten(k, kept_dims, kd);
        for (std::size_t t = 0; t < n_trace; t++) {
            detail::unflatten(t, traced_dims, td);
            for (std::size_t i = 0; i < kept.size(); i++) digits[kept[i]] = kd[i];
            for (std::size_t i = 0; i < traced.size(); i++) digits[traced[i]] = td[i];
            full_index[k * n_trace + t] = detail::flatten(digits, dims);
        }
    }

    Matrix out(n_keep, n_keep);
    for (std::size_t i = 0; i < n_keep; i++) {
        for (std::size_t j = 0; j < n_keep; j++) {
            Complex s = 0;
            for (std::size_t t = 0; t < n_trace; t++) {
                s += rho(full_index[i * n_trace + t], full_index[j * n_trace + t]);
            }
            out(i, j) = s;
        }
    }
    return out;
}

/// Reorders tensor factors of a state: output factor k is input factor perm[k].
inline Vector permute_factors(std::span<const Complex> v, std::span<const std::size_t> dims,
                              std::span<const std::size_t> perm) {
    if (product_of(dims) != v.size() || perm.size() != dims.size()) {
        throw Error(ErrorCode::DimensionMismatch, "permutation does not match state layout");
    }
    detail::check_factor_set(perm, dims.size(), false);
    std::vector<std::size_t> out_dims(dims.size());
    for (std::size_t k = 0; k < perm.size(); k++) out_dims[k] = dims[perm[k]];
    Vector out(v.size());
    std::vector<std::size_t> digits(dims.size()), out_digits(dims.size());
    for (std::size_t idx = 0; idx < v.size(); idx++) {
        detail::unflatten(idx, dims, digits);
        for (std::size_t k = 0; k < perm.size(); k++) out_digits[k] = digits[perm[k]];
        out[detail::flatten(out_digits, out_dims)] = v[idx];
    }
    return out;
}

/// Applies `op` to the `targets` factors of `v` (in the listed order), identity elsewhere.
inline Vector apply_on_factors(const Matrix &op, std::span<const Complex> v, std::span<const std::size_t> dims,
                               std::span<const std::size_t> targets) {
    if (product_of(dims) != v.size()) {
        throw Error(ErrorCode::DimensionMismatch, "subsystem dims do not match state dimension");
    }
    detail::check_factor_set(targets, dims.size(), false);
    std::vector<std::size_t> target_dims;
    for (auto f : targets) target_dims.push_back(dims[f]);
    std::size_t n_target = product_of(target_dims);
    if (!op.is_square() || op.rows() != n_target) {
        throw Error(ErrorCode::DimensionMismatch, "operator does not act on the target factors");
    }

    Vector out(v.size());
    std::vector<std::size_t> digits(dims.size()), td(targets.size());
    std::vector<std::size_t> block(n_target);
    std::vector<bool> done(v.size(), false);
    for (std::size_t idx = 0; idx < v.size(); idx++) {
        if (done[idx]) {
            continue;
        }
        // Enumerate the fiber of indices that differ from idx only on target factors.
        detail::unflatten(idx, dims, digits);
        for (std::size_t t = 0; t < n_target; t++) {
            detail::unflatten(t, target_dims, td);
            for (std::size_t i = 0; i < targets.size(); i++) digits[targets[i]] = td[i];
            block[t] = detail::flatten(digits, dims);
            done[block[t]] = true;
        }
        for (std::size_t r = 0; r < n_target; r++) {
            Complex s = 0;
            for (std::size_t c = 0; c < n_target; c++) {
                s += op(r, c) * v[block[c]];
            }
            out[block[r]] = s;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Predicates

inline bool is_hermitian(const Matrix &h, double tol = kDefaultTol) {
    return h.is_square() && (h - h.adjoint()).frobenius_norm() <= tol;
}

inline bool is_unitary(const Matrix &u, double tol = kDefaultTol) {
    return u.is_square() && (u.adjoint() * u - Matrix::identity(u.rows())).frobenius_norm() <= tol;
}

/// Largest |<v_i|v_j> - delta_ij| over the set.
inline double orthonormality_defect(std::span<const Vector> vs) {
    double worst = 0;
    for (std::size_t i = 0; i < vs.size(); i++) {
        for (std::size_t j = i; j < vs.size(); j++) {
            Complex g = inner(vs[i], vs[j]);
            worst = std::max(worst, std::abs(g - (i == j ? Complex(1) : Complex(0))));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition

struct EigenDecomposition {
    /// Descending.
    std::vector<double> eigenvalues;
    /// Orthonormal, in the same order as the eigenvalues.
    std::vector<Vector> eigenvectors;

    Matrix reconstruct() const {
        std::size_t n = eigenvectors.empty() ? 0 : eigenvectors[0].size();
        Matrix m(n, n);
        for (std::size_t i = 0; i < eigenvalues.size(); i++) {
            m += Matrix::outer(eigenvectors[i], eigenvectors[i]) * eigenvalues[i];
        }
        return m;
    }
};

/// Rotates `v` by a global phase so its largest-magnitude entry (lowest index
/// on ties) is real and positive.
inline Vector canonical_phase(std::span<const Complex> v) {
    std::size_t best = 0;
    double best_mag = -1;
    for (std::size_t i = 0; i < v.size(); i++) {
        double mag = std::abs(v[i]);
        // Relative slack so rounding noise cannot flip the choice between equal entries.
        if (mag > best_mag * (1 + 1e-12) + 1e-300) {
            best = i;
            best_mag = mag;
        }
    }
    if (best_mag <= 0) {
        return Vector(v.begin(), v.end());
    }
    Complex phase = std::conj(v[best]) / std::abs(v[best]);
    Vector out = scaled(v, phase);
    out[best] = std::abs(v[best]);
    return out;
}

/// Cyclic Jacobi diagonalization. Sweeps visit (p, q) pairs in row order, so
/// identical input gives bit-identical output. Equal eigenvalues keep their
/// Jacobi order; callers must not rely on a particular basis of a degenerate
/// eigenspace.
inline EigenDecomposition hermitian_eig(const Matrix &h, double tol = kDefaultTol) {
    if (!h.is_square()) {
        throw Error(ErrorCode::DimensionMismatch, "eigendecomposition needs a square matrix");
    }
    if (!is_hermitian(h, tol)) {
        throw Error(ErrorCode::NotHermitian, "matrix is not Hermitian within tolerance");
    }
    const std::size_t n = h.rows();
    Matrix a = (h + h.adjoint()) * 0.5;
    Matrix v = Matrix::identity(n);

    auto off_norm = [&] {
        double s = 0;
        for (std::size_t p = 0; p < n; p++)
            for (std::size_t q = p + 1; q < n; q++) s += std::norm(a(p, q));
        return std::sqrt(s);
    };
    const double scale = std::max(a.frobenius_norm(), 1e-300);

    for (int sweep = 0; sweep < 64 && off_norm() > 1e-15 * scale; sweep++) {
        for (std::size_t p = 0; p < n; p++) {
            for (std::size_t q = p + 1; q < n; q++) {
                Complex apq = a(p, q);
                double r = std::abs(apq);
                if (r <= 1e-300) {
                    continue;
                }
                // Phase-align apq to a real value, then apply a real rotation.
                Complex e = apq / r;  // e^{i phi}
                double app = a(p, p).real();
                double aqq = a(q, q).real();
                double theta = 0.5 * std::atan2(2 * r, aqq - app);
                double c = std::cos(theta);
                double s = std::sin(theta);
                Complex s_conj_e = s * std::conj(e);  // s e^{-i phi}
                Complex c_conj_e = c * std::conj(e);  // c e^{-i phi}

                // A <- A J, V <- V J with J_pp = c, J_pq = s, J_qp = -s e^{-i phi}, J_qq = c e^{-i phi}.
                for (std::size_t k = 0; k < n; k++) {
                    Complex akp = a(k, p), akq = a(k, q);
                    a(k, p) = akp * c - akq * s_conj_e;
                    a(k, q) = akp * s + akq * c_conj_e;
                    Complex vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = vkp * c - vkq * s_conj_e;
                    v(k, q) = vkp * s + vkq * c_conj_e;
                }
                // A <- J^dagger A.
                for (std::size_t k = 0; k < n; k++) {
                    Complex apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * e * aqk;
                    a(q, k) = s * apk + c * e * aqk;
                }
                a(p, q) = 0;
                a(q, p) = 0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() > a(j, j).real(); });
    EigenDecomposition out;
    for (std::size_t i : order) {
        out.eigenvalues.push_back(a(i, i).real());
        out.eigenvectors.push_back(canonical_phase(v.column(i)));
    }
    return out;
}

inline bool is_density(const Matrix &w, double tol = kDefaultTol) {
    if (!is_hermitian(w, tol) || std::abs(w.trace() - Complex(1)) > tol) {
        return false;
    }
    auto eig = hermitian_eig(w, tol);
    return eig.eigenvalues.empty() || eig.eigenvalues.back() >= -tol;
}

// ---------------------------------------------------------------------------
// Orthonormal completion

/// Extends an orthonormal set to a basis of C^dim. The input vectors come
/// first, unchanged; the rest are standard basis vectors e_0, e_1, ...
/// projected off the running set, kept when the residual norm exceeds
/// kRankEpsilon.
inline std::vector<Vector> gram_schmidt_complete(std::span<const Vector> partial, std::size_t dim,
                                                 double tol = kDefaultTol) {
    if (partial.size() > dim) {
        throw Error(ErrorCode::NotOrthonormal, "more vectors than the space dimension");
    }
    for (const auto &v : partial) {
        if (v.size() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "vector dimension differs from dim");
        }
    }
    if (orthonormality_defect(partial) > tol) {
        throw Error(ErrorCode::NotOrthonormal, "input vectors are not orthonormal within tolerance");
    }

    std::vector<Vector> out(partial.begin(), partial.end());
    for (std::size_t k = 0; k < dim && out.size() < dim; k++) {
        Vector r = basis_vector(dim, k);
        for (int pass = 0; pass < 2; pass++) {
            for (const auto &b : out) {
                Complex c = inner(b, r);
                for (std::size_t i = 0; i < dim; i++) r[i] -= c * b[i];
            }
        }
        double rn = norm(r);
        if (rn > kRankEpsilon) {
            out.push_back(scaled(r, 1.0 / rn));
        }
    }
    return out;
}

}  // namespace steerlab
