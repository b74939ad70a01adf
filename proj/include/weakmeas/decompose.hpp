// Closed-form 2x2 eigendecomposition and polar decomposition.
//
// Both are exact small-matrix computations with pinned deterministic
// conventions (eigenvalue ordering, tie-breaking, phase normalization,
// rank-deficient completion) so that downstream record analysis is
// bit-reproducible.
#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "weakmeas/errors.hpp"
#include "weakmeas/mat2.hpp"

namespace weakmeas {

struct EigPair {
    double value{};
    Vec2 vector{};
};

/// Eigensystem of a Hermitian 2x2 matrix, ordered so first.value >= second.value.
struct HermitianEigen {
    EigPair first, second;
};

namespace detail {

/// Phase-normalize a unit vector: the component of larger modulus (ties break
/// toward the first) is made real and nonnegative.
inline Vec2 phase_normalize(Vec2 v) {
    const Complex lead = std::abs(v.x) >= std::abs(v.y) ? v.x : v.y;
    const double mag = std::abs(lead);
    if (mag == 0.0) return v;
    const Complex phase = lead / mag;
    return {v.x * std::conj(phase), v.y * std::conj(phase)};
}

/// Unit vector orthogonal to a unit vector, completing it to an SU(2) frame.
inline Vec2 orthogonal_complement(const Vec2& u) {
    return {-std::conj(u.y), std::conj(u.x)};
}

} // namespace detail

/// Eigendecomposition of a Hermitian 2x2 matrix.
///
/// Eigenvalues are ordered descending. Eigenvectors are orthonormal with the
/// phase convention of `phase_normalize`; for a degenerate (scalar) matrix
/// they fall back to the computational basis, which keeps repeated runs
/// orientation-stable. Throws std::domain_error when the input fails the
/// Hermiticity tolerance 1e-10 (relative to its norm).
inline HermitianEigen eig_hermitian2(const Mat2& m) {
    const double scale = std::max(1.0, m.frobenius_norm());
    if (distance(m, m.adjoint()) > 1e-10 * scale)
        throw std::domain_error("eig_hermitian2: matrix is not Hermitian");

    const double a = m.a.real();
    const double d = m.d.real();
    const Complex b = 0.5 * (m.b + std::conj(m.c));

    const double mean = 0.5 * (a + d);
    const double disc = std::hypot(0.5 * (a - d), std::abs(b));
    const double val1 = mean + disc;
    const double val2 = mean - disc;

    Vec2 v1;
    if (std::abs(b) == 0.0) {
        v1 = (a >= d) ? Vec2{1.0, 0.0} : Vec2{0.0, 1.0};
    } else {
        // Two algebraically equivalent eigenvector candidates; take the one
        // with the larger norm for numerical stability.
        const Vec2 u{b, Complex(val1 - a)};
        const Vec2 w{Complex(val1 - d), std::conj(b)};
        v1 = (u.norm_sq() >= w.norm_sq()) ? u : w;
        v1 = v1 / v1.norm();
    }
    v1 = detail::phase_normalize(v1);
    const Vec2 v2 = detail::phase_normalize(detail::orthogonal_complement(v1));
    return {{val1, v1}, {val2, v2}};
}

struct PolarDecomposition {
    Mat2 rot;  ///< unitary factor
    Mat2 meas; ///< Hermitian PSD factor, sqrt(m^dag m)
};

/// Polar decomposition m = rot * meas with meas = sqrt(m^dag m).
///
/// When the smaller singular value vanishes, the free column of `rot` is
/// completed deterministically via `orthogonal_complement`. Throws
/// DegenerateInputError when both singular values are below 1e-300.
inline PolarDecomposition polar_decompose(const Mat2& m) {
    const HermitianEigen eig = eig_hermitian2(m.adjoint() * m);
    const double s1 = std::sqrt(std::max(eig.first.value, 0.0));
    const double s2 = std::sqrt(std::max(eig.second.value, 0.0));
    if (s1 < 1e-300)
        throw DegenerateInputError("polar_decompose: matrix is numerically zero");

    const Vec2& v1 = eig.first.vector;
    const Vec2& v2 = eig.second.vector;
    const Mat2 meas = s1 * Mat2::outer(v1, v1) + s2 * Mat2::outer(v2, v2);

    Vec2 u1 = (m * v1) / s1;
    u1 = u1 / u1.norm();
    Vec2 u2;
    if (s2 <= s1 * 1e-12) {
        u2 = detail::orthogonal_complement(u1);
    } else {
        u2 = (m * v2) / s2;
        // Re-orthogonalize against u1; rounding in a badly conditioned m must
        // not leak into the unitarity of rot.
        const Complex overlap = inner(u1, u2);
        u2 = u2 - u1 * overlap;
        const double n = u2.norm();
        u2 = (n > 1e-8) ? u2 / n : detail::orthogonal_complement(u1);
    }

    const Mat2 rot = Mat2::outer(u1, v1) + Mat2::outer(u2, v2);
    return {rot, meas};
}

} // namespace weakmeas
