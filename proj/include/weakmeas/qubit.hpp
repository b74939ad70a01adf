// Qubit state representations: density matrices, Bloch vectors, the probed
// operator sigma_n and its eigenbasis (the charge basis).
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "weakmeas/errors.hpp"
#include "weakmeas/mat2.hpp"

namespace weakmeas {

struct BlochVector {
    double x{}, y{}, z{};

    double norm_sq() const { return x * x + y * y + z * z; }
    double norm() const { return std::sqrt(norm_sq()); }
    double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
    BlochVector operator-() const { return {-x, -y, -z}; }

    static BlochVector from_angles(double theta, double phi) {
        return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                std::cos(theta)};
    }
};

/// 2x2 Hermitian, trace-one, positive-semidefinite qubit state.
///
/// `checked` validates all three invariants; `renormalized` restores
/// Hermiticity and unit trace without a positivity check, which is what the
/// Euler integrators need (their small transient negativity is part of the
/// discretization error, not a bug to throw on).
struct DensityMatrix {
    Mat2 m;

    static constexpr double kHermTol = 1e-12;
    static constexpr double kTraceTol = 1e-12;
    static constexpr double kPsdTol = 1e-12;

    static DensityMatrix checked(const Mat2& rho) {
        if (!rho.finite()) throw std::invalid_argument("density matrix has non-finite entries");
        const double scale = std::max(1.0, rho.frobenius_norm());
        if (distance(rho, rho.adjoint()) > kHermTol * scale)
            throw std::invalid_argument("density matrix is not Hermitian");
        if (std::abs(rho.trace() - Complex(1.0)) > kTraceTol)
            throw std::invalid_argument("density matrix trace is not 1");
        // Eigenvalues of [[p, q], [conj(q), r]]: mean +- sqrt(((p-r)/2)^2 + |q|^2).
        const double p = rho.a.real(), r = rho.d.real();
        const double disc = std::hypot(0.5 * (p - r), std::abs(rho.b));
        if (0.5 * (p + r) - disc < -kPsdTol)
            throw std::invalid_argument("density matrix is not positive semidefinite");
        return DensityMatrix{rho};
    }

    static DensityMatrix renormalized(const Mat2& rho) {
        Mat2 h = (rho + rho.adjoint()) * Complex(0.5);
        const double tr = h.trace().real();
        if (!(tr > 0.0) || !h.finite())
            throw ImpossibleOutcomeError("state renormalization with non-positive trace");
        return DensityMatrix{h / tr};
    }

    static DensityMatrix pure(const Vec2& psi) {
        const double n2 = psi.norm_sq();
        return DensityMatrix{Mat2::outer(psi, psi) / n2};
    }

    static DensityMatrix maximally_mixed() { return DensityMatrix{Mat2::diag(0.5, 0.5)}; }

    double purity() const { return (m * m).trace().real(); }
};

/// r_i = tr(rho sigma_i).
inline BlochVector bloch_from_density(const DensityMatrix& rho) {
    return {2.0 * rho.m.b.real(), -2.0 * rho.m.b.imag(), rho.m.a.real() - rho.m.d.real()};
}

/// rho = (1 + r . sigma) / 2. Throws for |r| > 1 + 1e-10.
inline DensityMatrix density_from_bloch(const BlochVector& r) {
    if (r.norm_sq() > 1.0 + 1e-10)
        throw std::domain_error("Bloch vector lies outside the unit ball");
    return DensityMatrix{Mat2{Complex(0.5 * (1.0 + r.z)), Complex(0.5 * r.x, -0.5 * r.y),
                              Complex(0.5 * r.x, 0.5 * r.y), Complex(0.5 * (1.0 - r.z))}};
}

/// Qubit with energy splitting E (hbar = 1) written in its energy eigenbasis,
/// H = -(E/2) sigma_z, and charge basis tilted by beta from the z axis.
struct QubitModel {
    double energy{};
    double beta{};

    QubitModel(double energy_, double beta_) : energy(energy_), beta(beta_) {
        if (!(energy >= 0.0) || !std::isfinite(energy))
            throw std::invalid_argument("qubit energy must be >= 0");
        if (!(beta >= 0.0 && beta <= std::numbers::pi / 2))
            throw std::invalid_argument("beta must lie in [0, pi/2]");
    }

    Mat2 hamiltonian() const { return Mat2::diag(-0.5 * energy, 0.5 * energy); }
};

/// Probed operator sigma_n = cos(beta) sigma_z + sin(beta) sigma_x.
inline Mat2 sigma_n(double beta) {
    const double cb = std::cos(beta), sb = std::sin(beta);
    return {cb, sb, sb, -cb};
}

/// +1 eigenstate of sigma_n: |R> = cos(beta/2)|0> + sin(beta/2)|1>.
inline Vec2 charge_state_r(double beta) {
    return {std::cos(0.5 * beta), std::sin(0.5 * beta)};
}

/// -1 eigenstate of sigma_n: |L> = sin(beta/2)|0> - cos(beta/2)|1>.
inline Vec2 charge_state_l(double beta) {
    return {std::sin(0.5 * beta), -std::cos(0.5 * beta)};
}

} // namespace weakmeas
