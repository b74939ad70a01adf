// Complex 2x2 matrices and 2-vectors: the value types every propagator,
// Kraus operator and decomposition in this library is built from.
#pragma once

#include <cmath>
#include <complex>

namespace weakmeas {

using Complex = std::complex<double>;

inline bool is_finite(Complex z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

struct Vec2 {
    Complex x{}, y{};

    double norm_sq() const { return std::norm(x) + std::norm(y); }
    double norm() const { return std::sqrt(norm_sq()); }

    Vec2 operator*(Complex s) const { return {x * s, y * s}; }
    Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
};

/// Inner product <u|v>, conjugate-linear in the first argument.
inline Complex inner(const Vec2& u, const Vec2& v) {
    return std::conj(u.x) * v.x + std::conj(u.y) * v.y;
}

/// Row-major 2x2 complex matrix [[a, b], [c, d]].
struct Mat2 {
    Complex a{}, b{}, c{}, d{};

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 zero() { return {}; }
    static Mat2 diag(Complex p, Complex q) { return {p, 0.0, 0.0, q}; }
    /// |u><v|
    static Mat2 outer(const Vec2& u, const Vec2& v) {
        return {u.x * std::conj(v.x), u.x * std::conj(v.y),
                u.y * std::conj(v.x), u.y * std::conj(v.y)};
    }

    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d,
                c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Vec2 operator*(const Vec2& v) const { return {a * v.x + b * v.y, c * v.x + d * v.y}; }
    Mat2 operator*(Complex s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 operator/(double s) const { return {a / s, b / s, c / s, d / s}; }

    Mat2 adjoint() const {
        return {std::conj(a), std::conj(c), std::conj(b), std::conj(d)};
    }
    Complex trace() const { return a + d; }
    Complex det() const { return a * d - b * c; }
    double frobenius_norm_sq() const {
        return std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d);
    }
    double frobenius_norm() const { return std::sqrt(frobenius_norm_sq()); }
    bool finite() const {
        return is_finite(a) && is_finite(b) && is_finite(c) && is_finite(d);
    }
};

inline Mat2 operator*(Complex s, const Mat2& m) { return m * s; }
inline Mat2 operator*(double s, const Mat2& m) { return m * Complex(s, 0.0); }

inline double distance(const Mat2& p, const Mat2& q) { return (p - q).frobenius_norm(); }

inline Mat2 sigma_x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Mat2 sigma_y() { return {0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0}; }
inline Mat2 sigma_z() { return {1.0, 0.0, 0.0, -1.0}; }

/// Deviation from unitarity, ||m m^dag - 1||_F.
inline double unitarity_defect(const Mat2& m) {
    return distance(m * m.adjoint(), Mat2::identity());
}

} // namespace weakmeas
