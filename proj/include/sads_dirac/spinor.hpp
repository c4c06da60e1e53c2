#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>

#include "sads_dirac/error.hpp"

namespace sads_dirac {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/** @brief Four-component complex spinor. */
struct Spinor4 {
    std::array<cplx, 4> c{};

    Spinor4() = default;
    Spinor4(cplx a, cplx b, cplx d, cplx e) : c{a, b, d, e} {}

    cplx& operator[](std::size_t i) { return c[i]; }
    const cplx& operator[](std::size_t i) const { return c[i]; }

    Spinor4& operator+=(const Spinor4& o) {
        for (std::size_t i = 0; i < 4; ++i) c[i] += o.c[i];
        return *this;
    }
    Spinor4& operator-=(const Spinor4& o) {
        for (std::size_t i = 0; i < 4; ++i) c[i] -= o.c[i];
        return *this;
    }
    Spinor4& operator*=(cplx s) {
        for (auto& v : c) v *= s;
        return *this;
    }
    Spinor4& operator*=(double s) {
        for (auto& v : c) v *= s;
        return *this;
    }

    static Spinor4 unit(std::size_t k) {
        Spinor4 e;
        e.c[k] = 1.0;
        return e;
    }

    double norm_inf() const {
        double m = 0.0;
        for (const auto& v : c) m = std::max(m, std::abs(v));
        return m;
    }
    double norm2() const {
        double s = 0.0;
        for (const auto& v : c) s += std::norm(v);
        return std::sqrt(s);
    }
    bool is_finite() const {
        for (const auto& v : c)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }
};

inline Spinor4 operator+(Spinor4 a, const Spinor4& b) { return a += b; }
inline Spinor4 operator-(Spinor4 a, const Spinor4& b) { return a -= b; }
inline Spinor4 operator-(Spinor4 a) { return a *= -1.0; }
inline Spinor4 operator*(cplx s, Spinor4 a) { return a *= s; }
inline Spinor4 operator*(double s, Spinor4 a) { return a *= s; }
inline Spinor4 operator*(Spinor4 a, cplx s) { return a *= s; }

inline double max_abs(const Spinor4& a) { return a.norm_inf(); }

// Bilinear (unconjugated) product a^T b.
inline cplx bilinear(const Spinor4& a, const Spinor4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

// Hermitian product sum a_k conj(b_k).
inline cplx hermitian(const Spinor4& a, const Spinor4& b) {
    return a[0] * std::conj(b[0]) + a[1] * std::conj(b[1]) + a[2] * std::conj(b[2]) +
           a[3] * std::conj(b[3]);
}

/** @brief Dense 4x4 complex matrix, row major. */
struct Matrix4C {
    std::array<cplx, 16> a{};

    cplx& operator()(std::size_t i, std::size_t j) { return a[4 * i + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return a[4 * i + j]; }

    static Matrix4C identity() {
        Matrix4C m;
        for (std::size_t i = 0; i < 4; ++i) m(i, i) = 1.0;
        return m;
    }
    static Matrix4C diag(cplx d0, cplx d1, cplx d2, cplx d3) {
        Matrix4C m;
        m(0, 0) = d0;
        m(1, 1) = d1;
        m(2, 2) = d2;
        m(3, 3) = d3;
        return m;
    }

    Matrix4C& operator+=(const Matrix4C& o) {
        for (std::size_t i = 0; i < 16; ++i) a[i] += o.a[i];
        return *this;
    }
    Matrix4C& operator-=(const Matrix4C& o) {
        for (std::size_t i = 0; i < 16; ++i) a[i] -= o.a[i];
        return *this;
    }
    Matrix4C& operator*=(cplx s) {
        for (auto& v : a) v *= s;
        return *this;
    }

    Matrix4C transpose() const {
        Matrix4C t;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) t(i, j) = (*this)(j, i);
        return t;
    }
    Matrix4C adjoint() const {
        Matrix4C t;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) t(i, j) = std::conj((*this)(j, i));
        return t;
    }
    // Induced sup-norm: max row sum.
    double norm_inf() const {
        double m = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < 4; ++j) s += std::abs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }
    double max_abs() const {
        double m = 0.0;
        for (const auto& v : a) m = std::max(m, std::abs(v));
        return m;
    }
};

inline Matrix4C operator+(Matrix4C a, const Matrix4C& b) { return a += b; }
inline Matrix4C operator-(Matrix4C a, const Matrix4C& b) { return a -= b; }
inline Matrix4C operator*(cplx s, Matrix4C a) { return a *= s; }

inline Matrix4C operator*(const Matrix4C& x, const Matrix4C& y) {
    Matrix4C r;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t k = 0; k < 4; ++k) {
            const cplx xik = x(i, k);
            if (xik == cplx{}) continue;
            for (std::size_t j = 0; j < 4; ++j) r(i, j) += xik * y(k, j);
        }
    return r;
}

inline Spinor4 operator*(const Matrix4C& m, const Spinor4& v) {
    Spinor4 r;
    for (std::size_t i = 0; i < 4; ++i)
        r[i] = m(i, 0) * v[0] + m(i, 1) * v[1] + m(i, 2) * v[2] + m(i, 3) * v[3];
    return r;
}

// Outer product a b^T.
inline Matrix4C outer(const Spinor4& a, const Spinor4& b) {
    Matrix4C r;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) r(i, j) = a[i] * b[j];
    return r;
}

namespace detail {

inline std::array<cplx, 4> pauli(int k) {
    switch (k) {
        case 0: return {1.0, 0.0, 0.0, 1.0};
        case 1: return {1.0, 0.0, 0.0, -1.0};
        case 2: return {0.0, 1.0, 1.0, 0.0};
        case 3: return {0.0, -kI, kI, 0.0};
        default: throw InvalidParameter("pauli index out of range");
    }
}

}  // namespace detail

/** @brief Dirac matrix gamma^mu, mu in {0,1,2,3}, built from Pauli blocks. */
inline Matrix4C gamma(int mu) {
    const auto s = detail::pauli(mu);
    const double lower = (mu == 0) ? -1.0 : 1.0;
    Matrix4C g;
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            g(i, j + 2) = kI * s[2 * i + j];
            g(i + 2, j) = kI * lower * s[2 * i + j];
        }
    return g;
}

/** @brief Gamma^1 = diag(1,-1,-1,1). */
inline Matrix4C big_gamma1() { return Matrix4C::diag(1.0, -1.0, -1.0, 1.0); }

inline constexpr std::array<double, 4> kGamma1Signs{1.0, -1.0, -1.0, 1.0};

/** @brief Diagonal free fundamental matrix diag(e^{i l x}, e^{-i l x}, e^{-i l x}, e^{i l x}). */
inline Matrix4C fundamental_mc(double x, cplx lambda) {
    if (std::abs(lambda.imag() * x) > 700.0)
        throw ScaledRepresentationError("exp(i*lambda*x) overflows at this (lambda, x)");
    const cplx e = std::exp(kI * lambda * x);
    const cplx f = std::exp(-kI * lambda * x);
    return Matrix4C::diag(e, f, f, e);
}

namespace detail {

// Q with P = Q / sqrt(2), P^{-1} = Q^T / sqrt(2).
inline Matrix4C projection_q() {
    Matrix4C q;
    const double rows[4][4] = {{1, 0, 1, 0}, {0, 1, 0, 1}, {1, 0, -1, 0}, {0, -1, 0, 1}};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) q(i, j) = rows[i][j];
    return q;
}

// Q diag(d) Q^T / 2, exact for representable d.
inline Matrix4C conjugate_diag(const std::array<cplx, 4>& d) {
    const Matrix4C q = projection_q();
    Matrix4C r;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < 4; ++k) s += q(i, k) * d[k] * q(j, k);
            r(i, j) = 0.5 * s;
        }
    return r;
}

}  // namespace detail

/** @brief Matrix P diagonalising gamma^1 as P diag(i,i,-i,-i) P^{-1}. */
inline Matrix4C diag_projection() {
    Matrix4C p = detail::projection_q();
    p *= cplx(std::sqrt(0.5));
    return p;
}

inline Matrix4C diag_projection_inverse() {
    Matrix4C p = detail::projection_q().transpose();
    p *= cplx(std::sqrt(0.5));
    return p;
}

/** @brief Projector onto the +i eigenspace of gamma^1. */
inline Matrix4C projector_plus() { return detail::conjugate_diag({1.0, 1.0, 0.0, 0.0}); }
/** @brief Projector onto the -i eigenspace of gamma^1. */
inline Matrix4C projector_minus() { return detail::conjugate_diag({0.0, 0.0, 1.0, 1.0}); }

/**
 * @brief Frobenius fundamental matrix P diag((-x)^{ml} I, (-x)^{-ml} I) P^{-1}.
 * @param x  point with x < 0
 */
inline Matrix4C frobenius_m0(double x, double ml) {
    if (!(x < 0.0)) throw DomainError("frobenius_m0 requires x < 0");
    const double p = std::pow(-x, ml);
    const double q = std::pow(-x, -ml);
    return detail::conjugate_diag({p, p, q, q});
}

/** @brief Twist matrix (-i) gamma^0 gamma^1 gamma^2. */
inline Matrix4C twist_matrix() {
    Matrix4C t = gamma(0) * gamma(1) * gamma(2);
    t *= -kI;
    return t;
}

inline Spinor4 twist(const Spinor4& v) { return Spinor4(-v[3], v[2], v[1], -v[0]); }

}  // namespace sads_dirac
