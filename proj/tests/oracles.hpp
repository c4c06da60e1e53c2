#pragma once

// Reference computations that share no code with the library.

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

namespace oracle {

/** @brief Real root of r^3 + l^2 r - 2 M l^2 by bisection on [0, 2M]. */
inline double cubic_root_bisection(double M, double l) {
    const double l2 = l * l;
    auto f = [&](double r) { return (r * r + l2) * r - 2.0 * M * l2; };
    auto done = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::abs(b); };
    auto [a, b] = boost::math::tools::bisect(f, 0.0, 2.0 * M, done);
    return 0.5 * (a + b);
}

/** @brief x(r) = -int_r^inf ds / F(s) by adaptive quadrature. */
inline double tortoise_quadrature(double M, double l, double r) {
    auto inv_f = [&](double s) { return 1.0 / (1.0 - 2.0 * M / s + s * s / (l * l)); };
    double err = 0.0;
    return -boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        inv_f, r, std::numeric_limits<double>::infinity(), 20, 1e-14, &err);
}

/** @brief Potentials straight from r: A = sqrt(F)/r, B = sqrt(F). */
inline double potential_A_at_r(double M, double l, double r) {
    return std::sqrt(1.0 - 2.0 * M / r + r * r / (l * l)) / r;
}

/** @brief Radius with tortoise value x, by bisection on the quadrature oracle. */
inline double radius_from_tortoise(double M, double l, double rh, double x) {
    auto g = [&](double r) { return tortoise_quadrature(M, l, r) - x; };
    double lo = rh * (1.0 + 1e-12), hi = rh * 2.0;
    while (g(hi) < 0.0) hi *= 2.0;
    auto done = [](double a, double b) { return std::abs(b - a) <= 1e-14 * std::abs(b); };
    auto [a, b] = boost::math::tools::bisect(g, lo, hi, done);
    return 0.5 * (a + b);
}

/** @brief Quadratic extrapolation of y(t) sampled at t0, t1, t2 to t. */
template <class T>
T extrapolate3(double t0, double t1, double t2, const T& y0, const T& y1, const T& y2, double t) {
    const double l0 = (t - t1) * (t - t2) / ((t0 - t1) * (t0 - t2));
    const double l1 = (t - t0) * (t - t2) / ((t1 - t0) * (t1 - t2));
    const double l2 = (t - t0) * (t - t1) / ((t2 - t0) * (t2 - t1));
    return l0 * y0 + l1 * y1 + l2 * y2;
}

}  // namespace oracle
