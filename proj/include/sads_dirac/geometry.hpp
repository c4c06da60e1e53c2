#pragma once

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "sads_dirac/error.hpp"
#include "sads_dirac/numerics.hpp"

namespace sads_dirac {

/** @brief Real root of r^3 + l^2 r - 2 M l^2 from the Cardano form p_+ + p_-. */
inline double horizon_radius_closed_form(double M, double l) {
    if (!(M > 0.0) || !(l > 0.0)) throw InvalidParameter("M and l must be positive");
    const double l2 = l * l;
    const double root = std::sqrt(M * M * l2 * l2 + l2 * l2 * l2 / 27.0);
    return std::cbrt(M * l2 + root) + std::cbrt(M * l2 - root);
}

/** @brief Unique real root of F(r) = 1 - 2M/r + r^2/l^2, Newton-polished. */
inline double horizon_radius(double M, double l) {
    double r = horizon_radius_closed_form(M, l);
    const double l2 = l * l;
    // The cubic is increasing, so the root is bracketed by [0, 2M].
    if (!(r > 0.0) || r > 2.0 * M) r = std::min(2.0 * M, std::cbrt(2.0 * M * l2));
    for (int it = 0; it < 8; ++it) {
        const double f = (r * r + l2) * r - 2.0 * M * l2;
        const double df = 3.0 * r * r + l2;
        const double dr = f / df;
        r -= dr;
        if (std::abs(dr) <= 1e-17 * r) break;
    }
    return r;
}

/** @brief Black-hole parameters with derived horizon radius and surface gravity. */
struct BlackHoleParams {
    double M = 1.0;
    double l = 1.0;
    double r_sads = 1.0;
    double kappa = 2.0;

    static BlackHoleParams make(double M, double l) {
        BlackHoleParams p;
        p.M = M;
        p.l = l;
        p.r_sads = horizon_radius(M, l);
        p.kappa = M / (p.r_sads * p.r_sads) + p.r_sads / (l * l);
        return p;
    }

    double F(double r) const { return 1.0 - 2.0 * M / r + r * r / (l * l); }
    double dF(double r) const { return 2.0 * M / (r * r) + 2.0 * r / (l * l); }
};

inline double surface_gravity(const BlackHoleParams& p) { return p.dF(p.r_sads) / 2.0; }

/** @brief A point of the exterior in several mutually consistent coordinates. */
struct RadialPoint {
    double x = 0.0;
    double r = 0.0;
    double delta = 0.0;  // r - r_sads, kept separately near the horizon
    double log_delta = 0.0;
    double u = 0.0;      // 1/r
    bool horizon_side = true;
    bool near_boundary = false;
};

/**
 * @brief Tortoise coordinate x(r) = -int_r^inf ds/F(s) and its inverse.
 *
 * The forward map uses the partial-fraction antiderivative. Near the horizon it
 * is evaluated from delta = r - r_sads, beyond r = 2 r_sads from u = 1/r.
 */
class TortoiseMap {
public:
    explicit TortoiseMap(const BlackHoleParams& params, int table_size = 160) : p_(params) {
        const double rh = p_.r_sads, l2 = p_.l * p_.l;
        k_ = rh * rh + l2;
        sqrt_disc_ = std::sqrt(3.0 * rh * rh + 4.0 * l2);
        pf_ = l2 * rh / (3.0 * rh * rh + l2);
        const double s = pf_ * k_ / rh;
        d_ = (2.0 * s + pf_ * rh) / sqrt_disc_;
        phi_h_ = -0.5 * pf_ * std::log(3.0 * rh * rh + l2) - d_ * std::atan(sqrt_disc_ / (3.0 * rh));
        delta_split_ = rh;
        u_split_ = 1.0 / (2.0 * rh);
        x_split_ = x_of_delta(delta_split_);
        u_small_ = std::min(0.05 / p_.l, 0.5 * u_split_);

        // Horizon table: ln(delta) uniformly spaced; boundary table: ln(u) uniformly spaced.
        const double ylo = std::log(rh * 1e-12), yhi = std::log(delta_split_);
        std::vector<double> hx, hy;
        for (int i = 0; i < table_size; ++i) {
            const double y = ylo + (yhi - ylo) * i / (table_size - 1);
            hx.push_back(x_of_delta(std::exp(y)));
            hy.push_back(y);
        }
        horizon_table_ = MonotoneCubic(hx, hy);
        const double vlo = std::log(u_split_ * 1e-10), vhi = std::log(u_split_);
        std::vector<double> bx, by;
        for (int i = 0; i < table_size; ++i) {
            const double v = vlo + (vhi - vlo) * i / (table_size - 1);
            bx.push_back(std::log(-x_of_u(std::exp(v))));
            by.push_back(v);
        }
        boundary_table_ = MonotoneCubic(bx, by);
        u_table_min_ = std::exp(vlo);

        for (int i = 0; i < table_size; ++i) {
            r_grid_.push_back(rh + std::exp(hy[i]));
            x_grid_.push_back(hx[i]);
        }
        for (int i = table_size - 1; i >= 0; --i) {
            const double u = std::exp(by[i]);
            if (1.0 / u <= r_grid_.back()) continue;
            r_grid_.push_back(1.0 / u);
            x_grid_.push_back(-std::exp(bx[i]));
        }
    }

    const BlackHoleParams& params() const { return p_; }
    double kappa() const { return p_.kappa; }
    const std::vector<double>& r_grid() const { return r_grid_; }
    const std::vector<double>& x_grid() const { return x_grid_; }
    double x_split() const { return x_split_; }
    // Additive constant: x(delta) - ln(delta)/(2 kappa) -> horizon_constant() as delta -> 0.
    double horizon_constant() const { return phi_h_; }

    double x_of_delta(double delta) const { return x_of_log_delta(std::log(delta)); }

    // Same map from y = ln(delta); stays finite after exp(y) underflows.
    double x_of_log_delta(double y) const {
        const double rh = p_.r_sads, delta = std::exp(y);
        const double q = 3.0 * rh * rh + p_.l * p_.l + delta * (3.0 * rh + delta);
        const double r = rh + delta;
        return pf_ * (y - 0.5 * std::log(q)) - d_ * std::atan(sqrt_disc_ / (2.0 * r + rh));
    }

    double x_of_u(double u) const {
        const double rh = p_.r_sads;
        return pf_ * (std::log1p(-rh * u) - 0.5 * std::log1p(u * (rh + k_ * u))) -
               d_ * std::atan(sqrt_disc_ * u / (2.0 + rh * u));
    }

    // x(u) + l^2 u, accurate for small u.
    double boundary_remainder(double u) const {
        static const QuadratureRule gl = gauss_legendre(16);
        const double l2 = p_.l * p_.l;
        double s = 0.0;
        for (std::size_t k = 0; k < gl.nodes.size(); ++k) {
            const double t = 0.5 * u * (gl.nodes[k] + 1.0);
            const double w = l2 * t * t * (1.0 - 2.0 * p_.M * t);
            s += gl.weights[k] * w / (1.0 + w);
        }
        return l2 * 0.5 * u * s;
    }

    /** @brief Tortoise coordinate of radius r > r_sads. */
    double tortoise(double r) const {
        if (!(r > p_.r_sads)) throw DomainError("tortoise requires r > r_sads");
        if (std::isinf(r)) return 0.0;
        if (r <= 2.0 * p_.r_sads) return x_of_delta(r - p_.r_sads);
        return x_of_u(1.0 / r);
    }

    /** @brief Inverse of tortoise; x must be negative. */
    RadialPoint locate(double x) const {
        if (!(x < 0.0)) throw DomainError("radius_from_tortoise requires x < 0");
        RadialPoint pt;
        pt.x = x;
        const double rh = p_.r_sads, l2 = p_.l * p_.l;
        if (x <= x_split_) {
            double guess;
            if (x < horizon_table_.nodes().front())
                guess = (x - phi_h_) / pf_;
            else
                guess = horizon_table_(x);
            auto fdf = [&](double y) {
                const double delta = std::exp(y);
                const double r = rh + delta;
                const double q = 3.0 * rh * rh + l2 + delta * (3.0 * rh + delta);
                return std::pair{x_of_log_delta(y) - x, l2 * r / q};
            };
            double lo = std::min(guess, (x - phi_h_) / pf_) - 1.0;
            while (fdf(lo).first > 0.0) lo -= 4.0;
            const double y = safeguarded_newton(fdf, lo, std::log(delta_split_), guess, 4e-16, 4e-16);
            pt.log_delta = y;
            pt.delta = std::exp(y);
            pt.r = rh + pt.delta;
            pt.u = 1.0 / pt.r;
            pt.horizon_side = true;
        } else {
            double guess;
            if (std::log(-x) < boundary_table_.nodes().front())
                guess = -x / l2;
            else
                guess = std::exp(boundary_table_(std::log(-x)));
            auto fdf = [&](double u) {
                const double g = 1.0 + l2 * u * u * (1.0 - 2.0 * p_.M * u);
                return std::pair{x_of_u(u) - x, -l2 / g};
            };
            const double u = safeguarded_newton(fdf, 0.0, u_split_, guess);
            pt.u = u;
            pt.r = 1.0 / u;
            pt.delta = pt.r - rh;
            pt.log_delta = std::log(pt.delta);
            pt.horizon_side = false;
            pt.near_boundary = u < u_table_min_;
        }
        return pt;
    }

    double radius_from_tortoise(double x) const { return locate(x).r; }

    double small_u_threshold() const { return u_small_; }

private:
    BlackHoleParams p_;
    double k_ = 0, sqrt_disc_ = 0, pf_ = 0, d_ = 0, phi_h_ = 0;
    double delta_split_ = 0, u_split_ = 0, x_split_ = 0, u_small_ = 0, u_table_min_ = 0;
    MonotoneCubic horizon_table_, boundary_table_;
    std::vector<double> r_grid_, x_grid_;
};

}  // namespace sads_dirac
