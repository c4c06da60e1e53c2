#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "sads_dirac/error.hpp"

namespace sads_dirac {

/** @brief Monotone piecewise cubic Hermite interpolant (Fritsch-Carlson). */
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    // x must be strictly increasing.
    MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) throw InvalidParameter("MonotoneCubic needs >= 2 matching nodes");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1])) throw InvalidParameter("MonotoneCubic nodes must increase");
        std::vector<double> h(n - 1), del(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            del[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        d_.assign(n, 0.0);
        if (n == 2) {
            d_[0] = d_[1] = del[0];
            return;
        }
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (del[i - 1] * del[i] <= 0.0) continue;
            const double w1 = 2.0 * h[i] + h[i - 1];
            const double w2 = h[i] + 2.0 * h[i - 1];
            d_[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
        }
        d_[0] = end_slope(h[0], h[1], del[0], del[1]);
        d_[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    }

    double operator()(double t) const {
        const std::size_t n = x_.size();
        std::size_t i;
        if (t <= x_.front())
            i = 0;
        else if (t >= x_.back())
            i = n - 2;
        else
            i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
    }

    const std::vector<double>& nodes() const { return x_; }
    const std::vector<double>& values() const { return y_; }
    bool empty() const { return x_.empty(); }

private:
    static double end_slope(double h0, double h1, double d0, double d1) {
        double d = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (d * d0 <= 0.0)
            d = 0.0;
        else if (d0 * d1 <= 0.0 && std::abs(d) > std::abs(3 * d0))
            d = 3 * d0;
        return d;
    }

    std::vector<double> x_, y_, d_;
};

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/** @brief Gauss-Legendre rule on [-1, 1]. */
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw InvalidParameter("gauss_legendre needs n >= 1");
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        q.nodes[n - 1 - i] = z;
        q.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return q;
}

/**
 * @brief Gauss-Jacobi rule for weight (1-y)^a (1+y)^b on [-1, 1], Golub-Welsch.
 */
inline QuadratureRule gauss_jacobi(int n, double a, double b) {
    if (n < 1 || a <= -1.0 || b <= -1.0) throw InvalidParameter("gauss_jacobi: bad arguments");
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 1));
    const double ab = a + b;
    for (int k = 0; k < n; ++k) {
        const double t = 2.0 * k + ab;
        if (k == 0)
            diag(k) = (b - a) / (ab + 2.0);
        else
            diag(k) = (b * b - a * a) / (t * (t + 2.0));
    }
    for (int k = 1; k < n; ++k) {
        const double t = 2.0 * k + ab;
        const double num = 4.0 * k * (k + a) * (k + b) * (k + ab);
        const double den = t * t * (t + 1.0) * (t - 1.0);
        sub(k - 1) = std::sqrt(num / den);
    }
    const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                                std::lgamma(ab + 2.0));
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    if (n == 1) {
        q.nodes[0] = diag(0);
        q.weights[0] = mu0;
        return q;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub.head(n - 1), Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw ConvergenceError("gauss_jacobi eigen solve failed");
    for (int k = 0; k < n; ++k) {
        q.nodes[k] = es.eigenvalues()(k);
        const double v = es.eigenvectors()(0, k);
        q.weights[k] = mu0 * v * v;
    }
    return q;
}

/**
 * @brief Rule for integral_0^1 s^e f(s) ds, e > -1.
 */
inline QuadratureRule power_weight_rule(int n, double e) {
    QuadratureRule q = gauss_jacobi(n, 0.0, e);
    const double scale = std::pow(2.0, -e - 1.0);
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
        q.nodes[k] = 0.5 * (q.nodes[k] + 1.0);
        q.weights[k] *= scale;
    }
    return q;
}

/** @brief Chebyshev interpolant on [a, b] for any vector-space value type. */
template <class T>
class Chebyshev {
public:
    static std::vector<double> nodes(int n, double a, double b) {
        std::vector<double> z(n);
        for (int j = 0; j < n; ++j) {
            const double t = std::cos(std::numbers::pi * (j + 0.5) / n);
            z[j] = 0.5 * (a + b) + 0.5 * (b - a) * t;
        }
        return z;
    }

    Chebyshev() = default;

    // values[j] sampled at nodes(n, a, b)[j].
    Chebyshev(double a, double b, const std::vector<T>& values) : a_(a), b_(b) {
        const int n = static_cast<int>(values.size());
        coef_.assign(n, T{});
        for (int k = 0; k < n; ++k) {
            T s{};
            for (int j = 0; j < n; ++j) s += std::cos(std::numbers::pi * k * (j + 0.5) / n) * values[j];
            coef_[k] = ((k == 0 ? 1.0 : 2.0) / n) * s;
        }
    }

    T operator()(double z) const {
        const double t = (2.0 * z - a_ - b_) / (b_ - a_);
        T b1{}, b2{};
        for (int k = static_cast<int>(coef_.size()) - 1; k >= 1; --k) {
            T b0 = coef_[k] + (2.0 * t) * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        return coef_[0] + t * b1 - b2;
    }

    const std::vector<T>& coefficients() const { return coef_; }

private:
    double a_ = 0.0, b_ = 1.0;
    std::vector<T> coef_;
};

/**
 * @brief Finite-difference weights (Fornberg) for derivative order m at x0 on nodes z.
 */
inline std::vector<double> fornberg_weights(double x0, std::span<const double> z, int m) {
    const int n = static_cast<int>(z.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = z[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = z[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = z[i] - z[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

enum class CumulativeRule { Trapezoid, Cubic };

/**
 * @brief Cumulative integration on a fixed nonuniform grid.
 *
 * Cubic: each panel [x_i, x_{i+1}] is integrated exactly for the cubic through
 * four neighbouring nodes (shifted stencil at the ends).
 */
class CumulativeIntegrator {
public:
    CumulativeIntegrator() = default;

    explicit CumulativeIntegrator(std::span<const double> x, CumulativeRule rule = CumulativeRule::Cubic)
        : rule_(rule) {
        const std::size_t n = x.size();
        if (n < 2) throw InvalidParameter("CumulativeIntegrator needs >= 2 nodes");
        panels_.resize(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            Panel& p = panels_[i];
            if (rule == CumulativeRule::Trapezoid || n < 4) {
                p.first = i;
                p.w = {0.5 * (x[i + 1] - x[i]), 0.5 * (x[i + 1] - x[i]), 0.0, 0.0};
                continue;
            }
            std::size_t s = (i == 0) ? 0 : i - 1;
            if (s + 3 >= n) s = n - 4;
            p.first = s;
            p.w = panel_weights(x.subspan(s, 4), x[i], x[i + 1]);
        }
    }

    std::size_t size() const { return panels_.size() + 1; }

    // Returns I with I[i] = integral from x_0 to x_i.
    template <class T>
    std::vector<T> prefix(std::span<const T> f) const {
        std::vector<T> out(size(), T{});
        for (std::size_t i = 0; i < panels_.size(); ++i) out[i + 1] = out[i] + panel(i, f);
        return out;
    }

    // Returns J with J[i] = integral from x_i to x_last.
    template <class T>
    std::vector<T> suffix(std::span<const T> f) const {
        std::vector<T> out(size(), T{});
        for (std::size_t i = panels_.size(); i-- > 0;) out[i] = out[i + 1] + panel(i, f);
        return out;
    }

    template <class T>
    T total(std::span<const T> f) const {
        T s{};
        for (std::size_t i = 0; i < panels_.size(); ++i) s += panel(i, f);
        return s;
    }

    template <class T>
    T panel(std::size_t i, std::span<const T> f) const {
        const Panel& p = panels_[i];
        T s = p.w[0] * f[p.first];
        s += p.w[1] * f[p.first + 1];
        if (rule_ == CumulativeRule::Cubic && p.w[2] != 0.0) {
            s += p.w[2] * f[p.first + 2];
            s += p.w[3] * f[p.first + 3];
        }
        return s;
    }

private:
    struct Panel {
        std::size_t first = 0;
        std::array<double, 4> w{};
    };

    static std::array<double, 4> panel_weights(std::span<const double> z, double a, double b) {
        std::array<double, 4> w{};
        // Integrate each Lagrange basis polynomial exactly with 2-point Gauss-Legendre x2 (degree 3).
        const double g = 1.0 / std::sqrt(3.0);
        const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
        for (double t : {-g, g}) {
            const double xx = mid + half * t;
            for (int k = 0; k < 4; ++k) {
                double l = 1.0;
                for (int j = 0; j < 4; ++j)
                    if (j != k) l *= (xx - z[j]) / (z[k] - z[j]);
                w[k] += half * l;
            }
        }
        return w;
    }

    CumulativeRule rule_ = CumulativeRule::Cubic;
    std::vector<Panel> panels_;
};

/**
 * @brief Safeguarded Newton on a bracket [lo, hi] with f(lo), f(hi) of opposite sign.
 * @param fdf callable returning std::pair{f, f'}
 */
template <class F>
double safeguarded_newton(F&& fdf, double lo, double hi, double guess, double rel_tol = 4e-16,
                          double abs_tol = 0.0, int max_iter = 200) {
    double flo = fdf(lo).first;
    double fhi = fdf(hi).first;
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0)) throw ConvergenceError("safeguarded_newton: root not bracketed");
    double t = std::clamp(guess, std::min(lo, hi), std::max(lo, hi));
    for (int it = 0; it < max_iter; ++it) {
        const auto [f, df] = fdf(t);
        if (f == 0.0) return t;
        if ((f > 0.0) == (flo > 0.0))
            lo = t, flo = f;
        else
            hi = t;
        double next = t - f / df;
        const double a = std::min(lo, hi), b = std::max(lo, hi);
        if (!(next > a && next < b) || !std::isfinite(next)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - t);
        t = next;
        const double tol = rel_tol * std::abs(t) + abs_tol;
        if (step <= tol || std::abs(hi - lo) <= tol) return t;
    }
    return t;
}

}  // namespace sads_dirac
