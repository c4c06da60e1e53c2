#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sads_dirac/error.hpp"
#include "sads_dirac/grid.hpp"
#include "sads_dirac/numerics.hpp"
#include "sads_dirac/ode.hpp"
#include "sads_dirac/potentials.hpp"
#include "sads_dirac/spinor.hpp"

namespace sads_dirac {

/** @brief Throws OutOfStrip unless lambda lies in the half-plane where the Jost datum of kind decays. */
inline void check_jost_strip(const PotentialEvaluator& ev, cplx lambda, JostKind kind, double margin) {
    const double half = 0.5 * ev.kappa();
    const double pad = margin * ev.kappa();
    const double im = lambda.imag();
    const bool incoming = kind == JostKind::Phi2 || kind == JostKind::Phi3;
    if (incoming ? !(im > -half + pad) : !(im < half - pad))
        throw OutOfStrip("lambda outside the Jost strip for this kind");
}

/**
 * @brief Profile value just right of the horizon start xs, including the analytic
 * first-order tail of the Volterra integral (V_m ~ V_m(xs) e^{kappa (t - xs)}).
 */
inline Spinor4 jost_profile_start(const PotentialEvaluator& ev, cplx lambda, JostKind kind, double xs) {
    const std::size_t k = component_index(kind);
    Spinor4 w = Spinor4::unit(k);
    if (ev.hook() == PotentialHook::Free) return w;
    Matrix4C q = ev.Vm(xs);
    q = big_gamma1() * q;
    q *= -kI;
    for (std::size_t j = 0; j < 4; ++j) {
        if (j == k) continue;
        const double ds = kGamma1Signs[k] - kGamma1Signs[j];
        w[j] = q(j, k) * std::exp(kI * lambda * ds * xs) / (ev.kappa() + kI * lambda * ds);
    }
    return w;
}

/**
 * @brief Jost solution with M_c(-x) psi(x) -> e_kind as x -> -infinity.
 *
 * Phi2/Phi3 require Im lambda > -kappa/2, Phi1/Phi4 require Im lambda < kappa/2.
 */
inline SolutionCurve jost_solution(const PotentialEvaluator& ev, cplx lambda, JostKind kind,
                                   std::span<const double> grid, const SolverOptions& opt = {}) {
    check_jost_strip(ev, lambda, kind, opt.strip_margin);
    if (grid.empty()) throw InvalidParameter("empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] < 0.0)) throw DomainError("grid must lie in x < 0");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidParameter("grid must be increasing");
    }
    SolutionCurve c;
    c.lambda = lambda;
    c.anchor = Anchor::Horizon;
    c.seed = to_string(kind);
    c.x.assign(grid.begin(), grid.end());
    c.values.resize(grid.size());

    const double xs = std::min(grid.front(), -opt.x_start_factor / ev.kappa());
    Spinor4 w = jost_profile_start(ev, lambda, kind, xs);
    ProfileSystem sys(ev, lambda);
    OdeOptions oo;
    oo.rtol = opt.rtol;
    oo.atol = opt.atol;
    auto ode = make_dop853<Spinor4>(sys, oo);
    double x = xs;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        w = ode.advance(x, w, grid[i]);
        x = grid[i];
        if (!w.is_finite()) throw ConvergenceError("non-finite Jost profile");
        c.values[i] = profile_to_physical(w, x, lambda);
    }
    return c;
}

/** @brief Pointwise twist of a curve. */
inline SolutionCurve jost_tilde(const SolutionCurve& c) {
    SolutionCurve t = c;
    t.seed = "twist(" + c.seed + ")";
    for (auto& v : t.values) v = twist(v);
    return t;
}

struct PicardOptions {
    double h = 2e-3;      // uniform spacing of the quadrature grid
    double depth = 36.0;  // tail cut: the layer-1 integrand has decayed by e^{-depth}
};

namespace detail {

struct PicardGrid {
    std::vector<double> t;
    std::vector<Matrix4C> k;  // profile coupling matrices
};

inline PicardGrid picard_grid(const PotentialEvaluator& ev, cplx lambda, JostKind kind, double x,
                              const PicardOptions& po) {
    const bool incoming = kind == JostKind::Phi2 || kind == JostKind::Phi3;
    const double worst = incoming ? std::max(0.0, -lambda.imag()) : std::max(0.0, lambda.imag());
    const double rate = ev.kappa() - 2.0 * worst;
    const double xlo = x - po.depth / rate;
    const std::size_t n = static_cast<std::size_t>(std::ceil((x - xlo) / po.h));
    PicardGrid g;
    g.t.resize(n + 1);
    g.k.resize(n + 1);
    const Matrix4C g1 = big_gamma1();
    for (std::size_t i = 0; i <= n; ++i) {
        const double t = (i == n) ? x : xlo + (x - xlo) * static_cast<double>(i) / n;
        g.t[i] = t;
        Matrix4C q = g1 * ev.Vm(t);
        q *= -kI;
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = 0; b < 4; ++b)
                if (q(a, b) != cplx{})
                    q(a, b) *= std::exp(kI * lambda * (kGamma1Signs[b] - kGamma1Signs[a]) * t);
        g.k[i] = q;
    }
    return g;
}

}  // namespace detail

/**
 * @brief Individual Picard terms psi_n(x), n = 0..n_terms-1, of the Volterra series
 * psi_{n+1}(x) = -i int_{-inf}^x M_c(x-t) Gamma^1 V_m(t) psi_n(t) dt.
 */
inline std::vector<Spinor4> picard_jost_terms(const PotentialEvaluator& ev, cplx lambda, JostKind kind, double x,
                                              int n_terms, const PicardOptions& po = {}) {
    check_jost_strip(ev, lambda, kind, 0.0);
    if (n_terms < 1) throw InvalidParameter("n_terms must be >= 1");
    if (!(x < 0.0)) throw DomainError("x must be negative");
    std::vector<Spinor4> terms;
    const Spinor4 e = Spinor4::unit(component_index(kind));
    terms.push_back(profile_to_physical(e, x, lambda));
    if (n_terms == 1) return terms;
    const detail::PicardGrid g = detail::picard_grid(ev, lambda, kind, x, po);
    const CumulativeIntegrator integ(g.t);
    std::vector<Spinor4> layer(g.t.size(), e), integrand(g.t.size());
    for (int n = 1; n < n_terms; ++n) {
        for (std::size_t i = 0; i < g.t.size(); ++i) integrand[i] = g.k[i] * layer[i];
        layer = integ.prefix<Spinor4>(integrand);
        terms.push_back(profile_to_physical(layer.back(), x, lambda));
    }
    return terms;
}

/** @brief Partial sum of the Picard series with n_terms terms. */
inline Spinor4 picard_jost(const PotentialEvaluator& ev, cplx lambda, JostKind kind, double x, int n_terms,
                           const PicardOptions& po = {}) {
    Spinor4 s;
    for (const auto& t : picard_jost_terms(ev, lambda, kind, x, n_terms, po)) s += t;
    return s;
}

/**
 * @brief I(x) = int_{-inf}^x w(t) |V_m(t)| dt with w = e^{2 Im(lambda) t} in the strip
 * below the real axis and w = 1 otherwise (incoming kinds).
 */
inline double jost_potential_integral(const PotentialEvaluator& ev, cplx lambda, double x, double h = 2e-3) {
    const double im = lambda.imag();
    const double rate = ev.kappa() + 2.0 * std::min(0.0, im);
    if (!(rate > 0.0)) throw OutOfStrip("potential integral diverges");
    const double xlo = x - 40.0 / rate;
    const std::size_t n = static_cast<std::size_t>(std::ceil((x - xlo) / h));
    std::vector<double> t(n + 1), f(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        t[i] = (i == n) ? x : xlo + (x - xlo) * static_cast<double>(i) / n;
        f[i] = std::exp(2.0 * std::min(0.0, im) * t[i]) * ev.Vm(t[i]).norm_inf();
    }
    return CumulativeIntegrator(t).total<double>(f);
}

/**
 * @brief Growth bound for incoming Jost solutions:
 * e^{Im l x} e^{I} if Im l >= 0, e^{Im l x} + e^{-Im l x} (e^{I} - 1) in the strip below.
 */
inline double jost_growth_bound(const PotentialEvaluator& ev, cplx lambda, double x) {
    const double im = lambda.imag();
    const double I = jost_potential_integral(ev, lambda, x);
    if (im >= 0.0) return std::exp(im * x + I);
    return std::exp(im * x) + std::exp(-im * x) * std::expm1(I);
}

/** @brief jost_growth_bound at every point of an increasing grid, from one cumulative integral. */
inline std::vector<double> jost_growth_bounds(const PotentialEvaluator& ev, cplx lambda, std::span<const double> grid,
                                              double h = 2e-3) {
    const double im = lambda.imag();
    const double rate = ev.kappa() + 2.0 * std::min(0.0, im);
    if (!(rate > 0.0)) throw OutOfStrip("potential integral diverges");
    if (grid.empty()) return {};
    std::vector<double> t{grid.front() - 40.0 / rate};
    std::vector<std::size_t> at;
    for (double x : grid) {
        if (!(x > t.back())) throw InvalidParameter("grid must be increasing");
        const double a = t.back();
        const std::size_t n = static_cast<std::size_t>(std::ceil((x - a) / h));
        for (std::size_t i = 1; i < n; ++i) t.push_back(a + (x - a) * static_cast<double>(i) / n);
        t.push_back(x);
        at.push_back(t.size() - 1);
    }
    std::vector<double> f(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) f[i] = std::exp(2.0 * std::min(0.0, im) * t[i]) * ev.Vm(t[i]).norm_inf();
    const std::vector<double> I = CumulativeIntegrator(t).prefix<double>(f);
    std::vector<double> b(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid[k], v = I[at[k]];
        b[k] = im >= 0.0 ? std::exp(im * x + v) : std::exp(im * x) + std::exp(-im * x) * std::expm1(v);
    }
    return b;
}

}  // namespace sads_dirac
