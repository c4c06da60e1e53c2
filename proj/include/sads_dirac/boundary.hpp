#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "sads_dirac/error.hpp"
#include "sads_dirac/grid.hpp"
#include "sads_dirac/numerics.hpp"
#include "sads_dirac/ode.hpp"
#include "sads_dirac/potentials.hpp"
#include "sads_dirac/spinor.hpp"

namespace sads_dirac {

/**
 * @brief Boundary data: (c, d) for Sub, direction (c, d, -c, d);
 * (a, b) for Super, direction (a, b, a, -b).
 */
struct BoundarySeed {
    Regime regime = Regime::Sub;
    double first = 1.0;
    double second = 0.0;

    static BoundarySeed canonical(Regime r) { return {r, 1.0, 0.0}; }

    void validate() const {
        if (first == 0.0 && second == 0.0) throw InvalidParameter("boundary seed must be nonzero");
        if (!std::isfinite(first) || !std::isfinite(second)) throw InvalidParameter("boundary seed not finite");
    }

    Spinor4 direction() const {
        if (regime == Regime::Sub) return Spinor4(first, second, -first, second);
        return Spinor4(first, second, first, -second);
    }

    // Seeds with |first| = |second| are fixed by the twist up to sign.
    bool twist_degenerate() const { return std::abs(first) == std::abs(second); }

    double N() const { return 2.0 * std::max(std::abs(first), std::abs(second)); }

    std::string label() const {
        return std::string(to_string(regime)) + "(" + std::to_string(first) + "," + std::to_string(second) + ")";
    }
};

inline void check_seed(const PotentialEvaluator& ev, const BoundarySeed& seed) {
    seed.validate();
    if (seed.regime != ev.regime()) throw InvalidParameter("boundary seed regime does not match 2ml");
}

/** @brief Leading term 2 (-x)^{-+ml} v of the boundary solution. */
inline Spinor4 boundary_leading_term(const PotentialEvaluator& ev, const BoundarySeed& seed, double x) {
    if (!(x < 0.0)) throw DomainError("x must be negative");
    const double e = seed.regime == Regime::Sub ? -ev.ml() : ev.ml();
    return (2.0 * std::pow(-x, e)) * seed.direction();
}

/**
 * @brief Layers of the Volterra series phi_{n+1}(x) = int_0^x M_0(-x/t) V_{lambda,m}(t) phi_n(t) dt.
 *
 * With z = -x, phi_n(x) = z^{e} g_n(z) where e = -ml (Sub) or +ml (Super) and g_n is
 * analytic on [0, z_max]. Each g_n is stored as a Chebyshev interpolant; the inner
 * integrals over sigma in (0, 1) use Gauss-Jacobi rules for the weights 1 and sigma^{-+2ml}.
 */
class BoundarySeries {
public:
    BoundarySeries(const PotentialEvaluator& ev, cplx lambda, const BoundarySeed& seed, double z_max, int n_terms,
                   int order = 0)
        : zmax_(z_max) {
        check_seed(ev, seed);
        if (!(z_max > 0.0)) throw InvalidParameter("z_max must be positive");
        if (n_terms < 1) throw InvalidParameter("n_terms must be >= 1");
        const double ml = ev.ml();
        const bool sub = seed.regime == Regime::Sub;
        lead_exp_ = sub ? -ml : ml;
        const double other_exp = sub ? -2.0 * ml : 2.0 * ml;
        const Matrix4C p_lead = sub ? projector_minus() : projector_plus();
        const Matrix4C p_other = sub ? projector_plus() : projector_minus();
        if (order <= 0) order = z_max <= 1e-3 ? 14 : 32;
        const int gq = order;
        const QuadratureRule r0 = power_weight_rule(gq, 0.0);
        const QuadratureRule re = power_weight_rule(gq, other_exp);
        const std::vector<double> z = Chebyshev<Spinor4>::nodes(order, 0.0, z_max);

        // V_{lambda,m}(-z sigma) at all quadrature nodes, with the projectors folded in.
        std::vector<Matrix4C> v0(order * gq), ve(order * gq);
        for (int j = 0; j < order; ++j)
            for (int k = 0; k < gq; ++k) {
                v0[j * gq + k] = p_lead * ev.Vlm(-z[j] * r0.nodes[k], lambda);
                ve[j * gq + k] = p_other * ev.Vlm(-z[j] * re.nodes[k], lambda);
            }

        const Spinor4 g0 = 2.0 * seed.direction();
        layers_.emplace_back(0.0, z_max, std::vector<Spinor4>(order, g0));
        std::vector<Spinor4> vals(order);
        for (int n = 1; n < n_terms; ++n) {
            const Chebyshev<Spinor4>& g = layers_.back();
            for (int j = 0; j < order; ++j) {
                Spinor4 acc;
                for (int k = 0; k < gq; ++k) {
                    acc += r0.weights[k] * (v0[j * gq + k] * g(z[j] * r0.nodes[k]));
                    acc += re.weights[k] * (ve[j * gq + k] * g(z[j] * re.nodes[k]));
                }
                vals[j] = (-z[j]) * acc;
            }
            layers_.emplace_back(0.0, z_max, vals);
        }
    }

    int terms() const { return static_cast<int>(layers_.size()); }

    Spinor4 term(int n, double x) const {
        const double z = -x;
        if (!(z > 0.0) || z > zmax_ * (1.0 + 1e-12)) throw DomainError("x outside the series interval");
        return std::pow(z, lead_exp_) * layers_.at(n)(z);
    }

    Spinor4 sum(double x, int n_terms = -1) const {
        if (n_terms < 0) n_terms = terms();
        Spinor4 s;
        for (int n = 0; n < n_terms; ++n) s += term(n, x);
        return s;
    }

private:
    double zmax_;
    double lead_exp_ = 0.0;
    std::vector<Chebyshev<Spinor4>> layers_;
};

/** @brief Partial sum of the boundary series at x0 with n_terms terms. */
inline Spinor4 series_correction(const PotentialEvaluator& ev, cplx lambda, const BoundarySeed& seed, double x0,
                                 int n_terms) {
    if (!(x0 < 0.0)) throw DomainError("x0 must be negative");
    if (n_terms == 1) {
        check_seed(ev, seed);
        return boundary_leading_term(ev, seed, x0);
    }
    return BoundarySeries(ev, lambda, seed, -x0, n_terms).sum(x0);
}

/** @brief Series value at x0 summed until the terms stop contributing. */
inline Spinor4 boundary_seed_value(const PotentialEvaluator& ev, cplx lambda, const BoundarySeed& seed, double x0,
                                   int n_terms = 0) {
    if (n_terms > 0) return series_correction(ev, lambda, seed, x0, n_terms);
    const BoundarySeries s(ev, lambda, seed, -x0, 16);
    Spinor4 acc;
    for (int n = 0; n < s.terms(); ++n) {
        const Spinor4 t = s.term(n, x0);
        acc += t;
        if (n >= 2 && t.norm_inf() <= 1e-18 * acc.norm_inf()) break;
    }
    return acc;
}

/**
 * @brief Boundary-anchored solution on an increasing grid, seeded by the series near 0
 * and marched toward the horizon.
 */
namespace detail {

inline SolutionCurve march_boundary(const PotentialEvaluator& ev, cplx lambda, const BoundarySeed& seed,
                                   std::span<const double> grid, const SolverOptions& opt) {
    check_seed(ev, seed);
    if (grid.empty()) throw InvalidParameter("empty grid");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] < 0.0)) throw DomainError("grid must lie in x < 0");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw InvalidParameter("grid must be increasing");
    }
    SolutionCurve c;
    c.lambda = lambda;
    c.anchor = Anchor::Boundary;
    c.seed = seed.label();
    c.x.assign(grid.begin(), grid.end());
    c.values.resize(grid.size());

    const double xs = std::max(opt.x0, grid.back());
    Spinor4 w = physical_to_profile(boundary_seed_value(ev, lambda, seed, xs, opt.series_terms), xs, lambda);
    ProfileSystem sys(ev, lambda);
    OdeOptions oo;
    oo.rtol = opt.rtol;
    oo.atol = opt.atol;
    auto ode = make_dop853<Spinor4>(sys, oo);
    double x = xs;
    for (std::size_t i = grid.size(); i-- > 0;) {
        w = ode.advance(x, w, grid[i]);
        x = grid[i];
        if (!w.is_finite()) throw ConvergenceError("non-finite boundary profile");
        c.values[i] = profile_to_physical(w, x, lambda);
    }
    return c;
}

}  // namespace detail

inline SolutionCurve boundary_solution(const PotentialEvaluator& ev, cplx lambda, const BoundarySeed& seed,
                                       std::span<const double> grid, const SolverOptions& opt = {}) {
    check_seed(ev, seed);
    if (!(lambda.imag() > -0.5 * ev.kappa() + opt.strip_margin * ev.kappa()))
        throw OutOfStrip("lambda outside the strip Im > -kappa/2");
    return detail::march_boundary(ev, lambda, seed, grid, opt);
}

/** @brief Sub: (c, d) = lim 1/2 (-x)^{ml} (phi1 - phi3, phi2 + phi4); Super: lim 1/2 (-x)^{-ml} (phi1 + phi3, phi2 - phi4). */
inline std::pair<cplx, cplx> boundary_limits(const SolutionCurve& c, double ml, Regime regime) {
    const Spinor4& v = c.values.back();
    const double z = -c.x.back();
    if (regime == Regime::Sub) {
        const double s = 0.5 * std::pow(z, ml);
        return {s * (v[0] - v[2]), s * (v[1] + v[3])};
    }
    const double s = 0.5 * std::pow(z, -ml);
    return {s * (v[0] + v[2]), s * (v[1] - v[3])};
}

struct BoundaryReport {
    Regime regime = Regime::Sub;
    double residual = 0.0;  // sup of the monitored quantity on the last decade
    double exponent = 0.0;  // fitted power of (-x) on the last decade
    std::size_t points = 0;
    bool satisfied = false;
};

/**
 * @brief Checks the boundary condition on the last decade of the grid.
 *
 * Sub monitors (|phi1 + phi3| + |phi2 - phi4|) / sqrt(-x); Super monitors |phi|.
 * Either must decay, i.e. the fitted exponent is positive.
 */
inline BoundaryReport check_boundary_condition(const SolutionCurve& c, Regime regime) {
    BoundaryReport r;
    r.regime = regime;
    if (c.size() < 3) throw InvalidParameter("curve too short");
    const double xl = c.x.back();
    if (!(xl < 0.0)) throw DomainError("curve must lie in x < 0");
    std::vector<double> lx, lq;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (std::abs(c.x[i]) > 10.0 * std::abs(xl) * (1.0 + 1e-12)) continue;
        const Spinor4& v = c.values[i];
        const double z = -c.x[i];
        const double q = regime == Regime::Sub
                             ? (std::abs(v[0] + v[2]) + std::abs(v[1] - v[3])) / std::sqrt(z)
                             : v.norm_inf();
        r.residual = std::max(r.residual, q);
        ++r.points;
        if (q > 0.0) {
            lx.push_back(std::log(z));
            lq.push_back(std::log(q));
        }
    }
    if (r.points < 3) throw InvalidParameter("last decade holds fewer than 3 samples");
    if (r.residual == 0.0) {
        r.exponent = std::numeric_limits<double>::infinity();
        r.satisfied = true;
        return r;
    }
    if (lx.size() < 3) {
        r.exponent = std::numeric_limits<double>::quiet_NaN();
        return r;
    }
    double mx = 0, mq = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], mq += lq[i];
    mx /= lx.size();
    mq /= lx.size();
    double sxx = 0, sxq = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxq += (lx[i] - mx) * (lq[i] - mq);
    }
    r.exponent = sxq / sxx;
    r.satisfied = r.exponent > 0.0;
    return r;
}

/** @brief C_{lambda,m} = max(|lambda|, sup m |B + l/x|, sup A), sup taken over the grid. */
inline double boundary_constant(const PotentialEvaluator& ev, cplx lambda, std::span<const double> grid) {
    double c = std::abs(lambda);
    for (double x : grid) {
        const PotentialSample ps = ev.sample(x);
        c = std::max({c, ev.mode().m * std::abs(ps.B_plus), ps.A});
    }
    return c;
}

/** @brief Growth constant c0 of the boundary series bounds. */
inline double boundary_growth_constant(const PotentialEvaluator& ev, double C) {
    const double base = 6.0 * C * ev.spin_factor();
    return ev.regime() == Regime::Sub ? base / (1.0 - 2.0 * ev.ml()) : base;
}

}  // namespace sads_dirac
