#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sads_dirac/boundary.hpp"
#include "sads_dirac/error.hpp"
#include "sads_dirac/grid.hpp"
#include "sads_dirac/jost.hpp"
#include "sads_dirac/numerics.hpp"
#include "sads_dirac/potentials.hpp"
#include "sads_dirac/spinor.hpp"

namespace sads_dirac {

inline cplx wronskian_alpha(const Spinor4& phi, const Spinor4& psi) {
    return phi[0] * psi[1] - psi[0] * phi[1] + phi[2] * psi[3] - psi[2] * phi[3];
}

inline cplx wronskian_beta(const Spinor4& phi, const Spinor4& psi) {
    return phi[0] * psi[2] - psi[0] * phi[2] + phi[1] * psi[3] - psi[1] * phi[3];
}

/** @brief Pole detection threshold 1e-8 (|alpha|^2 + |beta|^2 + 1). */
inline double tol_res(cplx alpha, cplx beta) { return 1e-8 * (std::norm(alpha) + std::norm(beta) + 1.0); }

struct WronskianPair {
    cplx lambda{};
    cplx alpha{};
    cplx beta{};
    double variation = 0.0;
    std::vector<double> points;

    cplx determinant() const { return alpha * alpha - beta * beta; }
};

/**
 * @brief Wronskian constants from two curves at the same lambda, averaged over
 * the matching points (all common grid points in [-5, -1e-2] when none are given).
 */
inline WronskianPair wronskians(const SolutionCurve& phi, const SolutionCurve& psi,
                                std::span<const double> points = {}) {
    if (phi.lambda != psi.lambda) throw InvalidParameter("curves at different lambda");
    std::vector<double> pts(points.begin(), points.end());
    if (pts.empty()) {
        for (double x : phi.x)
            if (x >= -5.0 && x <= -1e-2 && std::binary_search(psi.x.begin(), psi.x.end(), x)) pts.push_back(x);
        if (pts.size() > 3) pts = {pts.front(), pts[pts.size() / 2], pts.back()};
    }
    if (pts.empty()) throw InvalidParameter("curves do not overlap");
    WronskianPair w;
    w.lambda = phi.lambda;
    w.points = pts;
    std::vector<cplx> as, bs;
    for (double x : pts) {
        const Spinor4& a = phi.at(x);
        const Spinor4& b = psi.at(x);
        as.push_back(wronskian_alpha(a, b));
        bs.push_back(wronskian_beta(a, b));
        w.alpha += as.back();
        w.beta += bs.back();
    }
    w.alpha /= static_cast<double>(pts.size());
    w.beta /= static_cast<double>(pts.size());
    const double scale = std::abs(w.alpha) + std::abs(w.beta);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double d = std::max(std::abs(as[i] - w.alpha), std::abs(bs[i] - w.beta));
        w.variation = std::max(w.variation, scale > 0.0 ? d / scale : d);
    }
    return w;
}

struct AlphaBetaMatrix {
    Matrix4C m;
    Matrix4C inverse;
    cplx det{};  // ((alpha - beta)(alpha + beta))^2
};

inline Matrix4C alpha_beta_matrix(cplx a, cplx b) {
    Matrix4C m;
    m(0, 1) = a;
    m(0, 2) = b;
    m(1, 0) = -a;
    m(1, 3) = b;
    m(2, 0) = -b;
    m(2, 3) = a;
    m(3, 1) = -b;
    m(3, 2) = -a;
    return m;
}

/** @brief Determinant by LU, independent of the closed form. */
inline cplx determinant_lu(const Matrix4C& m) {
    Eigen::Matrix4cd e;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) e(i, j) = m(i, j);
    return e.partialPivLu().determinant();
}

/** @brief M_{alpha,beta}, its closed-form inverse and determinant; AtResonance near the poles. */
inline AlphaBetaMatrix m_alpha_beta(cplx a, cplx b) {
    const cplx d = a * a - b * b;
    if (!(std::abs(d) > tol_res(a, b))) throw AtResonance("alpha^2 - beta^2 vanishes: M_{alpha,beta} singular");
    AlphaBetaMatrix r;
    r.m = alpha_beta_matrix(a, b);
    Matrix4C inv;
    inv(0, 1) = -a;
    inv(0, 2) = b;
    inv(1, 0) = a;
    inv(1, 3) = b;
    inv(2, 0) = -b;
    inv(2, 3) = -a;
    inv(3, 1) = -b;
    inv(3, 2) = a;
    inv *= 1.0 / d;
    r.inverse = inv;
    r.det = d * d;
    return r;
}

inline AlphaBetaMatrix m_alpha_beta(const WronskianPair& w) { return m_alpha_beta(w.alpha, w.beta); }

struct ResolventOptions {
    SolverOptions solver;
    std::optional<BoundarySeed> seed;  // canonical seed of the mode's regime when empty
    std::optional<JostKind> jost;      // Phi3 above the axis, Phi4 below when empty
    std::vector<double> match_points = {-2.0, -1.0, -0.5};
};

/**
 * @brief Resolvent kernel
 * R(x,y) = (phi(x) psi^T(y) + phit(x) psit^T(y)) M^{-1} i Gamma^1, y < x,
 *          (psi(x) phi^T(y) + psit(x) phit^T(y)) M^{-1} i Gamma^1, y > x,
 * with phit, psit the twisted partners.
 */
class ResolventKernel {
public:
    ResolventKernel(SolutionCurve phi, SolutionCurve psi, std::span<const double> match_points)
        : phi_(std::move(phi)), psi_(std::move(psi)) {
        if (phi_.x != psi_.x) throw InvalidParameter("kernel curves must share a grid");
        phit_ = jost_tilde(phi_);
        psit_ = jost_tilde(psi_);
        pair_ = wronskians(phi_, psi_, match_points);
        mab_ = m_alpha_beta(pair_);
        Matrix4C ig = big_gamma1();
        ig *= kI;
        n_ = mab_.inverse * ig;
    }

    static ResolventKernel build(const PotentialEvaluator& ev, cplx lambda, std::span<const double> grid,
                                 const ResolventOptions& opt = {}) {
        const BoundarySeed seed = opt.seed.value_or(BoundarySeed::canonical(ev.regime()));
        if (seed.twist_degenerate())
            throw InvalidParameter("boundary seed is fixed by the twist; phi and its partner are dependent");
        const JostKind kind = opt.jost.value_or(lambda.imag() >= 0.0 ? JostKind::Phi3 : JostKind::Phi4);
        // Below the axis the direct resolvent needs phi outside the continuation strip.
        SolutionCurve phi = lambda.imag() >= 0.0 || kind != JostKind::Phi4
                                ? boundary_solution(ev, lambda, seed, grid, opt.solver)
                                : detail::march_boundary(ev, lambda, seed, grid, opt.solver);
        SolutionCurve psi = jost_solution(ev, lambda, kind, grid, opt.solver);
        std::vector<double> pts;
        for (double x : opt.match_points)
            if (std::binary_search(grid.begin(), grid.end(), x)) pts.push_back(x);
        return ResolventKernel(std::move(phi), std::move(psi), pts);
    }

    cplx lambda() const { return phi_.lambda; }
    const std::vector<double>& grid() const { return phi_.x; }
    const WronskianPair& wronskian() const { return pair_; }
    const AlphaBetaMatrix& alpha_beta() const { return mab_; }
    const SolutionCurve& phi() const { return phi_; }
    const SolutionCurve& psi() const { return psi_; }

    /** @brief Kernel matrix R(x_i, y_j); at i == j the average of both sides. */
    Matrix4C kernel(std::size_t i, std::size_t j) const {
        if (j < i) return left(i, j);
        if (j > i) return right(i, j);
        Matrix4C k = left(i, i) + right(i, i);
        k *= 0.5;
        return k;
    }

    /** @brief u = R f by prefix sums over the grid. */
    std::vector<Spinor4> apply(std::span<const Spinor4> f, CumulativeRule rule = CumulativeRule::Cubic) const {
        const std::size_t n = grid().size();
        if (f.size() != n) throw InvalidParameter("f must be sampled on the kernel grid");
        std::vector<Spinor4> g(n);
        for (std::size_t i = 0; i < n; ++i) g[i] = n_ * f[i];
        std::vector<cplx> a(n), at(n), b(n), bt(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = bilinear(psi_.values[i], g[i]);
            at[i] = bilinear(psit_.values[i], g[i]);
            b[i] = bilinear(phi_.values[i], g[i]);
            bt[i] = bilinear(phit_.values[i], g[i]);
        }
        const CumulativeIntegrator integ(grid(), rule);
        const auto la = integ.prefix<cplx>(a), lat = integ.prefix<cplx>(at);
        const auto rb = integ.suffix<cplx>(b), rbt = integ.suffix<cplx>(bt);
        std::vector<Spinor4> u(n);
        for (std::size_t i = 0; i < n; ++i)
            u[i] = la[i] * phi_.values[i] + lat[i] * phit_.values[i] + rb[i] * psi_.values[i] +
                   rbt[i] * psit_.values[i];
        return u;
    }

    /** @brief u = R f by the O(n^2) kernel sum with trapezoid weights. */
    std::vector<Spinor4> apply_direct(std::span<const Spinor4> f) const {
        const auto& x = grid();
        const std::size_t n = x.size();
        if (f.size() != n) throw InvalidParameter("f must be sampled on the kernel grid");
        std::vector<Spinor4> u(n);
        for (std::size_t i = 0; i < n; ++i) {
            Spinor4 s;
            for (std::size_t j = 0; j < n; ++j) {
                if (j < i) {
                    const double w = 0.5 * ((j > 0 ? x[j] - x[j - 1] : 0.0) + (x[j + 1] - x[j]));
                    s += w * (left(i, j) * f[j]);
                } else if (j > i) {
                    const double w = 0.5 * ((x[j] - x[j - 1]) + (j + 1 < n ? x[j + 1] - x[j] : 0.0));
                    s += w * (right(i, j) * f[j]);
                } else {
                    if (i > 0) s += (0.5 * (x[i] - x[i - 1])) * (left(i, i) * f[i]);
                    if (i + 1 < n) s += (0.5 * (x[i + 1] - x[i])) * (right(i, i) * f[i]);
                }
            }
            u[i] = s;
        }
        return u;
    }

private:
    Matrix4C left(std::size_t i, std::size_t j) const {
        return (outer(phi_.values[i], psi_.values[j]) + outer(phit_.values[i], psit_.values[j])) * n_;
    }
    Matrix4C right(std::size_t i, std::size_t j) const {
        return (outer(psi_.values[i], phi_.values[j]) + outer(psit_.values[i], phit_.values[j])) * n_;
    }

    SolutionCurve phi_, psi_, phit_, psit_;
    WronskianPair pair_;
    AlphaBetaMatrix mab_;
    Matrix4C n_;  // M^{-1} i Gamma^1
};

/** @brief Resolvent (H - lambda)^{-1} f for Im lambda != 0, f sampled on grid. */
inline std::vector<Spinor4> apply_resolvent(const PotentialEvaluator& ev, cplx lambda, std::span<const double> grid,
                                            std::span<const Spinor4> f, const ResolventOptions& opt = {}) {
    if (lambda.imag() == 0.0) throw InvalidParameter("apply_resolvent requires Im lambda != 0");
    return ResolventKernel::build(ev, lambda, grid, opt).apply(f);
}

/**
 * @brief Weighted continuation e^{eps x} R(lambda) e^{eps y} f for Im lambda > -eps,
 * built from the incoming Jost solution.
 */
inline std::vector<Spinor4> weighted_resolvent(const PotentialEvaluator& ev, cplx lambda, double eps,
                                               std::span<const double> grid, std::span<const Spinor4> f,
                                               ResolventOptions opt = {}) {
    if (!(eps > 0.0 && eps < 0.5 * ev.kappa())) throw InvalidParameter("epsilon must lie in (0, kappa/2)");
    if (!(lambda.imag() > -eps + opt.solver.strip_margin * ev.kappa()))
        throw OutOfStrip("lambda outside the weighted strip Im > -epsilon");
    if (f.size() != grid.size()) throw InvalidParameter("f must be sampled on the grid");
    opt.jost = JostKind::Phi3;
    const ResolventKernel k = ResolventKernel::build(ev, lambda, grid, opt);
    std::vector<Spinor4> fw(f.begin(), f.end());
    for (std::size_t i = 0; i < fw.size(); ++i) fw[i] *= std::exp(eps * grid[i]);
    std::vector<Spinor4> u = k.apply(fw);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] *= std::exp(eps * grid[i]);
    return u;
}

/** @brief (H - lambda) u with H = -i Gamma^1 d/dx + V_m, 5-point differences at interior samples. */
inline std::vector<Spinor4> apply_operator(const PotentialEvaluator& ev, cplx lambda, std::span<const double> grid,
                                           std::span<const Spinor4> u) {
    const std::size_t n = grid.size();
    if (u.size() != n || n < 5) throw InvalidParameter("apply_operator needs matching samples, n >= 5");
    const Matrix4C g1 = big_gamma1();
    std::vector<Spinor4> r(n);
    for (std::size_t i = 2; i + 2 < n; ++i) {
        const auto w = fornberg_weights(grid[i], grid.subspan(i - 2, 5), 1);
        Spinor4 d;
        for (std::size_t k = 0; k < 5; ++k) d += w[k] * u[i - 2 + k];
        r[i] = (-kI) * (g1 * d) + ev.Vm(grid[i]) * u[i] - lambda * u[i];
    }
    return r;
}

/** @brief |(H - lambda) u - f|_2 / |f|_2 over the interior samples. */
inline double resolvent_residual(const PotentialEvaluator& ev, cplx lambda, std::span<const double> grid,
                                 std::span<const Spinor4> u, std::span<const Spinor4> f) {
    if (f.size() != grid.size()) throw InvalidParameter("f must be sampled on the grid");
    const std::vector<Spinor4> hu = apply_operator(ev, lambda, grid, u);
    const std::size_t n = grid.size();
    std::vector<double> xs, rr, ff;
    for (std::size_t i = 2; i + 2 < n; ++i) {
        xs.push_back(grid[i]);
        const Spinor4 d = hu[i] - f[i];
        rr.push_back(d.norm2() * d.norm2());
        ff.push_back(f[i].norm2() * f[i].norm2());
    }
    const CumulativeIntegrator integ(xs, CumulativeRule::Trapezoid);
    const double nf = integ.total<double>(ff);
    if (!(nf > 0.0)) throw InvalidParameter("f vanishes on the interior grid");
    return std::sqrt(integ.total<double>(rr) / nf);
}

/** @brief L2 inner product int sum_k a_k conj(b_k) on the grid. */
inline cplx l2_inner(std::span<const double> grid, std::span<const Spinor4> a, std::span<const Spinor4> b) {
    std::vector<cplx> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = hermitian(a[i], b[i]);
    return CumulativeIntegrator(grid).total<cplx>(v);
}

inline double l2_norm(std::span<const double> grid, std::span<const Spinor4> a) {
    return std::sqrt(std::abs(l2_inner(grid, a, a)));
}

}  // namespace sads_dirac
