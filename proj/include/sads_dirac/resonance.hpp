#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sads_dirac/boundary.hpp"
#include "sads_dirac/error.hpp"
#include "sads_dirac/jost.hpp"
#include "sads_dirac/parallel.hpp"
#include "sads_dirac/potentials.hpp"
#include "sads_dirac/resolvent.hpp"
#include "sads_dirac/spinor.hpp"

namespace sads_dirac {

using DFunction = std::function<cplx(cplx)>;
using DomainTest = std::function<bool(cplx)>;

struct DeterminantOptions {
    SolverOptions solver;
    double x_match = -1.0;
    std::optional<BoundarySeed> seed;
};

/**
 * @brief D(lambda) = alpha^2 - beta^2 from the canonical boundary solution and the
 * incoming Jost solution, both integrated only up to x_match.
 */
class Determinant {
public:
    Determinant(const PotentialEvaluator& ev, DeterminantOptions opt = {}) : ev_(&ev), opt_(std::move(opt)) {
        if (!(opt_.x_match < 0.0)) throw DomainError("x_match must be negative");
        if (!(opt_.x_match < opt_.solver.x0)) throw InvalidParameter("x_match must lie left of x0");
    }

    bool in_strip(cplx lambda) const {
        return lambda.imag() > -0.5 * ev_->kappa() + opt_.solver.strip_margin * ev_->kappa();
    }

    WronskianPair pair(cplx lambda) const {
        check_jost_strip(*ev_, lambda, JostKind::Phi3, opt_.solver.strip_margin);
        const std::vector<double> g{opt_.x_match};
        const BoundarySeed seed = opt_.seed.value_or(BoundarySeed::canonical(ev_->regime()));
        const SolutionCurve phi = boundary_solution(*ev_, lambda, seed, g, opt_.solver);
        const SolutionCurve psi = jost_solution(*ev_, lambda, JostKind::Phi3, g, opt_.solver);
        return wronskians(phi, psi, g);
    }

    cplx operator()(cplx lambda) const { return pair(lambda).determinant(); }

    const DeterminantOptions& options() const { return opt_; }

private:
    const PotentialEvaluator* ev_;
    DeterminantOptions opt_;
};

inline cplx determinant(const PotentialEvaluator& ev, cplx lambda, const DeterminantOptions& opt = {}) {
    return Determinant(ev, opt)(lambda);
}

struct Rect {
    double re_min = 0.0, re_max = 0.0, im_min = 0.0, im_max = 0.0;

    cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }
    bool contains(cplx z, double pad = 0.0) const {
        return z.real() >= re_min - pad && z.real() <= re_max + pad && z.imag() >= im_min - pad &&
               z.imag() <= im_max + pad;
    }
    static Rect around(cplx z, double half) {
        return {z.real() - half, z.real() + half, z.imag() - half, z.imag() + half};
    }
};

struct ScanRegion {
    Rect rect;
    int nx = 0, ny = 0;
    double epsilon = 0.0;

    /** @brief Throws InvalidParameter unless the region is empty or nx, ny >= 4 inside Im >= -epsilon. */
    void validate(double kappa) const {
        if (nx < 0 || ny < 0) throw InvalidParameter("negative scan counts");
        if (static_cast<long>(nx) * ny == 0) return;
        if (nx < 4 || ny < 4) throw InvalidParameter("scan counts must be >= 4");
        if (!(rect.re_min < rect.re_max) || !(rect.im_min < rect.im_max)) throw InvalidParameter("empty rectangle");
        if (!(epsilon > 0.0 && epsilon < 0.5 * kappa)) throw InvalidParameter("epsilon must lie in (0, kappa/2)");
        if (!(rect.im_min >= -epsilon)) throw OutOfStrip("scan rectangle leaves Im >= -epsilon");
    }

    double re(int i) const { return nx == 1 ? rect.re_min : rect.re_min + (rect.re_max - rect.re_min) * i / (nx - 1); }
    double im(int j) const { return ny == 1 ? rect.im_min : rect.im_min + (rect.im_max - rect.im_min) * j / (ny - 1); }
};

struct ScanField {
    ScanRegion region;
    std::vector<cplx> values;         // row j (imaginary), column i (real): values[j * nx + i]
    std::vector<std::string> errors;  // empty string for successful cells

    bool empty() const { return values.empty(); }
    cplx lambda(int i, int j) const { return {region.re(i), region.im(j)}; }
    cplx at(int i, int j) const { return values[static_cast<std::size_t>(j) * region.nx + i]; }
    bool ok(int i, int j) const { return errors[static_cast<std::size_t>(j) * region.nx + i].empty(); }

    /** @brief Smallest |D| over successful cells, with its cell. */
    double min_abs(int* ci = nullptr, int* cj = nullptr) const {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < region.ny; ++j)
            for (int i = 0; i < region.nx; ++i)
                if (ok(i, j) && std::abs(at(i, j)) < best) {
                    best = std::abs(at(i, j));
                    if (ci) *ci = i;
                    if (cj) *cj = j;
                }
        return best;
    }
};

/** @brief Samples D on the region grid in parallel; a failing cell records its message and the scan continues. */
inline ScanField scan(const DFunction& d, const ScanRegion& region, unsigned threads = 0) {
    ScanField f;
    f.region = region;
    const std::size_t n = static_cast<std::size_t>(region.nx) * static_cast<std::size_t>(region.ny);
    f.values.assign(n, cplx(std::numeric_limits<double>::quiet_NaN(), 0.0));
    f.errors.assign(n, std::string());
    parallel_for(n, threads, [&](std::size_t k) {
        const int i = static_cast<int>(k % region.nx), j = static_cast<int>(k / region.nx);
        try {
            f.values[k] = d(f.lambda(i, j));
            if (!std::isfinite(std::abs(f.values[k]))) f.errors[k] = "non-finite determinant";
        } catch (const std::exception& e) {
            f.errors[k] = e.what();
            if (f.errors[k].empty()) f.errors[k] = "failure";
        }
    });
    return f;
}

struct WindingOptions {
    int initial = 24;        // samples per edge
    int max_depth = 12;      // bisection levels per segment
    double max_step = 0.5;   // accepted phase change between neighbors
    double nudge = 1e-3;     // relative outward shift when a zero sits on the contour
    int max_nudges = 3;
    unsigned threads = 0;
};

namespace detail {

inline int winding_once(const DFunction& d, const Rect& r, const WindingOptions& o) {
    const cplx c[4] = {{r.re_min, r.im_min}, {r.re_max, r.im_min}, {r.re_max, r.im_max}, {r.re_min, r.im_max}};
    std::vector<cplx> z;
    for (int e = 0; e < 4; ++e)
        for (int k = 0; k < o.initial; ++k) z.push_back(c[e] + (c[(e + 1) % 4] - c[e]) * (double(k) / o.initial));
    std::vector<cplx> v(z.size());
    parallel_for(z.size(), o.threads, [&](std::size_t k) { v[k] = d(z[k]); });
    std::vector<int> depth(z.size(), 0);  // depth of the segment starting at k
    double scale = 0.0;
    for (const cplx& w : v) scale = std::max(scale, std::abs(w));
    auto degenerate = [&](const cplx& w) { return !(std::abs(w) > 1e-13 * scale); };
    for (const cplx& w : v)
        if (degenerate(w)) throw AtResonance("zero on the contour");
    while (true) {
        std::vector<std::size_t> split;
        const std::size_t n = z.size();
        for (std::size_t k = 0; k < n; ++k) {
            const double dphi = std::abs(std::arg(v[(k + 1) % n] / v[k]));
            if (dphi > o.max_step && depth[k] < o.max_depth) split.push_back(k);
        }
        if (split.empty()) break;
        std::vector<cplx> mz(split.size()), mv(split.size());
        for (std::size_t s = 0; s < split.size(); ++s) mz[s] = 0.5 * (z[split[s]] + z[(split[s] + 1) % n]);
        parallel_for(split.size(), o.threads, [&](std::size_t s) { mv[s] = d(mz[s]); });
        for (const cplx& w : mv)
            if (degenerate(w)) throw AtResonance("zero on the contour");
        std::vector<cplx> nz, nv;
        std::vector<int> nd;
        std::size_t s = 0;
        for (std::size_t k = 0; k < n; ++k) {
            const bool sp = s < split.size() && split[s] == k;
            nz.push_back(z[k]);
            nv.push_back(v[k]);
            nd.push_back(sp ? depth[k] + 1 : depth[k]);
            if (sp) {
                nz.push_back(mz[s]);
                nv.push_back(mv[s]);
                nd.push_back(depth[k] + 1);
                ++s;
            }
        }
        z.swap(nz);
        v.swap(nv);
        depth.swap(nd);
    }
    double total = 0.0;
    const std::size_t n = z.size();
    for (std::size_t k = 0; k < n; ++k) {
        const double dphi = std::arg(v[(k + 1) % n] / v[k]);
        if (std::abs(dphi) > std::numbers::pi * (1.0 - 1e-9))
            throw Inconclusive("phase jump above pi after maximal refinement");
        if (std::abs(dphi) > o.max_step && depth[k] >= o.max_depth)
            throw Inconclusive("phase jump unresolved after maximal refinement");
        total += dphi;
    }
    const double w = total / (2.0 * std::numbers::pi);
    const double rounded = std::round(w);
    if (std::abs(w - rounded) > 0.1) throw Inconclusive("winding number not close to an integer");
    return static_cast<int>(rounded);
}

}  // namespace detail

/**
 * @brief Number of zeros of d inside r (with multiplicity) from the winding of d along
 * the boundary; the rectangle is pushed outward when a zero sits on the contour.
 */
inline int count_zeros(const DFunction& d, Rect r, const WindingOptions& o = {}) {
    if (!(r.re_min < r.re_max) || !(r.im_min < r.im_max)) throw InvalidParameter("empty rectangle");
    for (int attempt = 0;; ++attempt) {
        try {
            return detail::winding_once(d, r, o);
        } catch (const AtResonance&) {
            if (attempt >= o.max_nudges) throw Inconclusive("zero on the contour after nudging");
            const double dx = o.nudge * (r.re_max - r.re_min), dy = o.nudge * (r.im_max - r.im_min);
            r = {r.re_min - dx, r.re_max + dx, r.im_min - dy, r.im_max + dy};
        }
    }
}

struct Resonance {
    cplx lambda{};
    double abs_D = 0.0;
    double scale = 0.0;  // max |D| on a circle of radius 1e-2 max(1, |lambda|)
    int winding = 0;
    int iterations = 0;
};

struct RefineOptions {
    int max_iter = 60;
    double step_tol = 1e-10;  // relative to max(1, |lambda|)
    double first_step = 1e-3;
    double box_half = 1e-3;   // winding check box, relative to max(1, |lambda|)
    bool check_winding = true;
    WindingOptions winding;
};

namespace detail {

inline double local_scale(const DFunction& d, cplx z) {
    const double r = 1e-2 * std::max(1.0, std::abs(z));
    double s = 0.0;
    for (cplx u : {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)}) s = std::max(s, std::abs(d(z + r * u)));
    return s;
}

inline cplx muller_step(cplx x0, cplx x1, cplx x2, cplx f0, cplx f1, cplx f2) {
    const cplx h1 = x1 - x0, h2 = x2 - x1;
    const cplx d1 = (f1 - f0) / h1, d2 = (f2 - f1) / h2;
    const cplx a = (d2 - d1) / (h2 + h1);
    const cplx b = a * h2 + d2;
    const cplx disc = std::sqrt(b * b - 4.0 * f2 * a);
    const cplx den = std::abs(b + disc) >= std::abs(b - disc) ? b + disc : b - disc;
    if (den == cplx{}) return x2 + h2;
    return x2 - 2.0 * f2 / den;
}

}  // namespace detail

/**
 * @brief Secant iteration from lambda0 with a Muller fallback on stagnation.
 * Throws ConvergenceError after max_iter iterations or when in_domain rejects an iterate.
 */
inline Resonance refine(const DFunction& d, cplx lambda0, const RefineOptions& o = {},
                        const DomainTest& in_domain = {}) {
    auto inside = [&](cplx z) { return !in_domain || in_domain(z); };
    if (!inside(lambda0)) throw OutOfStrip("starting point outside the domain");
    cplx x0 = lambda0, x1 = lambda0 + o.first_step * std::max(1.0, std::abs(lambda0));
    if (!inside(x1)) x1 = lambda0 - o.first_step * std::max(1.0, std::abs(lambda0));
    cplx f0 = d(x0), f1 = d(x1);
    cplx xp = x0, fp = f0;  // third point for Muller
    bool have_three = false;
    int stalls = 0;
    for (int it = 1; it <= o.max_iter; ++it) {
        cplx x2;
        const bool use_muller = have_three && stalls > 0;
        if (use_muller) {
            x2 = detail::muller_step(xp, x0, x1, fp, f0, f1);
        } else if (f1 != f0) {
            x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        } else {
            x2 = x1 + (x1 - x0);
        }
        if (!std::isfinite(std::abs(x2))) throw ConvergenceError("refinement produced a non-finite iterate");
        if (!inside(x2)) throw ConvergenceError("refinement escaped the strip");
        const cplx f2 = d(x2);
        const double step = std::abs(x2 - x1);
        stalls = std::abs(f2) >= std::abs(f1) ? stalls + 1 : 0;
        xp = x0;
        fp = f0;
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f2;
        have_three = true;
        if (step <= o.step_tol * std::max(1.0, std::abs(x1)) || f1 == cplx{}) {
            Resonance r;
            r.lambda = x1;
            r.abs_D = std::abs(f1);
            r.scale = detail::local_scale(d, x1);
            r.iterations = it;
            if (o.check_winding) {
                const double h = o.box_half * std::max(1.0, std::abs(x1));
                r.winding = count_zeros(d, Rect::around(x1, h), o.winding);
            }
            return r;
        }
    }
    throw ConvergenceError("refinement did not converge within the iteration limit");
}

struct SearchOptions {
    RefineOptions refine;
    unsigned threads = 0;
    double dedupe = 1e-6;  // relative to max(1, |lambda|)
};

struct SearchResult {
    ScanField field;
    std::vector<Resonance> resonances;  // inside the region, sorted by real part
    int candidates = 0;
    std::vector<std::string> failures;  // candidates whose refinement failed
};

/**
 * @brief Scan, then refine every interior local minimum of |D| (8-neighbourhood)
 * and keep the distinct roots that land inside the region.
 */
inline SearchResult find_resonances(const DFunction& d, const ScanRegion& region, const SearchOptions& o = {},
                                    const DomainTest& in_domain = {}) {
    SearchResult res;
    res.field = scan(d, region, o.threads);
    if (res.field.empty()) return res;
    const ScanField& f = res.field;
    std::vector<cplx> starts;
    for (int j = 0; j < region.ny; ++j)
        for (int i = 0; i < region.nx; ++i) {
            if (!f.ok(i, j)) continue;
            const double v = std::abs(f.at(i, j));
            bool minimum = true;
            for (int dj = -1; dj <= 1 && minimum; ++dj)
                for (int di = -1; di <= 1; ++di) {
                    if (di == 0 && dj == 0) continue;
                    const int a = i + di, b = j + dj;
                    if (a < 0 || b < 0 || a >= region.nx || b >= region.ny || !f.ok(a, b)) continue;
                    if (std::abs(f.at(a, b)) <= v) {
                        minimum = false;
                        break;
                    }
                }
            if (minimum) starts.push_back(f.lambda(i, j));
        }
    res.candidates = static_cast<int>(starts.size());
    std::vector<std::optional<Resonance>> found(starts.size());
    std::vector<std::string> errs(starts.size());
    RefineOptions ro = o.refine;
    ro.winding.threads = 1;
    parallel_for(starts.size(), o.threads, [&](std::size_t k) {
        try {
            found[k] = refine(d, starts[k], ro, in_domain);
        } catch (const std::exception& e) {
            errs[k] = e.what();
        }
    });
    const double hx = (region.rect.re_max - region.rect.re_min) / std::max(1, region.nx - 1);
    const double hy = (region.rect.im_max - region.rect.im_min) / std::max(1, region.ny - 1);
    for (std::size_t k = 0; k < starts.size(); ++k) {
        if (!found[k]) {
            res.failures.push_back(errs[k]);
            continue;
        }
        const Resonance& r = *found[k];
        if (!region.rect.contains(r.lambda, 1e-12 * std::max(hx, hy))) continue;
        bool dup = false;
        for (const auto& q : res.resonances)
            if (std::abs(q.lambda - r.lambda) <= o.dedupe * std::max(1.0, std::abs(r.lambda))) dup = true;
        if (!dup) res.resonances.push_back(r);
    }
    std::sort(res.resonances.begin(), res.resonances.end(),
              [](const Resonance& a, const Resonance& b) { return a.lambda.real() < b.lambda.real(); });
    return res;
}

}  // namespace sads_dirac
