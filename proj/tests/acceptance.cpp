#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sads_dirac/sads_dirac.hpp"

using namespace sads_dirac;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream note;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            note << " [failed: " << what << "]";
        }
    }
};

struct Unit {
    TortoiseMap map{BlackHoleParams::make(1.0, 1.0)};
    PotentialEvaluator sub{map, ModeParams{0.0, 0.3}};
    PotentialEvaluator super{map, ModeParams{0.0, 1.2}};
};

double rel(const Spinor4& a, const Spinor4& b) { return (a - b).norm_inf() / b.norm_inf(); }

Spinor4 bump(double x) {
    if (!(x > -5.0 && x < -1.0)) return {};
    const double b = std::exp(-1.0 / ((x + 5.0) * (-1.0 - x)));
    return Spinor4(b, 0.5 * b, cplx(0.0, b), -b);
}

std::vector<Spinor4> sample_bump(std::span<const double> g) {
    std::vector<Spinor4> v;
    for (double x : g) v.push_back(bump(x));
    return v;
}

std::vector<Spinor4> random_smooth(std::span<const double> g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> c(-4.5, -0.8), a(-1.0, 1.0), w(0.2, 0.6);
    std::vector<Spinor4> v(g.size());
    for (int k = 0; k < 3; ++k) {
        const double x0 = c(rng), s = w(rng);
        Spinor4 amp;
        for (int j = 0; j < 4; ++j) amp[j] = cplx(a(rng), a(rng));
        for (std::size_t i = 0; i < g.size(); ++i) v[i] += std::exp(-std::pow((g[i] - x0) / s, 2)) * amp;
    }
    return v;
}

// 1. horizon, surface gravity and the tortoise map
void geometry(Check& c) {
    const double rh = horizon_radius(1.0, 1.0), rc = horizon_radius_closed_form(1.0, 1.0);
    const double rb = oracle::cubic_root_bisection(1.0, 1.0);
    c.require(std::abs(rh - 1.0) < 1e-10 && std::abs(rc - 1.0) < 1e-10 && std::abs(rb - 1.0) < 1e-10, "r_sads");
    const BlackHoleParams p = BlackHoleParams::make(1.0, 1.0);
    c.require(std::abs(p.kappa - 2.0) < 1e-10, "kappa");
    const TortoiseMap tm(p);
    const double x2 = tm.tortoise(2.0), q2 = oracle::tortoise_quadrature(1.0, 1.0, 2.0);
    c.require(std::abs(x2 - q2) < 1e-6, "x(2) vs quadrature");
    c.require(std::abs(x2 - -0.4899) < 5e-5, "x(2) rounds to -0.4899");
    c.note << "r_sads=" << rh << " kappa=" << p.kappa << " x(2)=" << x2;
}

// 2. potential asymptotics at both ends
void potentials(Check& c) {
    Unit u;
    const double a = u.sub.A(-1e-3), bp = u.sub.B(-1e-3) + 1.0 / -1e-3;
    c.require(std::abs(a - 1.0) < 1e-5, "A(-1e-3)");
    c.require(std::abs(bp) < 1e-2, "B + l/x");
    const double sa = (std::log(u.sub.A(-10.0)) - std::log(u.sub.A(-12.0))) / 2.0;
    const double sb = (std::log(u.sub.B(-10.0)) - std::log(u.sub.B(-12.0))) / 2.0;
    c.require(std::abs(sa - 2.0) < 1e-3 && std::abs(sb - 2.0) < 1e-3, "log slopes");
    c.note << "A(-1e-3)-1=" << a - 1.0 << " B+l/x=" << bp << " slopes=" << sa << "," << sb;
}

// 3. gamma algebra and the Frobenius matrix
void gamma_algebra(Check& c) {
    const double g[4] = {1.0, -1.0, -1.0, -1.0};
    int exact = 0;
    for (int mu = 0; mu < 4; ++mu)
        for (int nu = 0; nu < 4; ++nu) {
            const Matrix4C ac = gamma(mu) * gamma(nu) + gamma(nu) * gamma(mu);
            Matrix4C expect;
            if (mu == nu) expect = cplx(2.0 * g[mu]) * Matrix4C::identity();
            exact += (ac - expect).max_abs() == 0.0;
        }
    c.require(exact == 16, "Clifford relations");
    double worst = 0.0;
    for (double ml : {0.3, 1.2}) {
        worst = std::max(worst, (frobenius_m0(-1.0, ml) - Matrix4C::identity()).max_abs());
        for (double x : {-0.5, -2.0, -0.013, -7.0}) {
            const Matrix4C m = frobenius_m0(x, ml);
            worst = std::max(worst, (m * frobenius_m0(1.0 / x, ml) - Matrix4C::identity()).max_abs());
            worst = std::max(worst, (m * gamma(1) - gamma(1) * m).max_abs());
        }
    }
    c.require(worst <= 1e-12, "M0 relations");
    c.note << "clifford " << exact << "/16 exact, M0 max dev " << worst;
}

// 4. Jost solutions against the Picard series and the growth bound
void jost(Check& c) {
    Unit u;
    const auto grid = standard_grid(u.sub);
    double worst = 0.0, ratio = 0.0;
    for (cplx lam : {cplx(0.0, 1.0), cplx(1.0, 0.2), cplx(1.0, -0.3 * u.map.kappa())}) {
        const std::vector<double> pts{-3.0, -1.0};
        const SolutionCurve s = jost_solution(u.sub, lam, JostKind::Phi3, pts);
        for (std::size_t i = 0; i < pts.size(); ++i)
            worst = std::max(worst, rel(s.values[i], picard_jost(u.sub, lam, JostKind::Phi3, pts[i], 8)));
        const SolutionCurve full = jost_solution(u.sub, lam, JostKind::Phi3, grid);
        const std::vector<double> bound = jost_growth_bounds(u.sub, lam, grid);
        for (std::size_t i = 0; i < grid.size(); ++i) ratio = std::max(ratio, full.values[i].norm_inf() / bound[i]);
    }
    c.require(worst < 1e-6, "Picard agreement");
    c.require(ratio <= 1.0 + 1e-8, "growth bound");
    c.note << "max rel dev " << worst << ", max |psi|/bound " << ratio << " over " << grid.size() << " points";
}

// 5. boundary solutions against the near-boundary series and its term bounds
void boundary(Check& c) {
    Unit u;
    double worst = 0.0, ratio = 0.0;
    const cplx lam(0.0, 1.0);
    for (const PotentialEvaluator* ev : {&u.sub, &u.super}) {
        const BoundarySeed s = BoundarySeed::canonical(ev->regime());
        const SolutionCurve cv = boundary_solution(*ev, lam, s, standard_grid(*ev));
        worst = std::max(worst, rel(cv.at(-0.1), series_correction(*ev, lam, s, -0.1, 10)));
        const double zmax = 0.3;
        std::vector<double> gg;
        for (int i = 0; i < 400; ++i) gg.push_back(-std::exp(std::log(zmax) + (std::log(1e-10) - std::log(zmax)) * i / 399));
        const double c0 = boundary_growth_constant(*ev, boundary_constant(*ev, lam, gg));
        const BoundarySeries series(*ev, lam, s, zmax, 6);
        const double e = ev->regime() == Regime::Sub ? -ev->ml() : ev->ml();
        for (double x : {-0.3, -0.1, -0.01, -1e-4}) {
            double fact = 1.0;
            for (int n = 0; n <= 5; ++n) {
                if (n > 0) fact *= n;
                const double bound = s.N() * std::pow(-x, e) * std::pow(c0 * -x, n) / fact;
                const Spinor4 t = series.term(n, x);
                for (int j = 0; j < 4; ++j) ratio = std::max(ratio, std::abs(t[j]) / bound);
            }
        }
    }
    c.require(worst < 1e-6, "series agreement");
    c.require(ratio <= 1.0 + 1e-9, "term bounds");
    c.note << "max rel dev " << worst << ", max term/bound " << ratio;
}

// 6. Wronskian constancy and the determinant of M_{alpha,beta}
void wronskian(Check& c) {
    Unit u;
    const cplx lam(0.0, 1.0);
    const auto g = standard_grid(u.sub);
    const SolutionCurve phi = boundary_solution(u.sub, lam, BoundarySeed::canonical(Regime::Sub), g);
    const SolutionCurve psi = jost_solution(u.sub, lam, JostKind::Phi3, g);
    const WronskianPair w = wronskians(phi, psi, std::vector<double>{-0.5, -1.0, -2.0});
    c.require(w.variation < 1e-6, "variation");
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        const cplx a(d(rng), d(rng)), b(d(rng), d(rng));
        const cplx ref = std::pow((a - b) * (a + b), 2);
        worst = std::max(worst, std::abs(determinant_lu(alpha_beta_matrix(a, b)) - ref) / std::abs(ref));
        worst = std::max(worst, std::abs(m_alpha_beta(a, b).det - ref) / std::abs(ref));
    }
    c.require(worst < 1e-12, "det identity");
    c.note << "variation " << w.variation << ", det max rel dev " << worst;
}

// 7. resolvent identity, adjoint symmetry and boundary behaviour
void resolvent(Check& c) {
    Unit u;
    const cplx lam(0.0, 1.0);
    const auto g = standard_grid(u.sub);
    const auto f = sample_bump(g);
    const auto v = apply_resolvent(u.sub, lam, g, f);
    const double res = resolvent_residual(u.sub, lam, g, v, f);
    c.require(res < 1e-4, "residual");

    const auto fa = random_smooth(g, 11), ga = random_smooth(g, 12);
    const cplx lhs = l2_inner(g, apply_resolvent(u.sub, lam, g, fa), ga);
    const cplx rhs = l2_inner(g, fa, apply_resolvent(u.sub, std::conj(lam), g, ga));
    const double adj = std::abs(lhs - rhs) / std::abs(lhs);
    c.require(adj < 1e-6, "adjoint");

    const Matrix4C op = gamma(1) + kI * Matrix4C::identity();
    const double x_end = g.back();
    double first = -1.0, last = 0.0, lfirst = 0.0, llast = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g[i] < 10.0 * x_end) continue;
        const double q = (op * v[i]).norm2() / std::sqrt(-g[i]);
        if (first < 0.0) first = q, lfirst = std::log(-g[i]);
        last = q;
        llast = std::log(-g[i]);
    }
    const double expo = (std::log(last) - std::log(first)) / (llast - lfirst);
    c.require(last < first && expo > 0.0, "sub boundary decay");

    const auto gs = standard_grid(u.super);
    const auto vs = apply_resolvent(u.super, lam, gs, sample_bump(gs));
    double peak = 0.0;
    for (const Spinor4& s : vs) peak = std::max(peak, s.norm2());
    bool monotone = true;
    for (std::size_t i = gs.size() - 10; i + 1 < gs.size(); ++i) monotone = monotone && vs[i].norm2() > vs[i + 1].norm2();
    const double tail = vs.back().norm2() / peak;
    c.require(monotone && tail < 1e-3, "super boundary decay");
    c.note << "residual " << res << ", adjoint " << adj << ", sub exponent " << expo << ", super |u(x_end)|/peak "
           << tail;
}

// 8. no poles in the upper half plane
void upper_half_plane(Check& c) {
    Unit u;
    const std::vector<double> g{-2.0, -1.0, -0.5};
    std::vector<double> ratio(200);
    parallel_for(200, 0, [&](std::size_t k) {
        const int i = static_cast<int>(k % 20), j = static_cast<int>(k / 20);
        const cplx lam(0.1 + 4.9 * i / 19.0, 0.1 + 1.9 * j / 9.0);
        const SolutionCurve phi = boundary_solution(u.sub, lam, BoundarySeed::canonical(Regime::Sub), g);
        const SolutionCurve psi = jost_solution(u.sub, lam, JostKind::Phi3, g);
        const WronskianPair w = wronskians(phi, psi, g);
        ratio[k] = std::abs(w.determinant()) / tol_res(w.alpha, w.beta);
    });
    const double worst = *std::min_element(ratio.begin(), ratio.end());
    c.require(worst > 1.0, "min |alpha^2 - beta^2| > tol_res");
    c.note << "min |alpha^2-beta^2|/tol_res = " << worst << " over 20x10";
}

// 9. weighted continuation across the real axis
void continuation(Check& c) {
    Unit u;
    const double eps = 0.45 * u.map.kappa();
    const auto g = standard_grid(u.sub);
    const auto f = sample_bump(g);
    auto at = [&](double im) { return weighted_resolvent(u.sub, cplx(0.5, im), eps, g, f); };
    const auto a = at(3e-3), b = at(2e-3), d = at(1e-3), below = at(-1e-3);
    std::vector<Spinor4> mis(a.size()), step(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        mis[i] = 3.0 * a[i] - 8.0 * b[i] + 6.0 * d[i] - below[i];
        step[i] = d[i] - below[i];
    }
    const double m = l2_norm(g, mis), local = l2_norm(g, step);
    c.require(m < 1e-2 * local, "three-point extrapolation");

    const cplx lam(0.5, 0.1);
    const auto w = weighted_resolvent(u.sub, lam, eps, g, f);
    std::vector<Spinor4> fw = f;
    for (std::size_t i = 0; i < fw.size(); ++i) fw[i] *= std::exp(eps * g[i]);
    auto dir = apply_resolvent(u.sub, lam, g, fw);
    double worst = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < dir.size(); ++i) {
        dir[i] *= std::exp(eps * g[i]);
        worst = std::max(worst, (w[i] - dir[i]).norm_inf());
        scale = std::max(scale, dir[i].norm_inf());
    }
    c.require(worst < 1e-8 * scale, "weighted = conjugated direct");
    c.note << "mismatch/local " << m / local << ", weighted vs direct " << worst / scale;
}

// 10. resonance search self-consistency
void resonances(Check& c) {
    Unit u;
    const Determinant d(u.sub);
    const auto in_strip = [&](cplx z) { return d.in_strip(z); };
    const double eps = 0.45 * u.map.kappa();
    const ScanRegion coarse{{0.0, 6.0, -eps, -1e-3}, 25, 10, eps};
    const ScanRegion fine{{0.0, 6.0, -eps, -1e-3}, 50, 20, eps};
    const SearchResult a = find_resonances(d, coarse, {}, in_strip);
    const SearchResult b = find_resonances(d, fine, {}, in_strip);
    c.require(a.resonances.size() == b.resonances.size(), "count under 2x scan");
    const int wc = count_zeros(d, coarse.rect);
    c.require(wc == static_cast<int>(a.resonances.size()), "winding count matches");

    DeterminantOptions tight;
    tight.solver.rtol = 1e-11;
    tight.solver.atol = 1e-13;
    DeterminantOptions moved;
    moved.x_match = -0.5;
    const Determinant dt(u.sub, tight), dm(u.sub, moved);
    double shift = 0.0, resid = 0.0;
    int min_wind = 1 << 30;
    for (const Resonance& r : a.resonances) {
        resid = std::max(resid, r.abs_D / r.scale);
        min_wind = std::min(min_wind, r.winding);
        shift = std::max(shift, std::abs(refine(dt, r.lambda, {}, in_strip).lambda - r.lambda));
        shift = std::max(shift, std::abs(refine(dm, r.lambda, {}, in_strip).lambda - r.lambda));
        c.note << "lambda*=" << r.lambda.real() << (r.lambda.imag() < 0 ? "" : "+") << r.lambda.imag() << "i ";
    }
    c.require(resid < 1e-8, "|D| < 1e-8 scale");
    c.require(a.resonances.empty() || min_wind >= 1, "winding >= 1");
    c.require(shift < 1e-6, "position stability");
    c.note << "count " << a.resonances.size() << "/" << b.resonances.size() << " winding " << wc << ", max |D|/scale "
           << resid << ", max shift " << shift;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit;  // seconds, 0 when none
        std::function<void(Check&)> body;
    };
    const std::vector<Criterion> all{
        {1, "geometry", 1.0, geometry},
        {2, "potential asymptotics", 1.0, potentials},
        {3, "gamma algebra", 0.0, gamma_algebra},
        {4, "Jost oracle equivalence", 30.0, jost},
        {5, "boundary series oracle equivalence", 30.0, boundary},
        {6, "Wronskian constancy", 0.0, wronskian},
        {7, "resolvent identity", 120.0, resolvent},
        {8, "no upper-half-plane poles", 300.0, upper_half_plane},
        {9, "meromorphic continuation", 120.0, continuation},
        {10, "resonance search self-consistency", 600.0, resonances},
    };
    int failed = 0;
    for (const Criterion& k : all) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            k.body(c);
        } catch (const std::exception& e) {
            c.ok = false;
            c.note << " [exception: " << e.what() << "]";
        }
        const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (k.limit > 0.0) c.require(t < k.limit, "runtime");
        failed += !c.ok;
        std::printf("criterion %2d %-36s %s  %.2f s  %s\n", k.id, k.name, c.ok ? "PASS" : "FAIL", t,
                    c.note.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
    return failed == 0 ? 0 : 1;
}
